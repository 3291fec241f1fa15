#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sine/instance.hpp"

namespace sine {

using NodeIndex = std::size_t;

/// Unordered edge, stored with u < v.
struct Edge {
  NodeIndex u = 0;
  NodeIndex v = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

inline Edge make_edge(NodeIndex a, NodeIndex b, double weight) {
  if (a == b) throw DomainError("edge endpoints must differ");
  return a < b ? Edge{a, b, weight} : Edge{b, a, weight};
}

inline std::pair<NodeIndex, NodeIndex> edge_key(NodeIndex a, NodeIndex b) noexcept {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

/// Closed walk length: consecutive distances plus the closing edge. One node costs 0.
inline double tour_length(std::span<const NodeIndex> order, const DistanceMatrix& d) {
  if (order.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) total += d(order[i], order[i + 1]);
  return total + d(order.back(), order.front());
}

/// A robot's closed tour over one subset; the return to order.front() is implicit.
struct Tour {
  std::vector<NodeIndex> order;
  double length = 0.0;

  friend bool operator==(const Tour&, const Tour&) = default;
};

inline Tour make_tour(std::vector<NodeIndex> order, const DistanceMatrix& d) {
  const double len = tour_length(order, d);
  return Tour{std::move(order), len};
}

/// Distinct unordered edges of a closed tour, sorted.
inline std::vector<std::pair<NodeIndex, NodeIndex>> tour_edges(std::span<const NodeIndex> order) {
  std::vector<std::pair<NodeIndex, NodeIndex>> edges;
  if (order.size() < 2) return edges;
  edges.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const NodeIndex a = order[i];
    const NodeIndex b = order[(i + 1) % order.size()];
    edges.push_back(edge_key(a, b));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace sine
