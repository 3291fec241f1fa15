#pragma once

// Minimum spanning tree backbone and the Christofides-style seed tour built on it:
// MST -> odd-degree vertices -> matching -> Euler walk -> shortcut.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sine/error.hpp"
#include "sine/instance.hpp"
#include "sine/tour.hpp"

namespace sine {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

/// Spanning tree over a node subset. `adjacency` is indexed by global node id.
struct Backbone {
  std::vector<NodeIndex> nodes;  // sorted subset
  std::vector<Edge> mst_edges;   // in Kruskal acceptance order
  double total_cost = 0.0;
  std::vector<std::vector<NodeIndex>> adjacency;

  std::size_t degree(NodeIndex v) const { return adjacency.at(v).size(); }
};

namespace detail {

inline std::vector<NodeIndex> normalized_subset(std::span<const NodeIndex> subset, std::size_t dim) {
  std::vector<NodeIndex> nodes(subset.begin(), subset.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  if (!nodes.empty() && nodes.back() >= dim) {
    throw DomainError("node index " + std::to_string(nodes.back()) + " outside the distance matrix");
  }
  return nodes;
}

inline bool edge_less(const Edge& a, const Edge& b) {
  if (a.weight != b.weight) return a.weight < b.weight;
  if (a.u != b.u) return a.u < b.u;
  return a.v < b.v;
}

inline std::vector<Edge> induced_edges(const DistanceMatrix& d, std::span<const NodeIndex> nodes) {
  std::vector<Edge> edges;
  edges.reserve(nodes.size() * (nodes.size() - 1) / 2);
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      edges.push_back(make_edge(nodes[a], nodes[b], d(nodes[a], nodes[b])));
    }
  }
  std::sort(edges.begin(), edges.end(), edge_less);
  return edges;
}

}  // namespace detail

/// Kruskal over the complete graph induced by `subset`; ties broken by (weight, u, v).
inline Backbone kruskal_mst(const DistanceMatrix& d, std::span<const NodeIndex> subset) {
  if (subset.empty()) throw DomainError("kruskal_mst: empty node subset");
  Backbone b;
  b.nodes = detail::normalized_subset(subset, d.dim());
  b.adjacency.assign(d.dim(), {});
  if (b.nodes.size() == 1) return b;

  UnionFind uf(d.dim());
  const std::size_t want = b.nodes.size() - 1;
  for (const Edge& e : detail::induced_edges(d, b.nodes)) {
    if (!uf.unite(e.u, e.v)) continue;
    b.mst_edges.push_back(e);
    b.total_cost += e.weight;
    b.adjacency[e.u].push_back(e.v);
    b.adjacency[e.v].push_back(e.u);
    if (b.mst_edges.size() == want) break;
  }
  return b;
}

inline std::vector<NodeIndex> odd_degree_vertices(const Backbone& b) {
  std::vector<NodeIndex> odd;
  for (NodeIndex v : b.nodes) {
    if (b.degree(v) % 2 == 1) odd.push_back(v);
  }
  return odd;
}

/// Repeatedly pairs the globally shortest edge between two unmatched nodes.
inline std::vector<Edge> greedy_min_matching(const DistanceMatrix& d, std::span<const NodeIndex> odd) {
  if (odd.size() % 2 != 0) {
    throw DomainError("matching needs an even vertex count, got " + std::to_string(odd.size()));
  }
  const auto nodes = detail::normalized_subset(odd, d.dim());
  std::vector<Edge> matching;
  if (nodes.empty()) return matching;
  std::vector<bool> matched(d.dim(), false);
  for (const Edge& e : detail::induced_edges(d, nodes)) {
    if (matched[e.u] || matched[e.v]) continue;
    matched[e.u] = matched[e.v] = true;
    matching.push_back(e);
    if (matching.size() * 2 == nodes.size()) break;
  }
  return matching;
}

inline constexpr std::size_t kExactMatchingLimit = 12;

/// Minimum-weight perfect matching by subset dynamic programming; |odd| <= 12.
inline std::vector<Edge> exact_min_matching(const DistanceMatrix& d, std::span<const NodeIndex> odd) {
  if (odd.size() % 2 != 0) {
    throw DomainError("matching needs an even vertex count, got " + std::to_string(odd.size()));
  }
  const auto nodes = detail::normalized_subset(odd, d.dim());
  const std::size_t k = nodes.size();
  if (k > kExactMatchingLimit) {
    throw DomainError("exact matching supports at most " + std::to_string(kExactMatchingLimit) +
                      " vertices, got " + std::to_string(k));
  }
  std::vector<Edge> matching;
  if (k == 0) return matching;

  const std::size_t full = (std::size_t{1} << k) - 1;
  constexpr double inf = std::numeric_limits<double>::infinity();
  // best[mask]: cheapest matching of the vertices in `mask`; choice[mask]: partner of its lowest bit.
  std::vector<double> best(full + 1, inf);
  std::vector<std::uint8_t> choice(full + 1, 0);
  best[0] = 0.0;
  for (std::size_t mask = 1; mask <= full; ++mask) {
    if (std::popcount(mask) % 2 != 0) continue;
    const std::size_t i = static_cast<std::size_t>(std::countr_zero(mask));
    for (std::size_t j = i + 1; j < k; ++j) {
      if (!(mask & (std::size_t{1} << j))) continue;
      const std::size_t rest = mask & ~(std::size_t{1} << i) & ~(std::size_t{1} << j);
      const double c = best[rest] + d(nodes[i], nodes[j]);
      if (c < best[mask]) {
        best[mask] = c;
        choice[mask] = static_cast<std::uint8_t>(j);
      }
    }
  }
  std::size_t mask = full;
  while (mask != 0) {
    const std::size_t i = static_cast<std::size_t>(std::countr_zero(mask));
    const std::size_t j = choice[mask];
    matching.push_back(make_edge(nodes[i], nodes[j], d(nodes[i], nodes[j])));
    mask &= ~(std::size_t{1} << i);
    mask &= ~(std::size_t{1} << j);
  }
  return matching;
}

inline double edge_cost(std::span<const Edge> edges) {
  double total = 0.0;
  for (const auto& e : edges) total += e.weight;
  return total;
}

/// Hierholzer's walk over the multigraph MST + matching, starting and ending at `start`.
inline std::vector<NodeIndex> euler_tour(const Backbone& mst, std::span<const Edge> matching, NodeIndex start) {
  const std::size_t dim = mst.adjacency.size();
  if (start >= dim) throw DomainError("euler_tour: start node outside the backbone");

  std::vector<Edge> edges(mst.mst_edges.begin(), mst.mst_edges.end());
  edges.insert(edges.end(), matching.begin(), matching.end());
  if (edges.empty()) return {start};

  // incident[v] holds edge ids; used[] marks consumed multigraph edges.
  std::vector<std::vector<std::size_t>> incident(dim);
  for (std::size_t id = 0; id < edges.size(); ++id) {
    if (edges[id].u >= dim || edges[id].v >= dim) throw DomainError("euler_tour: edge outside the backbone");
    incident[edges[id].u].push_back(id);
    incident[edges[id].v].push_back(id);
  }
  for (std::size_t v = 0; v < dim; ++v) {
    if (incident[v].size() % 2 != 0) {
      throw InvariantError("euler_tour: node " + std::to_string(v) + " has odd degree " +
                           std::to_string(incident[v].size()));
    }
  }
  if (incident[start].empty()) throw InvariantError("euler_tour: start node has no incident edges");

  std::vector<bool> used(edges.size(), false);
  std::vector<std::size_t> cursor(dim, 0);
  std::vector<NodeIndex> stack{start};
  std::vector<NodeIndex> walk;
  walk.reserve(edges.size() + 1);
  while (!stack.empty()) {
    const NodeIndex v = stack.back();
    auto& cur = cursor[v];
    while (cur < incident[v].size() && used[incident[v][cur]]) ++cur;
    if (cur == incident[v].size()) {
      walk.push_back(v);
      stack.pop_back();
      continue;
    }
    const std::size_t id = incident[v][cur];
    used[id] = true;
    stack.push_back(edges[id].u == v ? edges[id].v : edges[id].u);
  }
  if (walk.size() != edges.size() + 1) {
    throw InvariantError("euler_tour: multigraph is not connected");
  }
  std::reverse(walk.begin(), walk.end());
  return walk;
}

/// Hamiltonian order with the length of its closed tour.
struct SeedTour {
  std::vector<NodeIndex> order;
  double length = 0.0;
};

/// Keeps the first occurrence of every node in walk order.
inline SeedTour shortcut(std::span<const NodeIndex> walk, const DistanceMatrix& d) {
  SeedTour seed;
  std::vector<bool> seen(d.dim(), false);
  for (NodeIndex v : walk) {
    if (seen[v]) continue;
    seen[v] = true;
    seed.order.push_back(v);
  }
  seed.length = tour_length(seed.order, d);
  return seed;
}

/// Closed walk length (the walk repeats its start at the end).
inline double walk_length(std::span<const NodeIndex> walk, const DistanceMatrix& d) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < walk.size(); ++i) total += d(walk[i], walk[i + 1]);
  return total;
}

/// Depth-first preorder of the MST from `start`, closed into a tour.
inline SeedTour dfs_preorder_seed(const Backbone& mst, NodeIndex start, const DistanceMatrix& d) {
  std::vector<NodeIndex> order;
  std::vector<bool> seen(mst.adjacency.size(), false);
  std::vector<NodeIndex> stack{start};
  while (!stack.empty()) {
    const NodeIndex v = stack.back();
    stack.pop_back();
    if (seen[v]) continue;
    seen[v] = true;
    order.push_back(v);
    auto nbrs = mst.adjacency[v];
    std::sort(nbrs.begin(), nbrs.end(), std::greater<>{});
    for (NodeIndex w : nbrs) {
      if (!seen[w]) stack.push_back(w);
    }
  }
  return shortcut(order, d);
}

enum class MatchingMethod { Greedy, ExactSmall };
enum class SeedMethod { Christofides, DfsPreorder };

/// Every intermediate of the seed construction, kept for inspection and bounds checks.
struct SeedConstruction {
  Backbone mst;
  std::vector<NodeIndex> odd;
  std::vector<Edge> matching;
  double matching_cost = 0.0;
  std::vector<NodeIndex> walk;
  double walk_length = 0.0;
  SeedTour tour;
};

/// Builds the seed tour for `subset`. ExactSmall falls back to greedy above 12 odd vertices.
inline SeedConstruction build_seed(const DistanceMatrix& d, std::span<const NodeIndex> subset,
                                   MatchingMethod matching = MatchingMethod::Greedy,
                                   SeedMethod method = SeedMethod::Christofides) {
  SeedConstruction s;
  s.mst = kruskal_mst(d, subset);
  const NodeIndex start = s.mst.nodes.front();
  if (method == SeedMethod::DfsPreorder) {
    s.tour = dfs_preorder_seed(s.mst, start, d);
    return s;
  }
  s.odd = odd_degree_vertices(s.mst);
  s.matching = (matching == MatchingMethod::ExactSmall && s.odd.size() <= kExactMatchingLimit)
                   ? exact_min_matching(d, s.odd)
                   : greedy_min_matching(d, s.odd);
  s.matching_cost = edge_cost(s.matching);
  s.walk = euler_tour(s.mst, s.matching, start);
  s.walk_length = sine::walk_length(s.walk, d);
  s.tour = shortcut(s.walk, d);
  return s;
}

}  // namespace sine
