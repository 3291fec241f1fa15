#pragma once

// Splits the node set into m disjoint, size-balanced subsets, one per robot.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sine/error.hpp"
#include "sine/instance.hpp"
#include "sine/tour.hpp"

namespace sine {

enum class PartitionMethod { AngleSweep, KMeansLike, ContiguousBlocks };

inline std::string_view to_string(PartitionMethod m) {
  switch (m) {
    case PartitionMethod::AngleSweep: return "angle";
    case PartitionMethod::KMeansLike: return "kmeans";
    case PartitionMethod::ContiguousBlocks: return "blocks";
  }
  return "angle";
}

struct Partition {
  std::vector<std::vector<NodeIndex>> subsets;
  PartitionMethod method = PartitionMethod::AngleSweep;

  std::size_t robots() const noexcept { return subsets.size(); }
};

namespace detail {

inline void check_counts(std::size_t n, std::size_t m) {
  if (m < 1) throw DomainError("partition: robot count must be at least 1");
  if (m > n) {
    throw DomainError("partition: " + std::to_string(m) + " robots exceed " + std::to_string(n) + " nodes");
  }
}

// Cuts `order` into m runs whose sizes are floor(n/m) or ceil(n/m), larger runs first.
inline std::vector<std::vector<NodeIndex>> cut_blocks(std::span<const NodeIndex> order, std::size_t m) {
  const std::size_t n = order.size();
  const std::size_t base = n / m;
  const std::size_t extra = n % m;
  std::vector<std::vector<NodeIndex>> out(m);
  std::size_t pos = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t len = base + (k < extra ? 1 : 0);
    out[k].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                  order.begin() + static_cast<std::ptrdiff_t>(pos + len));
    std::sort(out[k].begin(), out[k].end());
    pos += len;
  }
  return out;
}

inline NodeCoord centroid(const Instance& inst) {
  NodeCoord c{0.0, 0.0};
  for (const auto& p : inst.nodes()) {
    c.x += p.x;
    c.y += p.y;
  }
  c.x /= static_cast<double>(inst.dimension());
  c.y /= static_cast<double>(inst.dimension());
  return c;
}

inline double sq_dist(const NodeCoord& a, const NodeCoord& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

}  // namespace detail

/// Node ids in file order, cut into consecutive blocks.
inline Partition partition_blocks(const Instance& inst, std::size_t m) {
  detail::check_counts(inst.dimension(), m);
  std::vector<NodeIndex> order(inst.dimension());
  std::iota(order.begin(), order.end(), NodeIndex{0});
  return {detail::cut_blocks(order, m), PartitionMethod::ContiguousBlocks};
}

/// Polar-angle sweep around `center` (coordinate centroid by default), cut into m blocks.
inline Partition partition_angle(const Instance& inst, std::size_t m,
                                 std::optional<NodeCoord> center = std::nullopt) {
  detail::check_counts(inst.dimension(), m);
  const NodeCoord c = center.value_or(detail::centroid(inst));
  std::vector<double> angle(inst.dimension());
  for (std::size_t i = 0; i < inst.dimension(); ++i) {
    angle[i] = std::atan2(inst.nodes()[i].y - c.y, inst.nodes()[i].x - c.x);
  }
  std::vector<NodeIndex> order(inst.dimension());
  std::iota(order.begin(), order.end(), NodeIndex{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeIndex a, NodeIndex b) { return angle[a] < angle[b]; });
  return {detail::cut_blocks(order, m), PartitionMethod::AngleSweep};
}

namespace detail {

// Moves nodes from the largest to the smallest cluster until sizes differ by at most one.
// Each move picks the node of the large cluster that is cheapest to reassign.
inline void rebalance(std::vector<std::size_t>& label, std::size_t m, const std::vector<NodeCoord>& pts,
                      const std::vector<NodeCoord>& centers) {
  std::vector<std::size_t> size(m, 0);
  for (auto l : label) ++size[l];
  while (true) {
    const auto big = static_cast<std::size_t>(std::max_element(size.begin(), size.end()) - size.begin());
    const auto small = static_cast<std::size_t>(std::min_element(size.begin(), size.end()) - size.begin());
    if (size[big] - size[small] <= 1) break;
    std::size_t pick = pts.size();
    double pick_cost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (label[i] != big) continue;
      const double cost = sq_dist(pts[i], centers[small]) - sq_dist(pts[i], centers[big]);
      if (cost < pick_cost) {
        pick_cost = cost;
        pick = i;
      }
    }
    label[pick] = small;
    --size[big];
    ++size[small];
  }
}

inline Partition from_labels(std::span<const std::size_t> label, std::size_t m, PartitionMethod method) {
  Partition p{std::vector<std::vector<NodeIndex>>(m), method};
  for (std::size_t i = 0; i < label.size(); ++i) p.subsets[label[i]].push_back(i);
  return p;
}

}  // namespace detail

/// Lloyd iterations from farthest-point seeding, then rebalanced to sizes within one.
inline Partition partition_kmeans_like(const Instance& inst, std::size_t m, std::uint64_t seed,
                                       std::size_t max_iter = 100) {
  const std::size_t n = inst.dimension();
  detail::check_counts(n, m);
  const auto& pts = inst.nodes();

  std::mt19937_64 rng(seed);
  std::vector<NodeCoord> centers;
  centers.reserve(m);
  centers.push_back(pts[static_cast<std::size_t>(rng() % n)]);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (centers.size() < m) {
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], detail::sq_dist(pts[i], centers.back()));
      if (nearest[i] > far_d) {
        far_d = nearest[i];
        far = i;
      }
    }
    centers.push_back(pts[far]);
  }

  std::vector<std::size_t> label(n, 0);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    bool changed = iter == 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < m; ++k) {
        const double dk = detail::sq_dist(pts[i], centers[k]);
        if (dk < best_d) {
          best_d = dk;
          best = k;
        }
      }
      if (label[i] != best) {
        label[i] = best;
        changed = true;
      }
    }
    std::vector<NodeCoord> sum(m, NodeCoord{0.0, 0.0});
    std::vector<std::size_t> count(m, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[label[i]].x += pts[i].x;
      sum[label[i]].y += pts[i].y;
      ++count[label[i]];
    }
    for (std::size_t k = 0; k < m; ++k) {
      if (count[k] > 0) centers[k] = {sum[k].x / count[k], sum[k].y / count[k]};
    }
    if (!changed) break;
  }
  detail::rebalance(label, m, pts, centers);
  return detail::from_labels(label, m, PartitionMethod::KMeansLike);
}

/// Assigns every node to its nearest depot node, then rebalances. Depot k always stays in subset k.
inline Partition partition_depots(const Instance& inst, std::span<const NodeIndex> depots) {
  const std::size_t n = inst.dimension();
  const std::size_t m = depots.size();
  detail::check_counts(n, m);
  std::vector<bool> is_depot(n, false);
  for (NodeIndex dpt : depots) {
    if (dpt >= n || is_depot[dpt]) throw DomainError("partition: depot indices must be distinct node ids");
    is_depot[dpt] = true;
  }
  const auto& pts = inst.nodes();
  std::vector<NodeCoord> centers;
  for (NodeIndex dpt : depots) centers.push_back(pts[dpt]);

  std::vector<std::size_t> label(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
      const double dk = distance(inst.metric(), pts[i], centers[k]);
      if (dk < best_d) {
        best_d = dk;
        label[i] = k;
      }
    }
  }
  for (std::size_t k = 0; k < m; ++k) label[depots[k]] = k;

  std::vector<std::size_t> size(m, 0);
  for (auto l : label) ++size[l];
  while (true) {
    const auto big = static_cast<std::size_t>(std::max_element(size.begin(), size.end()) - size.begin());
    const auto small = static_cast<std::size_t>(std::min_element(size.begin(), size.end()) - size.begin());
    if (size[big] - size[small] <= 1) break;
    std::size_t pick = n;
    double pick_cost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (label[i] != big || is_depot[i]) continue;
      const double cost = distance(inst.metric(), pts[i], centers[small]) -
                          distance(inst.metric(), pts[i], centers[big]);
      if (cost < pick_cost) {
        pick_cost = cost;
        pick = i;
      }
    }
    label[pick] = small;
    --size[big];
    ++size[small];
  }
  return detail::from_labels(label, m, PartitionMethod::KMeansLike);
}

inline Partition make_partition(const Instance& inst, std::size_t m, PartitionMethod method,
                                std::uint64_t seed) {
  switch (method) {
    case PartitionMethod::AngleSweep: return partition_angle(inst, m);
    case PartitionMethod::KMeansLike: return partition_kmeans_like(inst, m, seed);
    case PartitionMethod::ContiguousBlocks: return partition_blocks(inst, m);
  }
  return partition_angle(inst, m);
}

/// True when the subsets are pairwise disjoint and cover 0..n-1.
inline bool is_valid_partition(const Partition& p, std::size_t n) {
  std::vector<int> hits(n, 0);
  for (const auto& s : p.subsets) {
    for (NodeIndex v : s) {
      if (v >= n || hits[v]++ > 0) return false;
    }
  }
  return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

}  // namespace sine
