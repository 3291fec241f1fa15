#pragma once

// End-to-end multi-robot solve: backbone, partition, seeding, colony iterations,
// pheromone update and incumbent tracking. Classic ACO is the same pipeline with
// the structural prior switched off by parameter.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sine/aco.hpp"
#include "sine/backbone.hpp"
#include "sine/error.hpp"
#include "sine/instance.hpp"
#include "sine/objective.hpp"
#include "sine/partition.hpp"
#include "sine/tour.hpp"

namespace sine {

enum class Mode { Sine, ClassicAco };

inline std::string_view to_string(Mode m) { return m == Mode::Sine ? "sine" : "aco"; }

struct SolverConfig {
  AcoParams aco;
  double omega = 2.0;
  double lambda = 0.5;
  double mu = 0.0;
  PartitionMethod partition = PartitionMethod::AngleSweep;
  bool repartition_each_iter = false;
  bool seed_with_christofides = true;
  MatchingMethod matching = MatchingMethod::Greedy;
  SeedMethod seed_method = SeedMethod::Christofides;
  bool per_subset_backbone = false;  // recompute an MST inside each subset instead of restricting the global one
  std::size_t stagnation_window = 0;  // 0 = run all iterations
  std::uint64_t master_seed = 1;
  Mode mode = Mode::Sine;
  std::vector<NodeIndex> depots;  // optional fixed start node per robot

  /// Classic mode pins omega = 1, kappa = 0 and disables seeding.
  SolverConfig effective() const {
    SolverConfig c = *this;
    if (c.mode == Mode::ClassicAco) {
      c.omega = 1.0;
      c.aco.kappa = 0.0;
      c.seed_with_christofides = false;
    }
    return c;
  }

  void validate() const {
    aco.validate();
    if (!(omega >= 1.0) || !std::isfinite(omega)) throw ConfigError("omega must be >= 1");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw ConfigError("mu must be >= 0");
  }
};

struct SolveReport {
  std::vector<Tour> tours;
  Objectives objectives;
  std::vector<double> convergence;  // incumbent J after each iteration
  std::size_t iterations_run = 0;
  double wall_time = 0.0;  // seconds
  std::uint64_t seed = 0;
  SolverConfig config;  // effective configuration
  std::string instance_name;
};

/// Lowest-J tour collection seen so far plus its trace.
struct Incumbent {
  std::vector<Tour> tours;
  double j = std::numeric_limits<double>::infinity();
  std::vector<double> trace;

  bool empty() const noexcept { return tours.empty(); }
};

inline double collection_j(std::span<const Tour> tours, double lambda) {
  std::vector<double> lengths;
  lengths.reserve(tours.size());
  for (const auto& t : tours) lengths.push_back(t.length);
  return scalarized_objective(lengths, lambda);
}

/// Replaces the incumbent only on strict improvement. Returns true when replaced.
inline bool incumbent_update(Incumbent& inc, std::span<const Tour> candidate, double lambda,
                             bool record_trace = true) {
  const double j = collection_j(candidate, lambda);
  const bool better = inc.empty() || j < inc.j;
  if (better) {
    inc.tours.assign(candidate.begin(), candidate.end());
    inc.j = j;
  }
  if (record_trace) inc.trace.push_back(inc.j);
  return better;
}

struct SolveOptions {
  std::size_t workers = 1;
};

namespace detail {

inline std::vector<Edge> backbone_edges(const DistanceMatrix& d, const Partition& part, const SolverConfig& cfg) {
  if (!cfg.per_subset_backbone) {
    std::vector<NodeIndex> all(d.dim());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return kruskal_mst(d, all).mst_edges;
  }
  std::vector<Edge> edges;
  for (const auto& s : part.subsets) {
    const auto b = kruskal_mst(d, s);
    edges.insert(edges.end(), b.mst_edges.begin(), b.mst_edges.end());
  }
  return edges;
}

inline void rotate_to_front(std::vector<NodeIndex>& order, NodeIndex v) {
  const auto it = std::find(order.begin(), order.end(), v);
  if (it != order.end()) std::rotate(order.begin(), it, order.end());
}

inline Partition partition_for(const Instance& inst, std::size_t m, const SolverConfig& cfg, std::uint64_t salt) {
  if (!cfg.depots.empty()) {
    if (cfg.depots.size() != m) throw ConfigError("depot count must equal the robot count");
    return partition_depots(inst, cfg.depots);
  }
  return make_partition(inst, m, cfg.partition, splitmix64(cfg.master_seed ^ splitmix64(salt)));
}

}  // namespace detail

/// Runs the full pipeline with a precomputed distance matrix.
inline SolveReport solve(const Instance& inst, const DistanceMatrix& d, std::size_t m, const SolverConfig& requested,
                         const SolveOptions& opts = {}) {
  const auto t_start = std::chrono::steady_clock::now();
  const SolverConfig cfg = requested.effective();
  cfg.validate();
  const std::size_t n = inst.dimension();
  if (m < 1 || m > n) {
    throw DomainError("robot count " + std::to_string(m) + " must lie in [1, " + std::to_string(n) + "]");
  }
  if (d.dim() != n) throw DomainError("distance matrix does not match the instance");
  const AcoParams& p = cfg.aco;

  Partition part = detail::partition_for(inst, m, cfg, 0);
  const std::vector<Edge> backbone = detail::backbone_edges(d, part, cfg);
  const StructuralBias bias(cfg.omega, BackboneMask(n, backbone));
  const StaticAttractiveness heur(d, bias, p);
  PheromoneField tau = init_pheromone(n, p.tau0);

  Incumbent inc;
  if (cfg.seed_with_christofides) {
    std::vector<Tour> seeds;
    seeds.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
      auto s = build_seed(d, part.subsets[k], cfg.matching, cfg.seed_method);
      if (!cfg.depots.empty()) detail::rotate_to_front(s.tour.order, cfg.depots[k]);
      seeds.push_back(make_tour(std::move(s.tour.order), d));
    }
    // One-shot bonus (Q / L0)(1 + kappa) on every seed edge.
    for (const auto& t : seeds) {
      if (t.order.size() < 2) continue;
      const double bonus = (p.q_scale / t.length) * (1.0 + p.kappa);
      for (const auto& [u, v] : tour_edges(t.order)) tau.add(u, v, bonus);
    }
    incumbent_update(inc, seeds, cfg.lambda, false);
  }

  ChoiceWeights weights;
  std::vector<Tour> colony;
  std::vector<Tour> best(m);
  std::size_t since_improvement = 0;
  std::size_t iter = 0;
  for (; iter < p.max_iter; ++iter) {
    if (cfg.repartition_each_iter && iter > 0) part = detail::partition_for(inst, m, cfg, iter);
    weights.rebuild(tau, heur, part.subsets, p);

    const std::size_t ants = p.n_ants;
    colony.assign(m * ants, Tour{});
    parallel_for(m * ants, opts.workers, [&](std::size_t task) {
      const std::size_t k = task / ants;
      const std::size_t a = task % ants;
      const auto& subset = part.subsets[k];
      Rng rng(derive_seed(cfg.master_seed, iter, k, a));
      const NodeIndex start = cfg.depots.empty() ? subset[static_cast<std::size_t>(rng() % subset.size())]
                                                 : cfg.depots[k];
      colony[task] = construct_tour(subset, start, weights, d, rng);
    });

    for (std::size_t k = 0; k < m; ++k) {
      std::size_t pick = k * ants;
      for (std::size_t a = 1; a < ants; ++a) {
        if (colony[k * ants + a].length < colony[pick].length) pick = k * ants + a;
      }
      best[k] = std::move(colony[pick]);
    }

    const bool improved = incumbent_update(inc, best, cfg.lambda);
    update_pheromones(tau, best, bias.backbone, p);

    since_improvement = improved ? 0 : since_improvement + 1;
    if (cfg.stagnation_window > 0 && since_improvement >= cfg.stagnation_window) {
      ++iter;
      break;
    }
  }

  SolveReport r;
  r.tours = inc.tours;
  r.objectives = evaluate(r.tours, cfg.lambda, cfg.mu);
  r.convergence = std::move(inc.trace);
  r.iterations_run = iter;
  r.seed = cfg.master_seed;
  r.config = cfg;
  r.instance_name = inst.name();
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return r;
}

inline SolveReport solve(const Instance& inst, std::size_t m, const SolverConfig& cfg, const SolveOptions& opts = {}) {
  return solve(inst, build_distance_matrix(inst), m, cfg, opts);
}

}  // namespace sine
