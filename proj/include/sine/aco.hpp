#pragma once

// Ant colony machinery with a structural prior: pheromone field, backbone bias,
// roulette-wheel tour construction and the backbone-weighted deposit rule.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "sine/error.hpp"
#include "sine/instance.hpp"
#include "sine/tour.hpp"

namespace sine {

struct AcoParams {
  double alpha = 1.0;    // pheromone exponent
  double beta = 2.0;     // visibility exponent
  double gamma = 1.0;    // structural bias exponent
  double rho = 0.1;      // evaporation rate
  double q_scale = 1.0;  // deposit scale Q
  double kappa = 1.0;    // extra deposit share on backbone edges
  double tau0 = 1.0;
  std::size_t n_ants = 50;
  std::size_t max_iter = 1000;

  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(alpha)) throw ConfigError("alpha must be > 0");
    if (!positive(beta)) throw ConfigError("beta must be > 0");
    if (!positive(gamma)) throw ConfigError("gamma must be > 0");
    if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in (0, 1]");
    if (!positive(q_scale)) throw ConfigError("q must be > 0");
    if (!(std::isfinite(kappa) && kappa >= 0.0)) throw ConfigError("kappa must be >= 0");
    if (!positive(tau0)) throw ConfigError("tau0 must be > 0");
    if (n_ants == 0) throw ConfigError("colony size must be positive");
    if (max_iter == 0) throw ConfigError("iteration count must be positive");
  }
};

/// Symmetric per-edge trail intensities. The diagonal is unused.
class PheromoneField {
 public:
  PheromoneField() = default;
  PheromoneField(std::size_t dim, double tau0) : dim_(dim), tau0_(tau0), tau_(dim * dim, tau0) {}

  std::size_t dim() const noexcept { return dim_; }
  double tau0() const noexcept { return tau0_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return tau_[i * dim_ + j]; }

  void set(std::size_t i, std::size_t j, double v) noexcept {
    tau_[i * dim_ + j] = v;
    tau_[j * dim_ + i] = v;
  }
  void add(std::size_t i, std::size_t j, double v) noexcept {
    tau_[i * dim_ + j] += v;
    if (i != j) tau_[j * dim_ + i] += v;
  }
  void scale(double factor) noexcept {
    for (auto& t : tau_) t *= factor;
  }

 private:
  std::size_t dim_ = 0;
  double tau0_ = 1.0;
  std::vector<double> tau_;
};

inline PheromoneField init_pheromone(std::size_t dim, double tau0) {
  if (!(tau0 > 0.0) || !std::isfinite(tau0)) throw DomainError("initial pheromone must be > 0");
  return PheromoneField(dim, tau0);
}

/// Dense membership table for backbone edges.
class BackboneMask {
 public:
  BackboneMask() = default;
  BackboneMask(std::size_t dim, std::span<const Edge> edges) : dim_(dim), bits_(dim * dim, 0) {
    for (const auto& e : edges) {
      bits_[e.u * dim_ + e.v] = 1;
      bits_[e.v * dim_ + e.u] = 1;
    }
  }

  std::size_t dim() const noexcept { return dim_; }
  bool contains(std::size_t i, std::size_t j) const noexcept { return bits_[i * dim_ + j] != 0; }

 private:
  std::size_t dim_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// psi(i, j) = omega on backbone edges, 1 elsewhere.
struct StructuralBias {
  double omega = 1.0;
  BackboneMask backbone;

  StructuralBias() = default;
  StructuralBias(double omega_, BackboneMask mask) : omega(omega_), backbone(std::move(mask)) {
    if (!(omega >= 1.0) || !std::isfinite(omega)) throw DomainError("backbone bias omega must be >= 1");
  }

  double psi(std::size_t i, std::size_t j) const noexcept { return backbone.contains(i, j) ? omega : 1.0; }
};

/// eta^beta * psi^gamma; fixed for a run. Throws on coincident points.
inline double static_attractiveness(double dist, double psi, const AcoParams& p) {
  if (!(dist > 0.0)) throw DegenerateGeometry("zero distance between distinct nodes; visibility is undefined");
  return std::pow(1.0 / dist, p.beta) * std::pow(psi, p.gamma);
}

inline double edge_weight(double tau, double static_part, const AcoParams& p) {
  const double t = p.alpha == 1.0 ? tau : std::pow(tau, p.alpha);
  return t * static_part;
}

/// Normalized tau^alpha * eta^beta * psi^gamma over `candidates`, in candidate order.
inline std::vector<double> transition_probabilities(NodeIndex i, std::span<const NodeIndex> candidates,
                                                    const PheromoneField& tau, const DistanceMatrix& d,
                                                    const StructuralBias& bias, const AcoParams& p) {
  if (candidates.empty()) throw DomainError("transition_probabilities: no candidates");
  std::vector<double> w;
  w.reserve(candidates.size());
  double total = 0.0;
  for (NodeIndex j : candidates) {
    if (j == i) throw DomainError("transition_probabilities: current node among candidates");
    const double wj = edge_weight(tau(i, j), static_attractiveness(d(i, j), bias.psi(i, j), p), p);
    w.push_back(wj);
    total += wj;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
    return w;
  }
  for (auto& x : w) x /= total;
  return w;
}

/// Precomputed eta^beta * psi^gamma for every ordered pair.
class StaticAttractiveness {
 public:
  StaticAttractiveness() = default;
  StaticAttractiveness(const DistanceMatrix& d, const StructuralBias& bias, const AcoParams& p)
      : dim_(d.dim()), v_(dim_ * dim_, 0.0) {
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = i + 1; j < dim_; ++j) {
        const double a = static_attractiveness(d(i, j), bias.psi(i, j), p);
        v_[i * dim_ + j] = a;
        v_[j * dim_ + i] = a;
      }
    }
  }
  double operator()(std::size_t i, std::size_t j) const noexcept { return v_[i * dim_ + j]; }
  std::size_t dim() const noexcept { return dim_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> v_;
};

/// Snapshot of full transition weights for one iteration, filled only inside subsets.
class ChoiceWeights {
 public:
  void rebuild(const PheromoneField& tau, const StaticAttractiveness& heur,
               std::span<const std::vector<NodeIndex>> subsets, const AcoParams& p) {
    dim_ = tau.dim();
    w_.resize(dim_ * dim_);
    for (const auto& s : subsets) {
      for (NodeIndex i : s) {
        for (NodeIndex j : s) {
          if (i != j) w_[i * dim_ + j] = edge_weight(tau(i, j), heur(i, j), p);
        }
      }
    }
  }
  double operator()(std::size_t i, std::size_t j) const noexcept { return w_[i * dim_ + j]; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> w_;
};

// Counter-based stream derivation so each ant's draws are independent of scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t iteration, std::uint64_t subset,
                                 std::uint64_t ant) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ iteration);
  h = splitmix64(h ^ subset);
  return splitmix64(h ^ ant);
}

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Roulette wheel over `weights`: one uniform draw, cumulative-sum inversion; the last entry
/// absorbs rounding residue. All-zero weights fall back to a uniform pick.
inline std::size_t roulette_select(std::span<const double> weights, double total, Rng& rng) {
  const double u = uniform01(rng);
  if (!(total > 0.0) || !std::isfinite(total)) {
    return std::min(weights.size() - 1, static_cast<std::size_t>(u * static_cast<double>(weights.size())));
  }
  const double target = u * total;
  double cum = 0.0;
  for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
    cum += weights[k];
    if (target < cum) return k;
  }
  return weights.size() - 1;
}

/// Builds one closed tour over `subset` starting at `start`.
inline Tour construct_tour(std::span<const NodeIndex> subset, NodeIndex start, const ChoiceWeights& w,
                           const DistanceMatrix& d, Rng& rng) {
  if (subset.empty()) throw DomainError("construct_tour: empty subset");
  std::vector<NodeIndex> remaining;
  remaining.reserve(subset.size());
  bool found = false;
  for (NodeIndex v : subset) {
    if (v == start) {
      found = true;
    } else {
      remaining.push_back(v);
    }
  }
  if (!found) throw DomainError("construct_tour: start node not in subset");

  std::vector<NodeIndex> order;
  order.reserve(subset.size());
  order.push_back(start);
  std::vector<double> weights(remaining.size());
  NodeIndex cur = start;
  while (!remaining.empty()) {
    const std::size_t k = remaining.size();
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      weights[c] = w(cur, remaining[c]);
      total += weights[c];
    }
    const std::size_t pick = roulette_select(std::span(weights.data(), k), total, rng);
    cur = remaining[pick];
    order.push_back(cur);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return make_tour(std::move(order), d);
}

/// Convenience form that snapshots the weights for this subset first.
inline Tour construct_tour(std::span<const NodeIndex> subset, NodeIndex start, const PheromoneField& tau,
                           const DistanceMatrix& d, const StructuralBias& bias, const AcoParams& p, Rng& rng) {
  const StaticAttractiveness heur(d, bias, p);
  ChoiceWeights w;
  const std::vector<std::vector<NodeIndex>> one{std::vector<NodeIndex>(subset.begin(), subset.end())};
  w.rebuild(tau, heur, one, p);
  return construct_tour(subset, start, w, d, rng);
}

/// Deposit on `edge` from `tour`: (Q/L)(1 + kappa [edge in backbone]) when the tour uses it, else 0.
inline double deposit_amount(NodeIndex u, NodeIndex v, const Tour& tour, const BackboneMask& backbone,
                             const AcoParams& p) {
  if (tour.order.size() < 2 || !(tour.length > 0.0)) return 0.0;
  const auto key = edge_key(u, v);
  bool on_tour = false;
  for (std::size_t i = 0; i < tour.order.size() && !on_tour; ++i) {
    on_tour = edge_key(tour.order[i], tour.order[(i + 1) % tour.order.size()]) == key;
  }
  if (!on_tour) return 0.0;
  const double indicator = backbone.contains(u, v) ? 1.0 : 0.0;
  return (p.q_scale / tour.length) * (1.0 + p.kappa * indicator);
}

/// Adds every tour's deposits to `buffer` (no evaporation).
inline void accumulate_deposits(PheromoneField& buffer, std::span<const Tour> tours, const BackboneMask& backbone,
                                const AcoParams& p) {
  for (const auto& t : tours) {
    if (t.order.size() < 2 || !(t.length > 0.0)) continue;
    const double base = p.q_scale / t.length;
    for (const auto& [u, v] : tour_edges(t.order)) {
      const double indicator = backbone.contains(u, v) ? 1.0 : 0.0;
      buffer.add(u, v, base * (1.0 + p.kappa * indicator));
    }
  }
}

/// tau <- (1 - rho) tau + sum of deposits.
inline void update_pheromones(PheromoneField& tau, std::span<const Tour> tours, const BackboneMask& backbone,
                              const AcoParams& p) {
  tau.scale(1.0 - p.rho);
  accumulate_deposits(tau, tours, backbone, p);
}

/// Runs fn(0..count-1) on up to `workers` threads. fn must only write its own slot.
inline void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto body = [&] {
    try {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next = count;
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(body);
    body();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace sine
