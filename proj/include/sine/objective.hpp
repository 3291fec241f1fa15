#pragma once

// Tour-set quality: total and worst robot length, the lambda-scalarized objective,
// and edge overlap between robot tours.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "sine/error.hpp"
#include "sine/tour.hpp"

namespace sine {

struct Objectives {
  std::vector<double> per_robot;
  double total = 0.0;
  double max_single = 0.0;
  double lambda = 0.5;
  double j_value = 0.0;
  std::size_t overlap_total = 0;
  double mu = 0.0;
  double j_prime = 0.0;
};

namespace detail {

inline void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in [0, 1]");
}

inline double sum_of(std::span<const double> xs) { return std::accumulate(xs.begin(), xs.end(), 0.0); }

inline double max_of(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("objective needs at least one robot length");
  return *std::max_element(xs.begin(), xs.end());
}

}  // namespace detail

/// lambda * sum(L) + (1 - lambda) * max(L).
inline double scalarized_objective(std::span<const double> lengths, double lambda) {
  detail::check_lambda(lambda);
  const double mx = detail::max_of(lengths);
  return lambda * detail::sum_of(lengths) + (1.0 - lambda) * mx;
}

/// dJ/dlambda at fixed lengths, sum(L) - max(L).
inline double lambda_sensitivity(std::span<const double> lengths) {
  const double mx = detail::max_of(lengths);
  return detail::sum_of(lengths) - mx;
}

/// Number of unordered edges two closed tours share.
inline std::size_t edge_overlap(const Tour& a, const Tour& b) {
  const auto ea = tour_edges(a.order);
  const auto eb = tour_edges(b.order);
  std::size_t shared = 0;
  auto i = ea.begin();
  auto j = eb.begin();
  while (i != ea.end() && j != eb.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++shared;
      ++i;
      ++j;
    }
  }
  return shared;
}

/// Sum of edge_overlap over all robot pairs k < l.
inline std::size_t total_overlap(std::span<const Tour> tours) {
  std::size_t total = 0;
  for (std::size_t k = 0; k < tours.size(); ++k) {
    for (std::size_t l = k + 1; l < tours.size(); ++l) total += edge_overlap(tours[k], tours[l]);
  }
  return total;
}

inline double penalized_objective(std::span<const double> lengths, double lambda, std::size_t overlap_total,
                                  double mu) {
  if (!(mu >= 0.0)) throw DomainError("overlap penalty mu must be >= 0");
  return scalarized_objective(lengths, lambda) + mu * static_cast<double>(overlap_total);
}

inline Objectives evaluate(std::span<const Tour> tours, double lambda, double mu) {
  Objectives o;
  o.per_robot.reserve(tours.size());
  for (const auto& t : tours) o.per_robot.push_back(t.length);
  o.total = detail::sum_of(o.per_robot);
  o.max_single = detail::max_of(o.per_robot);
  o.lambda = lambda;
  o.j_value = scalarized_objective(o.per_robot, lambda);
  o.mu = mu;
  o.overlap_total = total_overlap(tours);
  o.j_prime = penalized_objective(o.per_robot, lambda, o.overlap_total, mu);
  return o;
}

}  // namespace sine
