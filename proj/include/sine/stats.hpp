#pragma once

// Summary statistics and the nonparametric tests used to compare algorithms:
// paired Wilcoxon signed-rank and Friedman mean ranks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sine/error.hpp"

namespace sine {

struct CellStats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
  std::vector<double> runs;
};

inline CellStats cell_stats(std::vector<double> runs) {
  CellStats s;
  s.runs = std::move(runs);
  if (s.runs.empty()) return s;
  const double n = static_cast<double>(s.runs.size());
  s.mean = std::accumulate(s.runs.begin(), s.runs.end(), 0.0) / n;
  if (s.runs.size() > 1) {
    double ss = 0.0;
    for (double x : s.runs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

/// Average ranks (1-based) of `values`, ties sharing the mean of their positions.
inline std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

enum class Verdict { Better, Worse, Equal };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Better: return "better";
    case Verdict::Worse: return "worse";
    case Verdict::Equal: return "equal";
  }
  return "equal";
}

struct WilcoxonResult {
  double statistic = 0.0;  // min(W+, W-)
  double w_plus = 0.0;     // rank sum of positive a - b
  double w_minus = 0.0;
  std::size_t n_used = 0;  // pairs left after dropping zero differences
  double p_value = 1.0;
  bool exact = true;
  Verdict verdict = Verdict::Equal;  // for a against b; lower values are better
};

inline constexpr std::size_t kWilcoxonExactLimit = 25;
inline constexpr std::size_t kWilcoxonMinPairs = 5;
inline constexpr double kSignificance = 0.05;

/// Two-sided exact p-value of W+ given the (possibly tied) absolute-difference ranks.
/// Ranks are averages, so doubling them gives integers and a counting DP applies.
inline double wilcoxon_exact_p(std::span<const double> ranks, double w_plus) {
  std::vector<std::size_t> doubled;
  std::size_t total = 0;
  for (double r : ranks) {
    doubled.push_back(static_cast<std::size_t>(std::llround(2.0 * r)));
    total += doubled.back();
  }
  // count[s]: number of sign assignments whose doubled positive rank sum is s.
  std::vector<double> count(total + 1, 0.0);
  count[0] = 1.0;
  std::size_t reach = 0;
  for (std::size_t r : doubled) {
    for (std::size_t s = reach + 1; s-- > 0;) {
      if (count[s] != 0.0) count[s + r] += count[s];
    }
    reach += r;
  }
  const auto t = static_cast<std::size_t>(std::llround(2.0 * w_plus));
  double lower = 0.0;
  double upper = 0.0;
  for (std::size_t s = 0; s <= total; ++s) {
    if (s <= t) lower += count[s];
    if (s >= t) upper += count[s];
  }
  const double all = std::ldexp(1.0, static_cast<int>(ranks.size()));
  return std::min(1.0, 2.0 * std::min(lower, upper) / all);
}

/// Paired two-sided signed-rank test of a against b at the 0.05 level.
inline WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                           double alpha = kSignificance) {
  if (a.size() != b.size()) throw DomainError("wilcoxon: samples must be paired (equal lengths)");
  if (a.size() < kWilcoxonMinPairs) {
    throw DomainError("wilcoxon: need at least " + std::to_string(kWilcoxonMinPairs) + " pairs, got " +
                      std::to_string(a.size()));
  }
  std::vector<double> diff;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) diff.push_back(a[i] - b[i]);
  }
  WilcoxonResult res;
  res.n_used = diff.size();
  if (diff.empty()) return res;

  std::vector<double> mag(diff.size());
  for (std::size_t i = 0; i < diff.size(); ++i) mag[i] = std::fabs(diff[i]);
  const auto ranks = average_ranks(mag);
  for (std::size_t i = 0; i < diff.size(); ++i) (diff[i] > 0.0 ? res.w_plus : res.w_minus) += ranks[i];
  res.statistic = std::min(res.w_plus, res.w_minus);

  const std::size_t n = diff.size();
  if (n <= kWilcoxonExactLimit) {
    res.exact = true;
    res.p_value = wilcoxon_exact_p(ranks, res.w_plus);
  } else {
    res.exact = false;
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
    auto sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      var -= (t * t * t - t) / 48.0;
      i = j;
    }
    const double z = std::max(0.0, std::fabs(res.w_plus - mean) - 0.5) / std::sqrt(var);
    res.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  }
  if (res.p_value < alpha) res.verdict = res.w_plus < res.w_minus ? Verdict::Better : Verdict::Worse;
  return res;
}

/// values[instance][algorithm]; std::nullopt marks a missing cell.
struct MetricTable {
  std::vector<std::string> instances;
  std::vector<std::string> algorithms;
  std::vector<std::vector<std::optional<double>>> values;
};

struct RankTable {
  std::vector<std::string> algorithms;
  std::vector<double> mean_rank;
  std::vector<std::string> instances;          // instances that were ranked
  std::vector<std::vector<double>> ranks;      // ranks[instance][algorithm]
  std::vector<std::string> excluded;           // instances dropped for missing cells
};

/// Ranks algorithms within each instance (ascending, ties averaged) and averages across instances.
inline RankTable friedman_mean_ranks(const MetricTable& t) {
  if (t.algorithms.size() < 2) throw DomainError("friedman: need at least 2 algorithms");
  if (t.instances.size() < 2) throw DomainError("friedman: need at least 2 instances");
  if (t.values.size() != t.instances.size()) throw DomainError("friedman: value rows must match instances");

  RankTable r;
  r.algorithms = t.algorithms;
  r.mean_rank.assign(t.algorithms.size(), 0.0);
  for (std::size_t i = 0; i < t.instances.size(); ++i) {
    const auto& row = t.values[i];
    if (row.size() != t.algorithms.size() ||
        std::any_of(row.begin(), row.end(), [](const auto& v) { return !v.has_value(); })) {
      r.excluded.push_back(t.instances[i]);
      continue;
    }
    std::vector<double> vals;
    for (const auto& v : row) vals.push_back(*v);
    r.instances.push_back(t.instances[i]);
    r.ranks.push_back(average_ranks(vals));
  }
  if (r.ranks.empty()) throw DomainError("friedman: every instance has a missing cell");
  for (const auto& row : r.ranks) {
    for (std::size_t a = 0; a < row.size(); ++a) r.mean_rank[a] += row[a];
  }
  for (auto& m : r.mean_rank) m /= static_cast<double>(r.ranks.size());
  return r;
}

}  // namespace sine
