#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "sine/stats.hpp"

using namespace sine;

TEST(CellStats, SampleStandardDeviation) {
  const auto s = cell_stats({2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0});
  EXPECT_DOUBLE_EQ(s.mean, 5.0);
  EXPECT_NEAR(s.std, std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_EQ(cell_stats({3.0}).std, 0.0);
}

TEST(CellStats, RecomputationFromRawRuns) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(100.0, 15.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> xs(2 + trial % 20);
    for (auto& x : xs) x = g(rng);
    const auto s = cell_stats(xs);
    // Two-pass recomputation in long double.
    long double sum = 0;
    for (double x : xs) sum += x;
    const long double mean = sum / xs.size();
    long double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    EXPECT_NEAR(s.mean, static_cast<double>(mean), 1e-12 * std::fabs(s.mean));
    EXPECT_NEAR(s.std, static_cast<double>(std::sqrt(ss / (xs.size() - 1))), 1e-12 * std::max(1.0, s.std));
    EXPECT_GE(s.mean, *std::min_element(xs.begin(), xs.end()));
    EXPECT_LE(s.mean, *std::max_element(xs.begin(), xs.end()));
  }
}

TEST(AverageRanks, Ties) {
  const std::vector<double> v{3.0, 1.0, 3.0, 2.0};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{3.5, 1.0, 3.5, 2.0}));
}

TEST(Wilcoxon, IdenticalSamplesAreEqual) {
  const std::vector<double> a{1, 2, 3, 4, 5, 6};
  const auto r = wilcoxon_signed_rank(a, a);
  EXPECT_EQ(r.verdict, Verdict::Equal);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_EQ(r.n_used, 0u);
}

TEST(Wilcoxon, TwentyDominatedPairs) {
  std::vector<double> a, b;
  for (int i = 0; i < 20; ++i) {
    a.push_back(100.0 + i);
    b.push_back(100.0 + i + 0.5 * (i + 1));
  }
  const auto r = wilcoxon_signed_rank(a, b);
  EXPECT_EQ(r.w_plus, 0.0);
  EXPECT_EQ(r.w_minus, 210.0);
  EXPECT_TRUE(r.exact);
  EXPECT_DOUBLE_EQ(r.p_value, 2.0 / std::ldexp(1.0, 20));
  EXPECT_EQ(r.verdict, Verdict::Better);
  EXPECT_EQ(wilcoxon_signed_rank(b, a).verdict, Verdict::Worse);
}

TEST(Wilcoxon, TooFewPairs) {
  const std::vector<double> a{1, 2, 3, 4};
  EXPECT_THROW(wilcoxon_signed_rank(a, a), DomainError);
  const std::vector<double> b{1, 2, 3, 4, 5};
  EXPECT_THROW(wilcoxon_signed_rank(a, b), DomainError);
}

TEST(Wilcoxon, ExactMatchesEnumerationUpToTen) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> small(-4, 4);  // coarse values force ties and zeros
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 5 + trial % 6;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = trial % 2 ? small(rng) : g(rng);
      b[i] = trial % 2 ? small(rng) : g(rng) + 0.3;
    }
    const auto r = wilcoxon_signed_rank(a, b);
    if (r.n_used == 0) continue;
    std::vector<double> mag;
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] != b[i]) mag.push_back(std::fabs(a[i] - b[i]));
    }
    const auto ranks = average_ranks(mag);
    EXPECT_NEAR(r.p_value, oracle::wilcoxon_enumeration_p(ranks, r.w_plus), 1e-12);
    EXPECT_DOUBLE_EQ(r.w_plus + r.w_minus, ranks.size() * (ranks.size() + 1) / 2.0);
  }
}

TEST(Wilcoxon, NormalApproximationAboveTheExactLimit) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> a(40), b(40);
  for (std::size_t i = 0; i < 40; ++i) {
    a[i] = g(rng);
    b[i] = a[i] + 1.0 + 0.1 * g(rng);
  }
  const auto r = wilcoxon_signed_rank(a, b);
  EXPECT_FALSE(r.exact);
  EXPECT_LT(r.p_value, 1e-6);
  EXPECT_EQ(r.verdict, Verdict::Better);
  // Near-null sample: p should be large.
  for (std::size_t i = 0; i < 40; ++i) b[i] = a[i] + (i % 2 ? 1.0 : -1.0) * (1.0 + i * 0.01);
  EXPECT_GT(wilcoxon_signed_rank(a, b).p_value, 0.5);
}

TEST(Friedman, AlwaysBest) {
  MetricTable t;
  t.algorithms = {"a", "b", "c"};
  for (int i = 0; i < 10; ++i) {
    t.instances.push_back("i" + std::to_string(i));
    t.values.push_back({1.0, 2.0 + i, 3.0 + 2 * i});
  }
  const auto r = friedman_mean_ranks(t);
  EXPECT_EQ(r.mean_rank[0], 1.0);
  EXPECT_EQ(r.mean_rank[2], 3.0);
}

TEST(Friedman, TiesShareAverageRank) {
  MetricTable t;
  t.algorithms = {"a", "b"};
  t.instances = {"x", "y"};
  t.values = {{5.0, 5.0}, {7.0, 7.0}};
  const auto r = friedman_mean_ranks(t);
  EXPECT_EQ(r.mean_rank, (std::vector<double>{1.5, 1.5}));
}

TEST(Friedman, MissingCellsExcludeTheInstance) {
  MetricTable t;
  t.algorithms = {"a", "b"};
  t.instances = {"x", "y", "z"};
  t.values = {{1.0, 2.0}, {std::nullopt, 1.0}, {2.0, 1.0}};
  const auto r = friedman_mean_ranks(t);
  EXPECT_EQ(r.excluded, (std::vector<std::string>{"y"}));
  EXPECT_EQ(r.mean_rank, (std::vector<double>{1.5, 1.5}));
  t.algorithms = {"a"};
  EXPECT_THROW(friedman_mean_ranks(t), DomainError);
}

TEST(Friedman, RankRowsSumToTriangularNumber) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> v(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t algs = 2 + trial % 6;
    MetricTable t;
    for (std::size_t a = 0; a < algs; ++a) t.algorithms.push_back("a" + std::to_string(a));
    for (int i = 0; i < 5; ++i) {
      t.instances.push_back("i" + std::to_string(i));
      std::vector<std::optional<double>> row;
      for (std::size_t a = 0; a < algs; ++a) row.push_back(static_cast<double>(v(rng)));
      t.values.push_back(row);
    }
    const auto r = friedman_mean_ranks(t);
    for (const auto& row : r.ranks) {
      EXPECT_DOUBLE_EQ(std::accumulate(row.begin(), row.end(), 0.0), algs * (algs + 1) / 2.0);
    }
    for (double m : r.mean_rank) {
      EXPECT_GE(m, 1.0);
      EXPECT_LE(m, static_cast<double>(algs));
    }
  }
}
