#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "sine/report_io.hpp"
#include "sine/solver.hpp"

using namespace sine;

namespace {

SolverConfig quick_config(std::uint64_t seed) {
  SolverConfig c;
  c.aco.n_ants = 10;
  c.aco.max_iter = 30;
  c.master_seed = seed;
  return c;
}

bool same_tours(const SolveReport& a, const SolveReport& b) {
  if (a.tours.size() != b.tours.size()) return false;
  for (std::size_t k = 0; k < a.tours.size(); ++k) {
    if (a.tours[k].order != b.tours[k].order || a.tours[k].length != b.tours[k].length) return false;
  }
  return a.convergence == b.convergence;
}

}  // namespace

TEST(Incumbent, StrictImprovementRule) {
  Incumbent inc;
  const std::vector<Tour> a{{{0, 1}, 10.0}};
  const std::vector<Tour> same{{{1, 0}, 10.0}};
  const std::vector<Tour> better{{{0, 1}, 8.0}};
  EXPECT_TRUE(incumbent_update(inc, a, 0.5));
  EXPECT_FALSE(incumbent_update(inc, same, 0.5));
  EXPECT_EQ(inc.tours[0].order, (std::vector<NodeIndex>{0, 1}));
  EXPECT_TRUE(incumbent_update(inc, better, 0.5));
  EXPECT_EQ(inc.trace, (std::vector<double>{10.0, 10.0, 8.0}));
}

TEST(Incumbent, DecreasingSequenceIsTheTrace) {
  Incumbent inc;
  std::vector<double> expected;
  for (double len : {9.0, 7.0, 4.0, 2.0}) {
    incumbent_update(inc, std::vector<Tour>{{{0, 1}, len}}, 1.0);
    expected.push_back(len);
  }
  EXPECT_EQ(inc.trace, expected);
}

TEST(Solve, SingleRobotNearOptimumOnEightNodes) {
  std::mt19937_64 rng(31);
  const auto inst = oracle::random_planar(8, rng);
  const auto d = build_distance_matrix(inst);
  std::vector<NodeIndex> nodes(8);
  std::iota(nodes.begin(), nodes.end(), NodeIndex{0});
  const double opt = oracle::exhaustive_tour_optimum(d, nodes);
  SolverConfig c;
  c.aco.max_iter = 200;
  c.master_seed = 3;
  const auto r = solve(inst, d, 1, c);
  EXPECT_LE(r.objectives.total, opt * 1.02);
}

TEST(Solve, OneNodePerRobot) {
  std::mt19937_64 rng(1);
  const auto inst = oracle::random_planar(6, rng);
  const auto r = solve(inst, 6, quick_config(1));
  ASSERT_EQ(r.tours.size(), 6u);
  EXPECT_EQ(r.objectives.total, 0.0);
  EXPECT_EQ(r.objectives.max_single, 0.0);
}

TEST(Solve, ErrorsAreTyped) {
  std::mt19937_64 rng(2);
  const auto inst = oracle::random_planar(6, rng);
  EXPECT_THROW(solve(inst, 7, quick_config(1)), DomainError);
  auto c = quick_config(1);
  c.aco.rho = 2.0;
  EXPECT_THROW(solve(inst, 2, c), ConfigError);
  c = quick_config(1);
  c.lambda = 1.5;
  EXPECT_THROW(solve(inst, 2, c), ConfigError);
  c = quick_config(1);
  c.depots = {0};
  EXPECT_THROW(solve(inst, 2, c), ConfigError);
}

TEST(Solve, ReportInvariants) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = oracle::random_planar(15 + trial, rng);
    const auto d = build_distance_matrix(inst);
    const std::size_t m = 1 + trial % 4;
    auto c = quick_config(trial);
    c.partition = static_cast<PartitionMethod>(trial % 3);
    const auto r = solve(inst, d, m, c);
    ASSERT_EQ(r.tours.size(), m);
    std::vector<int> hits(inst.dimension(), 0);
    for (const auto& t : r.tours) {
      for (auto v : t.order) ++hits[v];
      EXPECT_NEAR(t.length, tour_length(t.order, d), 1e-9 * std::max(1.0, t.length));
    }
    EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    EXPECT_EQ(r.convergence.size(), r.iterations_run);
    for (std::size_t i = 1; i < r.convergence.size(); ++i) EXPECT_LE(r.convergence[i], r.convergence[i - 1]);
    const auto again = evaluate(r.tours, c.lambda, c.mu);
    EXPECT_NEAR(again.j_value, r.objectives.j_value, 1e-9 * r.objectives.j_value);
    EXPECT_EQ(r.objectives.overlap_total, 0u);
  }
}

TEST(Solve, DeterministicAndScheduleIndependent) {
  std::mt19937_64 rng(4);
  const auto inst = oracle::random_planar(30, rng);
  const auto c = quick_config(17);
  const auto a = solve(inst, 3, c, {1});
  const auto b = solve(inst, 3, c, {1});
  const auto many = solve(inst, 3, c, {4});
  EXPECT_TRUE(same_tours(a, b));
  EXPECT_TRUE(same_tours(a, many));
  EXPECT_EQ(to_json(a, false).dump(), to_json(many, false).dump());
  const auto other = solve(inst, 3, quick_config(18));
  EXPECT_FALSE(same_tours(a, other));
}

TEST(Solve, ClassicModeIsTheDegenerateConfiguration) {
  std::mt19937_64 rng(5);
  const auto inst = oracle::random_planar(25, rng);
  auto classic = quick_config(9);
  classic.mode = Mode::ClassicAco;
  auto manual = quick_config(9);
  manual.omega = 1.0;
  manual.aco.kappa = 0.0;
  manual.seed_with_christofides = false;
  const auto a = solve(inst, 2, classic);
  const auto b = solve(inst, 2, manual);
  EXPECT_TRUE(same_tours(a, b));
  EXPECT_EQ(a.config.omega, 1.0);
  EXPECT_EQ(a.config.aco.kappa, 0.0);
  EXPECT_FALSE(a.config.seed_with_christofides);
}

TEST(Solve, SeedingMakesTheFirstTraceEntryNoWorseThanTheSeed) {
  std::mt19937_64 rng(6);
  const auto inst = oracle::random_planar(40, rng);
  const auto d = build_distance_matrix(inst);
  auto c = quick_config(2);
  c.aco.max_iter = 1;
  const auto r = solve(inst, d, 2, c);
  const auto part = partition_angle(inst, 2);
  std::vector<Tour> seeds;
  for (const auto& s : part.subsets) seeds.push_back(make_tour(build_seed(d, s).tour.order, d));
  EXPECT_LE(r.convergence.front(), collection_j(seeds, c.lambda) + 1e-9);
}

TEST(Solve, DepotsStartTheirTours) {
  std::mt19937_64 rng(7);
  const auto inst = oracle::random_planar(20, rng);
  auto c = quick_config(4);
  c.depots = {3, 11};
  const auto r = solve(inst, 2, c);
  EXPECT_EQ(r.tours[0].order.front(), 3u);
  EXPECT_EQ(r.tours[1].order.front(), 11u);
}

TEST(Solve, StagnationStopsEarly) {
  std::mt19937_64 rng(8);
  const auto inst = oracle::random_planar(6, rng);
  auto c = quick_config(1);
  c.aco.max_iter = 500;
  c.stagnation_window = 5;
  const auto r = solve(inst, 1, c);
  EXPECT_LT(r.iterations_run, 500u);
  EXPECT_EQ(r.convergence.size(), r.iterations_run);
}

TEST(Solve, RepartitionAndPerSubsetBackboneStillCover) {
  std::mt19937_64 rng(9);
  const auto inst = oracle::random_planar(24, rng);
  auto c = quick_config(5);
  c.partition = PartitionMethod::KMeansLike;
  c.repartition_each_iter = true;
  c.per_subset_backbone = true;
  const auto r = solve(inst, 3, c);
  std::size_t count = 0;
  for (const auto& t : r.tours) count += t.order.size();
  EXPECT_EQ(count, 24u);
  EXPECT_EQ(r.objectives.overlap_total, 0u);
}

TEST(ReportJson, RoundTrip) {
  std::mt19937_64 rng(10);
  const auto inst = oracle::random_planar(12, rng, 100.0, "rt");
  const auto r = solve(inst, 2, quick_config(3));
  const auto j = to_json(r);
  const auto back = report_from_json(j);
  EXPECT_EQ(back.instance_name, "rt");
  EXPECT_TRUE(same_tours(r, back));
  EXPECT_EQ(to_json(back).dump(), j.dump());
  EXPECT_THROW(report_from_json(json::parse("{\"tours\": 3}")), ParseError);
}
