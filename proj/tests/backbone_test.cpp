#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "sine/backbone.hpp"

using namespace sine;

namespace {

DistanceMatrix triangle() {
  DistanceMatrix d(3);
  d.set(0, 1, 3.0);
  d.set(0, 2, 4.0);
  d.set(1, 2, 5.0);
  return d;
}

std::vector<NodeIndex> iota_nodes(std::size_t n) {
  std::vector<NodeIndex> v(n);
  std::iota(v.begin(), v.end(), NodeIndex{0});
  return v;
}

Backbone tree_from_edges(std::size_t dim, const std::vector<Edge>& edges) {
  Backbone b;
  b.adjacency.assign(dim, {});
  for (const auto& e : edges) {
    b.mst_edges.push_back(e);
    b.total_cost += e.weight;
    b.adjacency[e.u].push_back(e.v);
    b.adjacency[e.v].push_back(e.u);
  }
  b.nodes = iota_nodes(dim);
  return b;
}

}  // namespace

TEST(Kruskal, TriangleDropsHeaviestEdge) {
  const auto b = kruskal_mst(triangle(), iota_nodes(3));
  ASSERT_EQ(b.mst_edges.size(), 2u);
  EXPECT_EQ(b.mst_edges[0], (Edge{0, 1, 3.0}));
  EXPECT_EQ(b.mst_edges[1], (Edge{0, 2, 4.0}));
  EXPECT_DOUBLE_EQ(b.total_cost, 7.0);
}

TEST(Kruskal, SingleNodeAndEmpty) {
  const std::vector<NodeIndex> one{1};
  const auto b = kruskal_mst(triangle(), one);
  EXPECT_TRUE(b.mst_edges.empty());
  EXPECT_EQ(b.total_cost, 0.0);
  EXPECT_THROW(kruskal_mst(triangle(), std::vector<NodeIndex>{}), DomainError);
}

TEST(Kruskal, MatchesPrimAndIsASpanningTree) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 7 + trial % 6;
    const auto d = build_distance_matrix(oracle::random_planar(n, rng));
    const auto nodes = iota_nodes(n);
    const auto b = kruskal_mst(d, nodes);
    EXPECT_NEAR(b.total_cost, oracle::prim_mst_cost(d, nodes), 1e-9);
    ASSERT_EQ(b.mst_edges.size(), n - 1);
    UnionFind uf(n);
    std::size_t components = n;
    for (const auto& e : b.mst_edges) {
      EXPECT_LT(e.u, e.v);
      if (uf.unite(e.u, e.v)) --components;
    }
    EXPECT_EQ(components, 1u);
  }
}

TEST(Kruskal, TiesAreDeterministic) {
  // Unit square: four sides of equal length, ties resolved by (u, v).
  const Instance sq("sq", {{0, 0}, {1, 0}, {1, 1}, {0, 1}}, Metric::Euclidean2D);
  const auto d = build_distance_matrix(sq);
  const auto b = kruskal_mst(d, iota_nodes(4));
  ASSERT_EQ(b.mst_edges.size(), 3u);
  EXPECT_EQ(b.mst_edges[0].u, 0u);
  EXPECT_EQ(b.mst_edges[0].v, 1u);
  EXPECT_EQ(b.mst_edges[1].u, 0u);
  EXPECT_EQ(b.mst_edges[1].v, 3u);
  EXPECT_EQ(b.mst_edges[2].u, 1u);
  EXPECT_EQ(b.mst_edges[2].v, 2u);
}

TEST(OddDegree, PathAndStar) {
  const auto path = tree_from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  EXPECT_EQ(odd_degree_vertices(path), (std::vector<NodeIndex>{0, 2}));
  const auto star = tree_from_edges(5, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}, {0, 4, 1.0}});
  EXPECT_EQ(odd_degree_vertices(star), (std::vector<NodeIndex>{1, 2, 3, 4}));
}

TEST(OddDegree, EvenCountOnRandomTrees) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = build_distance_matrix(oracle::random_planar(10, rng));
    EXPECT_EQ(odd_degree_vertices(kruskal_mst(d, iota_nodes(10))).size() % 2, 0u);
  }
}

TEST(Matching, ForcedPair) {
  const auto d = triangle();
  const std::vector<NodeIndex> u{0, 2};
  const auto m = greedy_min_matching(d, u);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0], (Edge{0, 2, 4.0}));
}

TEST(Matching, CollinearGreedyIsOptimal) {
  const Instance line("line", {{0, 0}, {1, 0}, {10, 0}, {11, 0}}, Metric::Euclidean2D);
  const auto d = build_distance_matrix(line);
  const auto m = greedy_min_matching(d, iota_nodes(4));
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].u, 0u);
  EXPECT_EQ(m[0].v, 1u);
  EXPECT_EQ(m[1].u, 2u);
  EXPECT_EQ(m[1].v, 3u);
  EXPECT_DOUBLE_EQ(edge_cost(m), 2.0);
}

TEST(Matching, OddSetIsRejected) {
  EXPECT_THROW(greedy_min_matching(triangle(), iota_nodes(3)), DomainError);
  EXPECT_THROW(exact_min_matching(triangle(), iota_nodes(3)), DomainError);
}

TEST(Matching, GreedyNeverBeatsBruteForceAndExactMatchesIt) {
  std::mt19937_64 rng(21);
  std::size_t enumerated = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto d = build_distance_matrix(oracle::random_planar(8, rng));
    const auto nodes = iota_nodes(8);
    const double brute = oracle::brute_force_matching_cost(d, nodes, &enumerated);
    EXPECT_EQ(enumerated, 105u);
    const auto greedy = greedy_min_matching(d, nodes);
    EXPECT_EQ(greedy.size(), 4u);
    EXPECT_GE(edge_cost(greedy), brute - 1e-9);
    EXPECT_NEAR(edge_cost(exact_min_matching(d, nodes)), brute, 1e-9);
  }
}

TEST(Matching, ExactLimit) {
  std::mt19937_64 rng(2);
  const auto d = build_distance_matrix(oracle::random_planar(14, rng));
  EXPECT_THROW(exact_min_matching(d, iota_nodes(14)), DomainError);
  EXPECT_NO_THROW(exact_min_matching(d, iota_nodes(12)));
}

TEST(EulerTour, TriangleMultigraph) {
  const auto mst = tree_from_edges(3, {{0, 1, 3.0}, {0, 2, 4.0}});
  const std::vector<Edge> matching{{1, 2, 5.0}};
  const auto walk = euler_tour(mst, matching, 0);
  ASSERT_EQ(walk.size(), 4u);
  EXPECT_EQ(walk.front(), 0u);
  EXPECT_EQ(walk.back(), 0u);
}

TEST(EulerTour, ParallelEdges) {
  const auto mst = tree_from_edges(2, {{0, 1, 1.0}});
  const std::vector<Edge> matching{{0, 1, 1.0}};
  EXPECT_EQ(euler_tour(mst, matching, 0), (std::vector<NodeIndex>{0, 1, 0}));
}

TEST(EulerTour, OddDegreeIsAnInvariantError) {
  const auto mst = tree_from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  EXPECT_THROW(euler_tour(mst, {}, 0), InvariantError);
}

TEST(EulerTour, UsesEveryMultigraphEdgeOnce) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = build_distance_matrix(oracle::random_planar(9, rng));
    const auto mst = kruskal_mst(d, iota_nodes(9));
    const auto matching = greedy_min_matching(d, odd_degree_vertices(mst));
    const auto walk = euler_tour(mst, matching, 0);
    std::map<std::pair<NodeIndex, NodeIndex>, int> expected;
    for (const auto& e : mst.mst_edges) ++expected[{e.u, e.v}];
    for (const auto& e : matching) ++expected[{e.u, e.v}];
    std::map<std::pair<NodeIndex, NodeIndex>, int> used;
    for (std::size_t i = 0; i + 1 < walk.size(); ++i) ++used[edge_key(walk[i], walk[i + 1])];
    EXPECT_EQ(used, expected);
    EXPECT_EQ(walk.front(), walk.back());
  }
}

TEST(Shortcut, KeepsFirstOccurrences) {
  const Instance inst("four", {{0, 0}, {1, 0}, {0, 1}, {5, 5}}, Metric::Euclidean2D);
  const auto d = build_distance_matrix(inst);
  const std::vector<NodeIndex> walk{0, 1, 0, 2, 0};
  const auto s = shortcut(walk, d);
  EXPECT_EQ(s.order, (std::vector<NodeIndex>{0, 1, 2}));
  EXPECT_DOUBLE_EQ(s.length, tour_length(s.order, d));
  const std::vector<NodeIndex> ham{3, 1, 2, 0, 3};
  EXPECT_EQ(shortcut(ham, d).order, (std::vector<NodeIndex>{3, 1, 2, 0}));
}

TEST(Shortcut, NeverLongerThanTheWalk) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = build_distance_matrix(oracle::random_planar(12, rng));
    const auto s = build_seed(d, iota_nodes(12));
    EXPECT_LE(s.tour.length, s.walk_length + 1e-9);
    EXPECT_EQ(s.tour.order.size(), 12u);
  }
}

TEST(Seed, BoundsAndDeterminism) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 8 + trial % 20;
    const auto d = build_distance_matrix(oracle::random_planar(n, rng));
    const auto a = build_seed(d, iota_nodes(n));
    const auto b = build_seed(d, iota_nodes(n));
    EXPECT_EQ(a.tour.order, b.tour.order);
    EXPECT_EQ(a.walk, b.walk);
    EXPECT_LE(a.mst.total_cost, a.tour.length + 1e-9);
    EXPECT_LE(a.tour.length, a.mst.total_cost + a.matching_cost + 1e-9);
  }
}

TEST(Seed, SubsetAndDfsVariant) {
  std::mt19937_64 rng(8);
  const auto d = build_distance_matrix(oracle::random_planar(20, rng));
  const std::vector<NodeIndex> subset{3, 5, 7, 11, 13, 17, 19};
  for (auto method : {SeedMethod::Christofides, SeedMethod::DfsPreorder}) {
    auto s = build_seed(d, subset, MatchingMethod::ExactSmall, method);
    auto sorted = s.tour.order;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, subset);
    EXPECT_GE(s.tour.length, s.mst.total_cost - 1e-9);
  }
  const std::vector<NodeIndex> single{4};
  const auto one = build_seed(d, single);
  EXPECT_EQ(one.tour.order, single);
  EXPECT_EQ(one.tour.length, 0.0);
}
