#include <gtest/gtest.h>

#include <random>
#include <set>

#include "gvdb/partition.hpp"
#include "gvdb/synthetic.hpp"
#include "oracles.hpp"

using namespace gvdb;

namespace {

Graph from_pairs(std::initializer_list<std::pair<NodeId, NodeId>> edges) {
  Graph g;
  for (auto [a, b] : edges) {
    g.add_node(a, "n" + std::to_string(a));
    g.add_node(b, "n" + std::to_string(b));
    g.add_edge(a, b, "e");
  }
  return g;
}

Graph two_triangles() {
  return from_pairs({{1, 2}, {2, 3}, {3, 1}, {4, 5}, {5, 6}, {6, 4}, {3, 4}});
}

void expect_valid(const Graph& g, const PartitionAssignment& a, const PartitionConfig& cfg) {
  ASSERT_EQ(a.part.size(), g.node_count());
  EXPECT_EQ(a.k, cfg.k);
  const auto cap = partition_capacity(g.node_count(), cfg);
  for (auto s : a.sizes()) {
    EXPECT_GE(s, 1u);
    EXPECT_LE(s, cap);
  }
  EXPECT_EQ(a.cut_edges, edge_cut(g, a));
}

}  // namespace

TEST(Partition, BridgeBetweenTriangles) {
  const Graph g = two_triangles();
  const PartitionConfig cfg{2, 1.0, 1};
  const auto a = partition(g, cfg);
  expect_valid(g, a, cfg);
  EXPECT_EQ(a.cut_edges, 1u);
  EXPECT_EQ(a.part[0], a.part[1]);
  EXPECT_EQ(a.part[1], a.part[2]);
  EXPECT_EQ(a.part[3], a.part[4]);
  EXPECT_NE(a.part[0], a.part[3]);
}

TEST(Partition, SinglePartitionHasNoCut) {
  const Graph g = two_triangles();
  const auto a = partition(g, {1, 1.1, 1});
  EXPECT_EQ(a.cut_edges, 0u);
  for (auto p : a.part) EXPECT_EQ(p, 0u);
}

TEST(Partition, PathSplitsInTheMiddle) {
  // Balanced splits of a-b-c-d: {ab|cd} cuts 1, {ac|bd} 3, {ad|bc} 2.
  const Graph g = from_pairs({{1, 2}, {2, 3}, {3, 4}});
  const auto a = partition(g, {2, 1.0, 3});
  EXPECT_EQ(a.cut_edges, 1u);
  EXPECT_EQ(a.part[0], a.part[1]);
  EXPECT_EQ(a.part[2], a.part[3]);
  EXPECT_NE(a.part[0], a.part[2]);
}

TEST(Partition, EdgeCutCountsByHand) {
  const Graph g = two_triangles();
  PartitionAssignment a;
  a.k = 2;
  a.part = {0, 0, 0, 1, 1, 1};
  EXPECT_EQ(edge_cut(g, a), 1u);
  a.part = {0, 1, 0, 1, 0, 1};
  // Only 3-1 and 6-4 stay inside a part.
  EXPECT_EQ(edge_cut(g, a), 5u);
  a.part = {0, 0, 0, 0, 0};
  EXPECT_THROW(edge_cut(g, a), ConfigError);
  a.part = {0, 0, 0, 0, 0, 2};
  EXPECT_THROW(edge_cut(g, a), ConfigError);
}

TEST(Partition, ConfigErrors) {
  const Graph g = two_triangles();
  EXPECT_THROW(partition(g, {7, 1.1, 1}), ConfigError);
  EXPECT_THROW(partition(g, {0, 1.1, 1}), ConfigError);
  EXPECT_THROW(partition(g, {2, 0.9, 1}), ConfigError);
  EXPECT_THROW(partition(Graph{}, {1, 1.1, 1}), ConfigError);
}

TEST(Partition, KEqualsNodeCount) {
  const Graph g = two_triangles();
  const auto a = partition(g, {6, 1.0, 1});
  std::set<std::uint32_t> parts(a.part.begin(), a.part.end());
  EXPECT_EQ(parts.size(), 6u);
  EXPECT_EQ(a.cut_edges, 7u);
}

TEST(Partition, DeterministicForSeed) {
  const Graph g = synthetic_lattice(3000, 5);
  const PartitionConfig cfg{6, 1.1, 42};
  const auto a = partition(g, cfg);
  const auto b = partition(g, cfg);
  EXPECT_EQ(a.part, b.part);
  EXPECT_EQ(a.cut_edges, b.cut_edges);
  expect_valid(g, a, cfg);
}

TEST(Partition, BalanceOnRandomGraphs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 200;
    const Graph g = oracle::random_graph(n, rng() % (3 * n), rng);
    const auto k = static_cast<std::uint32_t>(1 + rng() % std::min<std::size_t>(n, 12));
    const PartitionConfig cfg{k, 1.0 + 0.3 * oracle::uniform(rng, 0, 1), rng()};
    expect_valid(g, partition(g, cfg), cfg);
  }
}

TEST(Partition, LatticeCutIsSmall) {
  // A 100x100 grid split in four has a cut near 2 * 100 edges.
  const Graph g = synthetic_lattice(19800, 1);
  const auto a = partition(g, {4, 1.1, 1});
  EXPECT_LT(a.cut_edges, 400u);
}

TEST(Partition, NearOptimalOnSmallGraphs) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = oracle::random_graph(8, 8 + rng() % 10, rng, false);
    const PartitionConfig cfg{2 + static_cast<std::uint32_t>(rng() % 2), 1.1, 1};
    const auto best = oracle::brute_force_min_cut(g, cfg.k, partition_capacity(8, cfg));
    const auto got = partition(g, cfg);
    expect_valid(g, got, cfg);
    EXPECT_LE(got.cut_edges, 2 * best) << "trial " << trial;
  }
}

TEST(Partition, DefaultCount) {
  EXPECT_EQ(default_partition_count(synthetic_lattice(100, 1)), 1u);
  EXPECT_EQ(default_partition_count(synthetic_lattice(100'001, 1)), 3u);
}
