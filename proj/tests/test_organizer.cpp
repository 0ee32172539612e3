#include <gtest/gtest.h>

#include <random>

#include "gvdb/organizer.hpp"
#include "oracles.hpp"

using namespace gvdb;
using oracle::local_layout;

namespace {

CrossingEdge link(std::uint32_t pa, NodeId a, std::uint32_t pb, NodeId b) {
  return {{pa, a}, {pb, b}, "x"};
}

void expect_disjoint(const GlobalLayout& g, double gap) {
  for (std::size_t a = 0; a < g.partition_boxes.size(); ++a) {
    for (std::size_t b = a + 1; b < g.partition_boxes.size(); ++b) {
      EXPECT_FALSE(g.partition_boxes[a].padded(gap - 1e-6).interiors_intersect(g.partition_boxes[b]))
          << a << " vs " << b;
    }
  }
}

}  // namespace

TEST(Organizer, CountCrossingEdges) {
  Graph g;
  for (NodeId i = 0; i < 6; ++i) g.add_node(i, "");
  PartitionAssignment a;
  a.k = 3;
  a.part = {0, 0, 1, 1, 2, 2};
  for (int i = 0; i < 5; ++i) g.add_edge(i % 2, 2 + i % 2, "ab");
  g.add_edge(0, 4, "ac");
  g.add_edge(5, 1, "ca");
  g.add_edge(0, 1, "inside");
  EXPECT_EQ(count_crossing_edges(g, a), (std::vector<std::size_t>{7, 5, 2}));
  const auto list = crossing_edges(g, a);
  ASSERT_EQ(list.size(), 7u);
  EXPECT_EQ(list.back().source.partition, 2u);
  EXPECT_EQ(list.back().target.node, 1u);
}

TEST(Organizer, PlacementCostIsEuclidean) {
  GlobalLayout placed;
  placed.partition_boxes = {Rect{-20, -20, 20, 20}};
  placed.placed = {true};
  placed.offsets = {Point{}};
  placed.positions[1] = {0, 0};
  const LocalLayout popped = local_layout({{2, {0, 0}}});
  const std::vector<CrossingEdge> cross{link(1, 2, 0, 1)};
  // The candidate puts node 2 at (30, 40).
  EXPECT_DOUBLE_EQ(placement_cost({10, 20, 50, 60}, 1, popped, placed, cross), 50.0);
  EXPECT_THROW(placement_cost({0, 0, 40, 40}, 1, popped, placed, cross), ConfigError);
}

TEST(Organizer, PlacementCostIgnoresUnplacedPartners) {
  GlobalLayout placed;
  placed.partition_boxes = {Rect{-20, -20, 20, 20}, Rect{}};
  placed.placed = {true, false};
  placed.positions[1] = {0, 0};
  const LocalLayout popped = local_layout({{2, {0, 0}}});
  const std::vector<CrossingEdge> cross{link(2, 2, 0, 1), link(2, 2, 1, 7), link(2, 2, 1, 8)};
  EXPECT_DOUBLE_EQ(placement_cost({10, 20, 50, 60}, 2, popped, placed, cross), 50.0);
}

TEST(Organizer, TwoPartitionsSitOneGapApart) {
  const std::vector<LocalLayout> layouts{local_layout({{1, {0, 0}}}), local_layout({{2, {0, 0}}})};
  const std::vector<CrossingEdge> cross{link(0, 1, 1, 2)};
  const auto g = arrange(layouts, cross, 40.0);
  EXPECT_EQ(g.order, (std::vector<std::uint32_t>{0, 1}));
  EXPECT_DOUBLE_EQ(g.positions.at(1).x, 0.0);
  EXPECT_DOUBLE_EQ(g.positions.at(1).y, 0.0);
  const double greedy = total_crossing_length(g, cross);
  EXPECT_DOUBLE_EQ(greedy, 80.0);

  // Brute force over a fine grid of offsets keeping the gap.
  double best = std::numeric_limits<double>::infinity();
  for (double x = -200; x <= 200; x += 2.5) {
    for (double y = -200; y <= 200; y += 2.5) {
      const Rect box = layouts[1].bbox.translated({x, y});
      if (box.interiors_intersect(g.partition_boxes[0].padded(40.0))) continue;
      best = std::min(best, std::hypot(x, y));
    }
  }
  EXPECT_NEAR(greedy, best, 1e-9);
  expect_disjoint(g, 40.0);
}

TEST(Organizer, MostCrossedPartitionGoesFirstAtCentre) {
  // Partition 2 has nine crossing edges, the others fewer.
  std::vector<LocalLayout> layouts;
  for (NodeId p = 0; p < 4; ++p) {
    layouts.push_back(local_layout({{10 * p, {0, 0}}, {10 * p + 1, {100, 50}}}));
  }
  std::vector<CrossingEdge> cross;
  for (int i = 0; i < 4; ++i) cross.push_back(link(2, 20, 0, 0));
  for (int i = 0; i < 3; ++i) cross.push_back(link(2, 21, 1, 10));
  for (int i = 0; i < 2; ++i) cross.push_back(link(3, 30, 2, 20));
  const auto counts = [&] {
    std::vector<std::size_t> c(4, 0);
    for (const auto& e : cross) ++c[e.source.partition], ++c[e.target.partition];
    return c;
  }();
  ASSERT_EQ(counts[2], 9u);
  const auto g = arrange(layouts, cross);
  EXPECT_EQ(g.order.front(), 2u);
  const Point c = g.partition_boxes[2].center();
  EXPECT_NEAR(c.x, 0.0, 1e-12);
  EXPECT_NEAR(c.y, 0.0, 1e-12);
  EXPECT_EQ(g.order, (std::vector<std::uint32_t>{2, 0, 1, 3}));
}

TEST(Organizer, OrderFollowsSharedCrossings) {
  std::vector<LocalLayout> layouts{local_layout({{1, {0, 0}}}), local_layout({{2, {0, 0}}}),
                                   local_layout({{3, {0, 0}}})};
  std::vector<CrossingEdge> cross;
  for (int i = 0; i < 5; ++i) cross.push_back(link(0, 1, 1, 2));
  for (int i = 0; i < 2; ++i) cross.push_back(link(0, 1, 2, 3));
  const auto g = arrange(layouts, cross);
  EXPECT_EQ(g.order, (std::vector<std::uint32_t>{0, 1, 2}));
}

TEST(Organizer, PartitionsOnlyTranslate) {
  std::mt19937_64 rng(1);
  std::vector<LocalLayout> layouts{local_layout({{1, {0, 0}}, {2, {30, 70}}}),
                                   local_layout({{3, {5, 5}}, {4, {-40, 10}}, {5, {0, 90}}})};
  const std::vector<CrossingEdge> cross{link(0, 1, 1, 4), link(0, 2, 1, 5)};
  const auto g = arrange(layouts, cross);
  for (std::uint32_t p = 0; p < 2; ++p) {
    for (const auto& [id, local] : layouts[p].positions) {
      EXPECT_DOUBLE_EQ(g.positions.at(id).x, local.x + g.offsets[p].x);
      EXPECT_DOUBLE_EQ(g.positions.at(id).y, local.y + g.offsets[p].y);
    }
  }
}

TEST(Organizer, DisjointBoxesProperty) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + rng() % 12;
    std::vector<LocalLayout> layouts;
    NodeId next = 0;
    for (std::size_t p = 0; p < k; ++p) {
      LocalLayout l;
      const std::size_t n = 1 + rng() % 5;
      Rect box;
      for (std::size_t i = 0; i < n; ++i) {
        const Point pt{oracle::uniform(rng, -200, 200), oracle::uniform(rng, -100, 300)};
        l.positions[next++] = pt;
        box.expand(pt);
      }
      l.bbox = box.padded(20);
      layouts.push_back(std::move(l));
    }
    std::vector<CrossingEdge> cross;
    const std::size_t m = rng() % 30;
    for (std::size_t e = 0; e < m && k > 1; ++e) {
      const auto a = static_cast<std::uint32_t>(rng() % k);
      auto b = static_cast<std::uint32_t>(rng() % k);
      if (a == b) b = (b + 1) % k;
      auto any_node = [&](std::uint32_t p) { return layouts[p].positions.begin()->first; };
      cross.push_back(link(a, any_node(a), b, any_node(b)));
    }
    const double gap = oracle::uniform(rng, 0, 80);
    const auto g = arrange(layouts, cross, gap);
    ASSERT_EQ(g.order.size(), k);
    expect_disjoint(g, gap);
    EXPECT_EQ(g.positions.size(), next);
  }
}

TEST(Organizer, GreedyBeatsRandomPlacement) {
  std::mt19937_64 rng(7);
  int wins = 0;
  const int instances = 20;
  for (int trial = 0; trial < instances; ++trial) {
    const std::size_t k = 6 + rng() % 6;
    std::vector<LocalLayout> layouts;
    for (std::size_t p = 0; p < k; ++p) {
      const double w = oracle::uniform(rng, 50, 300), h = oracle::uniform(rng, 50, 300);
      layouts.push_back(local_layout({{2 * p, {0, 0}}, {2 * p + 1, {w, h}}}));
    }
    std::vector<CrossingEdge> cross;
    for (std::size_t e = 0; e < 4 * k; ++e) {
      const auto a = static_cast<std::uint32_t>(rng() % k);
      const auto b = static_cast<std::uint32_t>((a + 1 + rng() % 2) % k);
      cross.push_back(link(a, 2 * a + rng() % 2, b, 2 * b + rng() % 2));
    }
    const double greedy = total_crossing_length(arrange(layouts, cross), cross);
    double random_sum = 0.0;
    for (int r = 0; r < 20; ++r) {
      random_sum += total_crossing_length(oracle::random_arrangement(layouts, 40.0, rng), cross);
    }
    wins += greedy < random_sum / 20 ? 1 : 0;
  }
  EXPECT_EQ(wins, instances);
}

TEST(Organizer, CandidateSlotsAreFree) {
  GlobalLayout placed;
  placed.partition_boxes = {Rect{0, 0, 100, 50}, Rect{150, 0, 200, 80}};
  placed.placed = {true, true};
  const auto slots = candidate_slots(60, 60, placed, 40);
  ASSERT_FALSE(slots.empty());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    EXPECT_DOUBLE_EQ(slots[i].width(), 60.0);
    for (const auto& b : placed.partition_boxes) EXPECT_FALSE(slots[i].interiors_intersect(b.padded(40)));
    if (i > 0) {
      EXPECT_TRUE(slots[i - 1].min_y < slots[i].min_y ||
                  (slots[i - 1].min_y == slots[i].min_y && slots[i - 1].min_x < slots[i].min_x));
    }
  }
}

TEST(Organizer, EmptyAndBadInput) {
  EXPECT_TRUE(arrange({}, {}).order.empty());
  const std::vector<LocalLayout> one{local_layout({{1, {0, 0}}})};
  const std::vector<CrossingEdge> bad{link(0, 1, 3, 9)};
  EXPECT_THROW(arrange(one, bad), ConfigError);
}
