#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gvdb/error.hpp"
#include "gvdb/geometry.hpp"
#include "gvdb/graph.hpp"
#include "gvdb/layout.hpp"
#include "gvdb/partition.hpp"

namespace gvdb {

struct CrossingEnd {
  std::uint32_t partition = 0;
  NodeId node = 0;
};

/// Edge whose endpoints lie in different partitions.
struct CrossingEdge {
  CrossingEnd source;
  CrossingEnd target;
  std::string label;
};

/// Partitions placed on the shared plane. Only partitions flagged in
/// `placed` carry meaningful boxes and offsets.
struct GlobalLayout {
  PositionMap positions;
  std::vector<Rect> partition_boxes;
  /// Rigid translation applied to each partition's local coordinates.
  std::vector<Point> offsets;
  std::vector<bool> placed;
  /// Partitions in the order the greedy loop placed them.
  std::vector<std::uint32_t> order;

  Rect bounds() const {
    Rect r;
    for (std::size_t p = 0; p < partition_boxes.size(); ++p) {
      if (placed[p]) r.expand(partition_boxes[p]);
    }
    return r;
  }
};

inline constexpr double kDefaultPartitionGap = 40.0;

/// Crossing edges incident to each partition; an edge between p and q counts
/// once for each of them.
inline std::vector<std::size_t> count_crossing_edges(const Graph& g,
                                                     const PartitionAssignment& a) {
  if (a.part.size() != g.node_count()) throw ConfigError("assignment does not cover the graph");
  std::vector<std::size_t> counts(a.k, 0);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    auto [s, t] = g.endpoints(e);
    if (a.part[s] != a.part[t]) {
      ++counts[a.part[s]];
      ++counts[a.part[t]];
    }
  }
  return counts;
}

inline std::vector<CrossingEdge> crossing_edges(const Graph& g, const PartitionAssignment& a) {
  if (a.part.size() != g.node_count()) throw ConfigError("assignment does not cover the graph");
  std::vector<CrossingEdge> out;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    auto [s, t] = g.endpoints(e);
    if (a.part[s] == a.part[t]) continue;
    const Edge& edge = g.edge(e);
    out.push_back({{a.part[s], edge.source}, {a.part[t], edge.target}, edge.label});
  }
  return out;
}

/// Total crossing-edge length contributed by `popped` (index `partition`)
/// when its layout is moved into `candidate`, counting only edges towards
/// partitions already placed in `placed`.
inline double placement_cost(const Rect& candidate, std::uint32_t partition,
                             const LocalLayout& popped, const GlobalLayout& placed,
                             std::span<const CrossingEdge> crossings) {
  for (std::size_t p = 0; p < placed.partition_boxes.size(); ++p) {
    if (placed.placed[p] && candidate.interiors_intersect(placed.partition_boxes[p])) {
      throw ConfigError("candidate box overlaps partition " + std::to_string(p));
    }
  }
  const Point shift{candidate.min_x - popped.bbox.min_x, candidate.min_y - popped.bbox.min_y};
  double cost = 0.0;
  for (const CrossingEdge& e : crossings) {
    const CrossingEnd* mine = nullptr;
    const CrossingEnd* other = nullptr;
    if (e.source.partition == partition) {
      mine = &e.source;
      other = &e.target;
    } else if (e.target.partition == partition) {
      mine = &e.target;
      other = &e.source;
    } else {
      continue;
    }
    if (other->partition >= placed.placed.size() || !placed.placed[other->partition]) continue;
    const Point a = popped.positions.at(mine->node) + shift;
    const Point b = placed.positions.at(other->node);
    cost += distance(a, b);
  }
  return cost;
}

/// Candidate slots for a box of `size` around (and between) the placed
/// boxes. Slots sit on a lattice of pitch size + gap anchored one slot left
/// of / below the union of placed boxes, plus a column and a row flush
/// against its right and top sides. Slots closer than `gap` to a placed box
/// are dropped. Ordered by (y, x).
inline std::vector<Rect> candidate_slots(double width, double height, const GlobalLayout& placed,
                                         double gap) {
  const Rect u = placed.bounds();
  std::vector<double> xs, ys;
  auto axis = [gap](double lo, double hi, double extent, std::vector<double>& out) {
    const double step = std::max(extent + gap, 1.0);
    for (double v = lo - gap - extent; v <= hi; v += step) out.push_back(v);
    out.push_back(hi + gap);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  };
  axis(u.min_x, u.max_x, width, xs);
  axis(u.min_y, u.max_y, height, ys);

  std::vector<Rect> blocked;
  for (std::size_t p = 0; p < placed.partition_boxes.size(); ++p) {
    if (placed.placed[p]) blocked.push_back(placed.partition_boxes[p].padded(gap));
  }
  std::vector<Rect> slots;
  for (double y : ys) {
    for (double x : xs) {
      const Rect r{x, y, x + width, y + height};
      bool free = true;
      for (const Rect& b : blocked) {
        if (r.interiors_intersect(b)) {
          free = false;
          break;
        }
      }
      if (free) slots.push_back(r);
    }
  }
  return slots;
}

/// Greedy partition organizer. The partition with the most crossing edges
/// goes to the centre of the plane; the rest wait in a queue keyed by the
/// number of crossing edges they share with partitions already placed.
/// Each popped partition takes the free slot with the lowest total crossing
/// length (ties: lowest slot index), then the keys are updated. Partitions
/// only translate.
inline GlobalLayout arrange(std::span<const LocalLayout> layouts,
                            std::span<const CrossingEdge> crossings,
                            double gap = kDefaultPartitionGap) {
  GlobalLayout out;
  const auto k = static_cast<std::uint32_t>(layouts.size());
  if (k == 0) return out;
  out.partition_boxes.assign(k, Rect{});
  out.offsets.assign(k, Point{});
  out.placed.assign(k, false);

  std::vector<std::size_t> total(k, 0);
  std::vector<std::vector<std::uint32_t>> neighbours(k);  // multiplicity kept
  for (const CrossingEdge& e : crossings) {
    if (e.source.partition >= k || e.target.partition >= k) {
      throw ConfigError("crossing edge refers to an unknown partition");
    }
    if (e.source.partition == e.target.partition) continue;
    ++total[e.source.partition];
    ++total[e.target.partition];
    neighbours[e.source.partition].push_back(e.target.partition);
    neighbours[e.target.partition].push_back(e.source.partition);
  }

  // Crossing edges grouped by partition so each cost evaluation only scans
  // the popped partition's own edges.
  std::vector<std::vector<CrossingEdge>> incident(k);
  for (const CrossingEdge& e : crossings) {
    if (e.source.partition == e.target.partition) continue;
    incident[e.source.partition].push_back(e);
    incident[e.target.partition].push_back(e);
  }

  auto place = [&](std::uint32_t p, const Point& shift) {
    out.offsets[p] = shift;
    out.partition_boxes[p] = layouts[p].bbox.translated(shift);
    out.placed[p] = true;
    out.order.push_back(p);
    for (const auto& [id, pos] : layouts[p].positions) out.positions[id] = pos + shift;
  };

  std::uint32_t first = 0;
  for (std::uint32_t p = 1; p < k; ++p) {
    if (total[p] > total[first]) first = p;
  }
  const Point centre = layouts[first].bbox.center();
  place(first, {-centre.x, -centre.y});

  std::vector<std::size_t> key(k, 0);
  for (auto q : neighbours[first]) ++key[q];

  for (std::uint32_t step = 1; step < k; ++step) {
    std::optional<std::uint32_t> next;
    for (std::uint32_t p = 0; p < k; ++p) {
      if (out.placed[p]) continue;
      if (!next || key[p] > key[*next] || (key[p] == key[*next] && total[p] > total[*next])) {
        next = p;
      }
    }
    const std::uint32_t p = *next;
    const LocalLayout& popped = layouts[p];
    const auto slots = candidate_slots(popped.bbox.width(), popped.bbox.height(), out, gap);
    std::size_t best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const double c = placement_cost(slots[s], p, popped, out, incident[p]);
      if (c < best_cost) {
        best_cost = c;
        best = s;
      }
    }
    place(p, {slots[best].min_x - popped.bbox.min_x, slots[best].min_y - popped.bbox.min_y});
    for (auto q : neighbours[p]) ++key[q];
  }
  return out;
}

/// Sum of Euclidean lengths of all crossing edges under `layout`.
inline double total_crossing_length(const GlobalLayout& layout,
                                    std::span<const CrossingEdge> crossings) {
  double sum = 0.0;
  for (const CrossingEdge& e : crossings) {
    sum += distance(layout.positions.at(e.source.node), layout.positions.at(e.target.node));
  }
  return sum;
}

}  // namespace gvdb
