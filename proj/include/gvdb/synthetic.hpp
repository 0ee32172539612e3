#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "gvdb/graph.hpp"

namespace gvdb {

/// Square lattice with `edge_count` edges: horizontal and vertical links of
/// an s x s grid (s as large as fits), topped up with random diagonals.
/// Node labels are "node <id>", edge labels alternate between "links" and
/// "cites". Its layout fills the plane at roughly uniform density.
inline Graph synthetic_lattice(std::size_t edge_count, std::uint64_t seed = 1) {
  const auto side = static_cast<std::size_t>(
      std::floor((1.0 + std::sqrt(1.0 + 2.0 * static_cast<double>(edge_count))) / 2.0));
  const std::size_t s = std::max<std::size_t>(side, 2);
  Graph g(true);
  g.reserve(s * s, edge_count);
  for (std::size_t i = 0; i < s * s; ++i) g.add_node(i, "node " + std::to_string(i));
  std::size_t added = 0;
  auto link = [&](std::size_t a, std::size_t b) {
    g.add_edge(a, b, added % 2 == 0 ? "links" : "cites");
    ++added;
  };
  for (std::size_t r = 0; r < s && added < edge_count; ++r) {
    for (std::size_t c = 0; c < s && added < edge_count; ++c) {
      if (c + 1 < s) link(r * s + c, r * s + c + 1);
      if (r + 1 < s && added < edge_count) link(r * s + c, (r + 1) * s + c);
    }
  }
  std::mt19937_64 rng(seed);
  std::set<std::pair<std::size_t, std::size_t>> used;
  while (added < edge_count) {
    const std::size_t r = rng() % (s - 1);
    const std::size_t c = rng() % (s - 1);
    if (!used.emplace(r, c).second) continue;
    link(r * s + c, (r + 1) * s + c + 1);
  }
  return g;
}

}  // namespace gvdb
