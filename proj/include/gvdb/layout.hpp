#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "gvdb/error.hpp"
#include "gvdb/geometry.hpp"
#include "gvdb/graph.hpp"

namespace gvdb {

using PositionMap = std::unordered_map<NodeId, Point>;

enum class LayoutKind { force_directed, circular, grid };

inline const char* to_string(LayoutKind k) {
  switch (k) {
    case LayoutKind::force_directed: return "force";
    case LayoutKind::circular: return "circular";
    case LayoutKind::grid: return "grid";
  }
  return "?";
}

inline LayoutKind parse_layout_kind(const std::string& s) {
  if (s == "force" || s == "force_directed") return LayoutKind::force_directed;
  if (s == "circular") return LayoutKind::circular;
  if (s == "grid") return LayoutKind::grid;
  throw ConfigError("unknown layout '" + s + "'");
}

struct LayoutAlgorithm {
  LayoutKind kind = LayoutKind::force_directed;
  int iterations = 300;
  double ideal_edge_length = 60.0;
  double margin = 20.0;
};

/// Partition-local coordinates of one sub-graph.
struct LocalLayout {
  PositionMap positions;
  /// Tight bounding box of `positions` padded by the layout margin.
  Rect bbox;

  void translate(const Point& d) {
    for (auto& [id, p] : positions) p = p + d;
    bbox = bbox.translated(d);
  }
};

namespace detail {

inline double unit_random(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Connected components (ignoring direction), each listed in node order and
/// ordered by their first node.
inline std::vector<std::vector<std::uint32_t>> components(const Graph& g) {
  const auto n = static_cast<std::uint32_t>(g.node_count());
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    auto [s, t] = g.endpoints(e);
    auto a = find(s), b = find(t);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::int64_t> slot(n, -1);
  for (std::uint32_t v = 0; v < n; ++v) {
    const auto r = find(v);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::int64_t>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(slot[r])].push_back(v);
  }
  return out;
}

/// Fruchterman-Reingold on one connected component. `members` are dense
/// indices of `g`; `edges` are pairs of local indices. Repulsion is exact
/// for small components and limited to a radius of 2k (grid variant)
/// otherwise. Temperature falls linearly from diagonal / 10 to 0.1.
inline std::vector<Point> fruchterman_reingold(
    std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
    const LayoutAlgorithm& alg, std::uint64_t seed) {
  std::vector<Point> pos(n);
  if (n == 1) return pos;
  const double k = alg.ideal_edge_length;
  const double side = std::sqrt(static_cast<double>(n)) * k;
  std::mt19937_64 rng(seed);
  for (auto& p : pos) {
    p.x = (unit_random(rng) - 0.5) * side;
    p.y = (unit_random(rng) - 0.5) * side;
  }
  const double t0 = std::max(side * std::numbers::sqrt2 / 10.0, 0.1);
  const double t_end = 0.1;
  const int iters = std::max(alg.iterations, 1);
  const bool exact = n <= 200;
  const double cutoff = 2.0 * k;
  const double k2 = k * k;

  std::vector<Point> disp(n);
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> cells;
  auto cell_key = [](std::int64_t cx, std::int64_t cy) {
    return (cx << 32) ^ (cy & 0xffffffff);
  };
  auto repel = [&](std::uint32_t i, std::uint32_t j) {
    Point d = pos[i] - pos[j];
    double dist = std::hypot(d.x, d.y);
    if (dist < 1e-9) {
      // Coincident nodes: push apart along a fixed direction.
      d = {i < j ? -1e-3 : 1e-3, 0.0};
      dist = 1e-3;
    }
    if (!exact && dist > cutoff) return;
    const double f = k2 / dist;
    disp[i].x += d.x / dist * f;
    disp[i].y += d.y / dist * f;
  };

  for (int it = 0; it < iters; ++it) {
    std::fill(disp.begin(), disp.end(), Point{});
    if (exact) {
      for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) {
          if (i != j) repel(i, j);
        }
      }
    } else {
      cells.clear();
      std::vector<std::pair<std::int64_t, std::int64_t>> cell_of(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        const auto cx = static_cast<std::int64_t>(std::floor(pos[i].x / cutoff));
        const auto cy = static_cast<std::int64_t>(std::floor(pos[i].y / cutoff));
        cell_of[i] = {cx, cy};
        cells[cell_key(cx, cy)].push_back(i);
      }
      for (std::uint32_t i = 0; i < n; ++i) {
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
          for (std::int64_t dy = -1; dy <= 1; ++dy) {
            auto found = cells.find(cell_key(cell_of[i].first + dx, cell_of[i].second + dy));
            if (found == cells.end()) continue;
            for (auto j : found->second) {
              if (j != i) repel(i, j);
            }
          }
        }
      }
    }
    for (auto [u, v] : edges) {
      if (u == v) continue;
      const Point d = pos[u] - pos[v];
      const double dist = std::hypot(d.x, d.y);
      if (dist < 1e-12) continue;
      const double f = dist * dist / k;
      disp[u].x -= d.x / dist * f;
      disp[u].y -= d.y / dist * f;
      disp[v].x += d.x / dist * f;
      disp[v].y += d.y / dist * f;
    }
    const double t = iters == 1 ? t_end : t0 + (t_end - t0) * it / (iters - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double len = std::hypot(disp[i].x, disp[i].y);
      if (len < 1e-12 || !std::isfinite(len)) continue;
      const double step = std::min(len, t);
      pos[i].x += disp[i].x / len * step;
      pos[i].y += disp[i].y / len * step;
    }
  }
  return pos;
}

inline Rect tight_box(const std::vector<Point>& pts) {
  Rect r;
  for (const auto& p : pts) r.expand(p);
  return r;
}

}  // namespace detail

/// Lays out one partition's sub-graph (crossing edges already removed).
/// Force-directed layouts handle each connected component separately and
/// pack them left to right in shelves. Deterministic for a given seed.
inline LocalLayout layout_partition(const Graph& sub, const LayoutAlgorithm& alg,
                                    std::uint64_t seed) {
  if (sub.empty()) throw ConfigError("cannot lay out an empty sub-graph");
  if (alg.iterations < 1) throw ConfigError("iterations must be >= 1");
  if (!(alg.ideal_edge_length > 0)) throw ConfigError("edge length must be positive");

  const std::size_t n = sub.node_count();
  const double L = alg.ideal_edge_length;
  std::vector<Point> pos(n);

  switch (alg.kind) {
    case LayoutKind::circular: {
      if (n > 1) {
        const double radius = L * static_cast<double>(n) / (2.0 * std::numbers::pi);
        for (std::size_t i = 0; i < n; ++i) {
          const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / n;
          pos[i] = {radius * std::cos(a), radius * std::sin(a)};
        }
      }
      break;
    }
    case LayoutKind::grid: {
      const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
      for (std::size_t i = 0; i < n; ++i) {
        pos[i] = {static_cast<double>(i % cols) * L, static_cast<double>(i / cols) * L};
      }
      break;
    }
    case LayoutKind::force_directed: {
      auto comps = detail::components(sub);
      std::vector<std::uint32_t> local(n);
      std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> comp_edges(comps.size());
      std::vector<std::uint32_t> comp_of(n);
      for (std::size_t c = 0; c < comps.size(); ++c) {
        for (std::size_t i = 0; i < comps[c].size(); ++i) {
          local[comps[c][i]] = static_cast<std::uint32_t>(i);
          comp_of[comps[c][i]] = static_cast<std::uint32_t>(c);
        }
      }
      for (std::size_t e = 0; e < sub.edge_count(); ++e) {
        auto [s, t] = sub.endpoints(e);
        comp_edges[comp_of[s]].emplace_back(local[s], local[t]);
      }
      std::vector<std::vector<Point>> placed(comps.size());
      double total_area = 0.0;
      double widest = 0.0;
      for (std::size_t c = 0; c < comps.size(); ++c) {
        placed[c] = detail::fruchterman_reingold(comps[c].size(), comp_edges[c], alg,
                                                 detail::mix_seed(seed, c));
        const Rect box = detail::tight_box(placed[c]);
        total_area += (box.width() + L) * (box.height() + L);
        widest = std::max(widest, box.width());
      }
      // Shelf packing, left to right, starting at the origin.
      const double row_limit = std::max(widest, std::sqrt(total_area));
      double cursor_x = 0.0, cursor_y = 0.0, row_height = 0.0;
      for (std::size_t c = 0; c < comps.size(); ++c) {
        const Rect box = detail::tight_box(placed[c]);
        if (cursor_x > 0.0 && cursor_x + box.width() > row_limit) {
          cursor_x = 0.0;
          cursor_y += row_height + L;
          row_height = 0.0;
        }
        const Point shift{cursor_x - box.min_x, cursor_y - box.min_y};
        for (std::size_t i = 0; i < comps[c].size(); ++i) {
          pos[comps[c][i]] = placed[c][i] + shift;
        }
        cursor_x += box.width() + L;
        row_height = std::max(row_height, box.height());
      }
      break;
    }
  }

  LocalLayout out;
  out.positions.reserve(n);
  Rect box;
  for (std::size_t i = 0; i < n; ++i) {
    out.positions.emplace(sub.node(i).id, pos[i]);
    box.expand(pos[i]);
  }
  out.bbox = box.padded(alg.margin);
  return out;
}

}  // namespace gvdb
