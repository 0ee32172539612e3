#pragma once

#include <random>

#include "gvdb/abstraction.hpp"
#include "gvdb/store.hpp"
#include "oracles.hpp"

namespace support {

/// Single-layer store over `g` with node positions drawn uniformly from
/// [0, extent]^2.
inline gvdb::Store scattered_store(const gvdb::Graph& g, std::mt19937_64& rng, double extent = 1000.0) {
  gvdb::Layer layer{0, g, {}, std::nullopt};
  for (const auto& n : g.nodes()) {
    layer.layout[n.id] = {oracle::uniform(rng, 0, extent), oracle::uniform(rng, 0, extent)};
  }
  const std::vector<gvdb::Layer> layers{std::move(layer)};
  return gvdb::build_store(layers, {"test", "degree", gvdb::kStoreFormatVersion, {}});
}

inline gvdb::Rect random_window(std::mt19937_64& rng, double extent, double max_side) {
  const double x = oracle::uniform(rng, -0.1 * extent, extent);
  const double y = oracle::uniform(rng, -0.1 * extent, extent);
  return {x, y, x + oracle::uniform(rng, 0, max_side), y + oracle::uniform(rng, 0, max_side)};
}

/// Rows meeting `r` by linear scan with the independent segment test,
/// ordered like window_query.
inline std::vector<gvdb::TripleRow> scan_window(const gvdb::LayerTable& t, const gvdb::Rect& r) {
  std::vector<std::pair<std::tuple<gvdb::NodeId, std::optional<gvdb::NodeId>, std::size_t>, std::size_t>> keyed;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    if (oracle::segment_meets_rect(row.geometry.from, row.geometry.to, r)) {
      keyed.push_back({{row.node1_id, row.node2_id, i}, i});
    }
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<gvdb::TripleRow> out;
  for (const auto& [key, i] : keyed) out.push_back(t.rows[i]);
  return out;
}

}  // namespace support
