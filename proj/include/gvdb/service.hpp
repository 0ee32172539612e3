#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gvdb/error.hpp"
#include "gvdb/geometry.hpp"
#include "gvdb/store.hpp"

namespace gvdb {

/// Client viewport on the global plane.
struct Viewport {
  Point center;
  double width = 0.0;
  double height = 0.0;
  double zoom = 1.0;
};

/// Window sent to the server: the viewport shrunk (zoom > 1) or grown
/// (zoom < 1) around its centre.
inline Rect effective_window(const Viewport& v) {
  if (!(v.zoom > 0.0) || !std::isfinite(v.zoom)) throw ConfigError("zoom must be positive");
  if (!(v.width >= 0.0) || !(v.height >= 0.0)) throw ConfigError("viewport size must be non-negative");
  const double hw = v.width / (2.0 * v.zoom);
  const double hh = v.height / (2.0 * v.zoom);
  return {v.center.x - hw, v.center.y - hh, v.center.x + hw, v.center.y + hh};
}

/// Client-sized window centred on a node.
inline Rect focus_window(const Store& store, int layer, NodeId node, double width, double height) {
  const NodeRecord* n = store.layer(layer).find_node(node);
  if (!n) throw NotFoundError("node " + std::to_string(node) + " not in layer " + std::to_string(layer));
  return effective_window({n->position, width, height, 1.0});
}

inline constexpr std::size_t kDefaultChunkSize = 500;

inline nlohmann::json row_json(const TripleRow& row) {
  nlohmann::json j;
  j["node1_id"] = row.node1_id;
  j["node1_label"] = row.node1_label;
  j["geometry"] = {row.geometry.from.x, row.geometry.from.y, row.geometry.to.x, row.geometry.to.y};
  j["directed"] = row.geometry.directed;
  j["edge_label"] = row.edge_label;
  if (row.node2_id) {
    j["node2_id"] = *row.node2_id;
    j["node2_label"] = row.node2_label;
  } else {
    j["node2_id"] = nullptr;
    j["node2_label"] = nullptr;
  }
  return j;
}

/// A window answer split into newline-terminated JSON chunks, followed by a
/// summary line.
struct ChunkedResult {
  std::vector<std::string> chunks;
  std::vector<std::size_t> counts;
  std::string summary;
  std::size_t total_rows = 0;
  double query_ms = 0.0;
  double serialize_ms = 0.0;
};

/// Runs the window query and serializes the rows in chunks of `chunk_size`.
/// Timings go into the summary line only when `timings_in_body` is set, so
/// the default payload is a pure function of the request.
inline ChunkedResult window_chunks(const Store& store, int layer, const Rect& rect,
                                   const LabelFilter* filter, std::size_t chunk_size,
                                   bool timings_in_body = false) {
  if (chunk_size == 0) throw ConfigError("chunk size must be >= 1");
  using clock = std::chrono::steady_clock;
  const LayerTable& t = store.layer(layer);
  check_window(rect);
  const auto t0 = clock::now();
  const auto hits = t.window(rect, filter);
  const auto t1 = clock::now();

  ChunkedResult out;
  out.total_rows = hits.size();
  for (std::size_t i = 0; i < hits.size(); i += chunk_size) {
    const auto n = std::min(chunk_size, hits.size() - i);
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t j = i; j < i + n; ++j) rows.push_back(row_json(t.rows[hits[j]]));
    nlohmann::json chunk;
    chunk["chunk"] = out.chunks.size();
    chunk["count"] = n;
    chunk["rows"] = std::move(rows);
    out.chunks.push_back(chunk.dump() + "\n");
    out.counts.push_back(n);
  }
  const auto t2 = clock::now();
  out.query_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  out.serialize_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();

  nlohmann::json summary;
  summary["layer"] = layer;
  summary["window"] = {rect.min_x, rect.min_y, rect.max_x, rect.max_y};
  summary["total_rows"] = out.total_rows;
  summary["chunks"] = out.chunks.size();
  if (timings_in_body) {
    summary["query_ms"] = out.query_ms;
    summary["serialize_ms"] = out.serialize_ms;
  }
  out.summary = nlohmann::json{{"summary", summary}}.dump() + "\n";
  return out;
}

/// Concatenated rows of a chunked payload (every line except the summary).
inline std::vector<nlohmann::json> reassemble_rows(const std::string& payload) {
  std::vector<nlohmann::json> rows;
  std::size_t pos = 0;
  while (pos < payload.size()) {
    auto nl = payload.find('\n', pos);
    if (nl == std::string::npos) nl = payload.size();
    const auto line = nlohmann::json::parse(payload.substr(pos, nl - pos));
    if (line.contains("rows")) {
      for (const auto& r : line["rows"]) rows.push_back(r);
    }
    pos = nl + 1;
  }
  return rows;
}

inline nlohmann::json search_json(const Store& store, int layer, std::string_view keyword,
                                  std::size_t limit) {
  const LayerTable& t = store.layer(layer);
  nlohmann::json hits = nlohmann::json::array();
  for (const auto& h : keyword_search(store, layer, keyword, limit)) {
    const NodeRecord* n = t.find_node(h.id);
    hits.push_back({{"id", h.id}, {"label", h.label}, {"x", n->position.x}, {"y", n->position.y}});
  }
  return {{"layer", layer}, {"query", std::string(keyword)}, {"hits", std::move(hits)}};
}

/// Focus-on-node payload: the node, its neighbours, and the connecting rows.
inline nlohmann::json node_json(const Store& store, int layer, NodeId id) {
  const NodeInfo info = node_lookup(store, layer, id);
  const LayerTable& t = store.layer(layer);
  std::map<NodeId, const NodeRecord*> neighbours;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : info.incident) {
    rows.push_back(row_json(row));
    for (NodeId other : {row.node1_id, *row.node2_id}) {
      if (other != id) neighbours.emplace(other, t.find_node(other));
    }
  }
  nlohmann::json ns = nlohmann::json::array();
  for (const auto& [nid, rec] : neighbours) {
    ns.push_back({{"id", nid}, {"label", rec->label}, {"x", rec->position.x}, {"y", rec->position.y}});
  }
  return {{"layer", layer},
          {"node", {{"id", info.id}, {"label", info.label}, {"x", info.position.x}, {"y", info.position.y}}},
          {"neighbours", std::move(ns)},
          {"rows", std::move(rows)}};
}

inline nlohmann::json stats_json(const Store& store, int layer) {
  const GraphStats s = layer_stats(store, layer);
  return {{"layer", layer},
          {"node_count", s.node_count},
          {"edge_count", s.edge_count},
          {"avg_degree", s.avg_degree},
          {"density", s.density}};
}

/// Every ceil(n / max_points)-th node (by id) of the layer, for the overview.
inline nlohmann::json birdview_json(const Store& store, int layer, std::size_t max_points) {
  if (max_points == 0) throw ConfigError("max_points must be >= 1");
  const LayerTable& t = store.layer(layer);
  const std::size_t n = t.nodes.size();
  const std::size_t stride = std::max<std::size_t>(1, (n + max_points - 1) / max_points);
  nlohmann::json points = nlohmann::json::array();
  for (std::size_t i = 0; i < n; i += stride) {
    points.push_back({t.nodes[i].position.x, t.nodes[i].position.y});
  }
  const Rect b = t.plane_bounds();
  return {{"layer", layer},
          {"total_nodes", n},
          {"stride", stride},
          {"bounds", b.empty() ? nlohmann::json(nullptr)
                               : nlohmann::json::array({b.min_x, b.min_y, b.max_x, b.max_y})},
          {"points", std::move(points)}};
}

}  // namespace gvdb
