#pragma once

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gvdb/abstraction.hpp"
#include "gvdb/binary_io.hpp"
#include "gvdb/error.hpp"
#include "gvdb/geometry.hpp"
#include "gvdb/graph.hpp"
#include "gvdb/rtree.hpp"
#include "gvdb/suffix_index.hpp"

namespace gvdb {

/// Segment from node1 to node2. For directed graphs `from` is always the
/// source. Self-loops and isolated nodes are zero-length segments.
struct EdgeGeometry {
  Point from;
  Point to;
  bool directed = true;

  friend bool operator==(const EdgeGeometry&, const EdgeGeometry&) = default;
  Rect bounds() const { return Rect::of_segment(from, to); }
};

/// One stored record: (node1, edge, node2). Rows of isolated nodes carry no
/// node2 and an empty edge label.
struct TripleRow {
  NodeId node1_id = 0;
  std::string node1_label;
  EdgeGeometry geometry;
  std::string edge_label;
  std::optional<NodeId> node2_id;
  std::string node2_label;

  bool degenerate() const { return !node2_id.has_value(); }
  friend bool operator==(const TripleRow&, const TripleRow&) = default;
};

struct NodeRecord {
  NodeId id = 0;
  std::string label;
  Point position;
};

/// Which edge labels a window query keeps. `allow` keeps only the listed
/// labels, `hide` drops them. Rows of isolated nodes always pass.
struct LabelFilter {
  enum class Mode { allow, hide };
  Mode mode = Mode::allow;
  std::unordered_set<std::string> labels;

  bool passes(const TripleRow& row) const {
    if (row.degenerate()) return true;
    const bool listed = labels.contains(row.edge_label);
    return mode == Mode::allow ? listed : !listed;
  }
};

/// All rows of one layer plus the spatial, id, and label indexes.
class LayerTable {
public:
  int index = 0;
  bool directed = true;
  std::vector<TripleRow> rows;
  /// Sorted by id.
  std::vector<NodeRecord> nodes;
  PackedRTree<std::uint32_t> spatial;
  /// (node id, row) for both roles, sorted.
  std::vector<std::pair<NodeId, std::uint32_t>> id_index;
  /// Distinct node labels (sorted) and the ids carrying each one.
  std::vector<std::string> labels;
  std::vector<std::vector<NodeId>> label_nodes;
  SuffixIndex label_index;

  const NodeRecord* find_node(NodeId id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                               [](const NodeRecord& n, NodeId v) { return n.id < v; });
    return it != nodes.end() && it->id == id ? &*it : nullptr;
  }

  /// Rows mentioning `id` as node1 or node2, ascending row index.
  std::vector<std::uint32_t> rows_of(NodeId id) const {
    auto lo = std::lower_bound(id_index.begin(), id_index.end(), std::pair<NodeId, std::uint32_t>{id, 0});
    std::vector<std::uint32_t> out;
    for (auto it = lo; it != id_index.end() && it->first == id; ++it) out.push_back(it->second);
    return out;
  }

  Rect plane_bounds() const {
    Rect r;
    for (const auto& n : nodes) r.expand(n.position);
    return r;
  }

  std::size_t edge_count() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const TripleRow& r) { return !r.degenerate(); }));
  }

  /// Row indices intersecting the closed `window`, filtered, ordered by
  /// (node1, node2, row). The R-tree prunes by bounding box; the exact
  /// segment test decides.
  std::vector<std::uint32_t> window(const Rect& window, const LabelFilter* filter = nullptr) const {
    std::vector<std::uint32_t> hits;
    spatial.query(window, [&](const auto& entry) {
      const TripleRow& row = rows[entry.value];
      if (!segment_intersects_rect(row.geometry.from, row.geometry.to, window)) return;
      if (filter && !filter->passes(row)) return;
      hits.push_back(entry.value);
    });
    std::sort(hits.begin(), hits.end(), [&](std::uint32_t a, std::uint32_t b) {
      const auto ka = std::tuple(rows[a].node1_id, rows[a].node2_id, a);
      const auto kb = std::tuple(rows[b].node1_id, rows[b].node2_id, b);
      return ka < kb;
    });
    return hits;
  }
};

inline constexpr std::uint16_t kStoreFormatVersion = 1;

struct Manifest {
  std::string dataset;
  std::string criterion;
  std::uint16_t format_version = kStoreFormatVersion;
  nlohmann::json build_parameters = nlohmann::json::object();
};

struct Store {
  Manifest manifest;
  std::vector<LayerTable> layers;

  const LayerTable& layer(int i) const {
    if (i < 0 || static_cast<std::size_t>(i) >= layers.size()) {
      throw NotFoundError("unknown layer " + std::to_string(i));
    }
    return layers[static_cast<std::size_t>(i)];
  }

  /// Manifest plus per-layer bounds and sizes, as served to clients.
  nlohmann::json manifest_json() const {
    nlohmann::json j;
    j["dataset"] = manifest.dataset;
    j["criterion"] = manifest.criterion;
    j["format_version"] = manifest.format_version;
    j["layer_count"] = layers.size();
    j["build"] = manifest.build_parameters;
    j["layers"] = nlohmann::json::array();
    for (const auto& t : layers) {
      const Rect b = t.plane_bounds();
      nlohmann::json l;
      l["index"] = t.index;
      l["nodes"] = t.nodes.size();
      l["edges"] = t.edge_count();
      l["bounds"] = b.empty() ? nlohmann::json(nullptr)
                              : nlohmann::json::array({b.min_x, b.min_y, b.max_x, b.max_y});
      j["layers"].push_back(std::move(l));
    }
    return j;
  }
};

namespace detail {

inline void finish_indexes(LayerTable& t) {
  std::vector<PackedRTree<std::uint32_t>::Entry> entries;
  entries.reserve(t.rows.size());
  t.id_index.clear();
  t.id_index.reserve(2 * t.rows.size());
  for (std::uint32_t r = 0; r < t.rows.size(); ++r) {
    const TripleRow& row = t.rows[r];
    entries.push_back({row.geometry.bounds(), r});
    t.id_index.emplace_back(row.node1_id, r);
    if (row.node2_id && *row.node2_id != row.node1_id) t.id_index.emplace_back(*row.node2_id, r);
  }
  std::sort(t.id_index.begin(), t.id_index.end());
  t.spatial = PackedRTree<std::uint32_t>(std::move(entries));

  std::vector<std::pair<std::string, NodeId>> by_label;
  by_label.reserve(t.nodes.size());
  for (const auto& n : t.nodes) by_label.emplace_back(n.label, n.id);
  std::sort(by_label.begin(), by_label.end());
  t.labels.clear();
  t.label_nodes.clear();
  for (auto& [label, id] : by_label) {
    if (t.labels.empty() || t.labels.back() != label) {
      t.labels.push_back(label);
      t.label_nodes.emplace_back();
    }
    t.label_nodes.back().push_back(id);
  }
  t.label_index = SuffixIndex(t.labels);
}

}  // namespace detail

/// Materializes one layer: a row per edge, a degenerate row per isolated
/// node, and the three indexes.
inline LayerTable build_layer_table(const Layer& layer) {
  const Graph& g = layer.graph;
  LayerTable t;
  t.index = layer.index;
  t.directed = g.directed();
  std::vector<Point> pos(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const Node& n = g.node(i);
    auto it = layer.layout.find(n.id);
    if (it == layer.layout.end()) {
      throw StoreError("layer " + std::to_string(layer.index) + ": no position for node " +
                       std::to_string(n.id) + " ('" + n.label + "')");
    }
    pos[i] = it->second;
    t.nodes.push_back({n.id, n.label, it->second});
  }
  std::sort(t.nodes.begin(), t.nodes.end(),
            [](const NodeRecord& a, const NodeRecord& b) { return a.id < b.id; });

  std::vector<bool> touched(g.node_count(), false);
  t.rows.reserve(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    auto [s, d] = g.endpoints(e);
    touched[s] = touched[d] = true;
    const Edge& edge = g.edge(e);
    t.rows.push_back({edge.source, g.node(s).label, {pos[s], pos[d], g.directed()}, edge.label,
                      edge.target, g.node(d).label});
  }
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (touched[i]) continue;
    const Node& n = g.node(i);
    t.rows.push_back({n.id, n.label, {pos[i], pos[i], g.directed()}, "", std::nullopt, ""});
  }
  detail::finish_indexes(t);
  return t;
}

/// Builds every layer's table; layers are independent and built
/// concurrently.
inline Store build_store(std::span<const Layer> layers, Manifest manifest = {}) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].index != static_cast<int>(i)) {
      throw StoreError("layer indices must be contiguous from 0");
    }
  }
  Store store;
  store.manifest = std::move(manifest);
  std::vector<std::future<LayerTable>> jobs;
  for (const Layer& layer : layers) {
    jobs.push_back(std::async(std::launch::async, [&layer] { return build_layer_table(layer); }));
  }
  for (auto& job : jobs) store.layers.push_back(job.get());
  return store;
}

inline void check_window(const Rect& r) {
  if (!std::isfinite(r.min_x) || !std::isfinite(r.min_y) || !std::isfinite(r.max_x) ||
      !std::isfinite(r.max_y)) {
    throw ConfigError("window coordinates must be finite");
  }
  if (r.min_x > r.max_x || r.min_y > r.max_y) throw ConfigError("inverted window rectangle");
}

/// Rows of `layer` whose segment meets the closed rectangle, ordered by
/// (node1_id, node2_id).
inline std::vector<TripleRow> window_query(const Store& store, int layer, const Rect& rect,
                                           const LabelFilter* filter = nullptr) {
  const LayerTable& t = store.layer(layer);
  check_window(rect);
  std::vector<TripleRow> out;
  for (auto r : t.window(rect, filter)) out.push_back(t.rows[r]);
  return out;
}

struct KeywordHit {
  NodeId id = 0;
  std::string label;
  friend bool operator==(const KeywordHit&, const KeywordHit&) = default;
};

/// Nodes whose label contains `keyword` (case-insensitive), ordered by
/// (label, id). `limit` of 0 means no limit.
inline std::vector<KeywordHit> keyword_search(const Store& store, int layer,
                                              std::string_view keyword, std::size_t limit) {
  const LayerTable& t = store.layer(layer);
  std::vector<KeywordHit> out;
  for (auto doc : t.label_index.find(keyword)) {
    for (NodeId id : t.label_nodes[doc]) {
      if (limit != 0 && out.size() >= limit) return out;
      out.push_back({id, t.labels[doc]});
    }
  }
  return out;
}

struct NodeInfo {
  NodeId id = 0;
  std::string label;
  Point position;
  /// Edge rows where the node is node1 or node2.
  std::vector<TripleRow> incident;
};

inline NodeInfo node_lookup(const Store& store, int layer, NodeId id) {
  const LayerTable& t = store.layer(layer);
  const NodeRecord* n = t.find_node(id);
  if (!n) throw NotFoundError("node " + std::to_string(id) + " not in layer " + std::to_string(layer));
  NodeInfo info{n->id, n->label, n->position, {}};
  for (auto r : t.rows_of(id)) {
    if (!t.rows[r].degenerate()) info.incident.push_back(t.rows[r]);
  }
  return info;
}

inline GraphStats layer_stats(const Store& store, int layer) {
  const LayerTable& t = store.layer(layer);
  Graph g(t.directed);
  g.reserve(t.nodes.size(), t.rows.size());
  for (const auto& n : t.nodes) g.add_node(n.id, "");
  for (const auto& r : t.rows) {
    if (!r.degenerate()) g.add_edge(r.node1_id, *r.node2_id, "");
  }
  return graph_stats(g);
}

// Store file layout (all integers little-endian):
//   "GVDB" | u16 version | str manifest-json | u32 layer count | layers...
//   | u32 CRC-32 of every preceding byte
// Each layer: u32 index | u8 directed | nodes | rows | spatial index
//   | id index | label index.

namespace detail {

inline constexpr std::string_view kMagic = "GVDB";

inline void write_rect(io::Writer& w, const Rect& r) {
  w.f64(r.min_x);
  w.f64(r.min_y);
  w.f64(r.max_x);
  w.f64(r.max_y);
}

inline Rect read_rect(io::Reader& r) {
  Rect out;
  out.min_x = r.f64();
  out.min_y = r.f64();
  out.max_x = r.f64();
  out.max_y = r.f64();
  return out;
}

inline void write_layer(io::Writer& w, const LayerTable& t) {
  w.u32(static_cast<std::uint32_t>(t.index));
  w.u8(t.directed ? 1 : 0);
  w.u64(t.nodes.size());
  for (const auto& n : t.nodes) {
    w.u64(n.id);
    w.f64(n.position.x);
    w.f64(n.position.y);
    w.str(n.label);
  }
  w.u64(t.rows.size());
  for (const auto& row : t.rows) {
    w.u64(row.node1_id);
    w.u8(static_cast<std::uint8_t>((row.geometry.directed ? 1 : 0) | (row.node2_id ? 2 : 0)));
    w.f64(row.geometry.from.x);
    w.f64(row.geometry.from.y);
    w.f64(row.geometry.to.x);
    w.f64(row.geometry.to.y);
    w.str(row.edge_label);
    w.u64(row.node2_id.value_or(0));
  }
  w.u32(static_cast<std::uint32_t>(t.spatial.fanout()));
  w.u64(t.spatial.nodes().size());
  for (const auto& n : t.spatial.nodes()) {
    write_rect(w, n.box);
    w.u32(n.first);
    w.u32(n.count);
    w.u8(n.leaf ? 1 : 0);
  }
  w.u64(t.spatial.entries().size());
  for (const auto& e : t.spatial.entries()) {
    write_rect(w, e.box);
    w.u32(e.value);
  }
  w.u64(t.id_index.size());
  for (const auto& [id, row] : t.id_index) {
    w.u64(id);
    w.u32(row);
  }
  w.u64(t.labels.size());
  for (std::size_t i = 0; i < t.labels.size(); ++i) {
    w.str(t.labels[i]);
    w.u64(t.label_nodes[i].size());
    for (NodeId id : t.label_nodes[i]) w.u64(id);
  }
  w.u64(t.label_index.suffixes().size());
  for (const auto& s : t.label_index.suffixes()) {
    w.u32(s.doc);
    w.u32(s.offset);
  }
}

inline LayerTable read_layer(io::Reader& r) {
  LayerTable t;
  t.index = static_cast<int>(r.u32());
  t.directed = r.u8() != 0;
  const auto node_count = r.count(28);
  t.nodes.resize(node_count);
  for (auto& n : t.nodes) {
    n.id = r.u64();
    n.position.x = r.f64();
    n.position.y = r.f64();
    n.label = r.str();
  }
  for (std::size_t i = 1; i < t.nodes.size(); ++i) {
    if (t.nodes[i - 1].id >= t.nodes[i].id) throw StoreError("node table out of order");
  }
  const auto row_count = r.count(53);
  t.rows.resize(row_count);
  for (auto& row : t.rows) {
    row.node1_id = r.u64();
    const auto flags = r.u8();
    row.geometry.directed = (flags & 1) != 0;
    row.geometry.from.x = r.f64();
    row.geometry.from.y = r.f64();
    row.geometry.to.x = r.f64();
    row.geometry.to.y = r.f64();
    row.edge_label = r.str();
    const auto node2 = r.u64();
    if (flags & 2) row.node2_id = node2;
    const NodeRecord* a = t.find_node(row.node1_id);
    const NodeRecord* b = row.node2_id ? t.find_node(*row.node2_id) : a;
    if (!a || !b) throw StoreError("row refers to an unknown node");
    if (!(a->position == row.geometry.from) || !(b->position == row.geometry.to)) {
      throw StoreError("row geometry disagrees with node positions");
    }
    row.node1_label = a->label;
    if (row.node2_id) row.node2_label = b->label;
  }
  const auto fanout = r.u32();
  const auto tree_nodes = r.count(41);
  std::vector<PackedRTree<std::uint32_t>::Node> nodes(tree_nodes);
  for (auto& n : nodes) {
    n.box = read_rect(r);
    n.first = r.u32();
    n.count = r.u32();
    n.leaf = r.u8() != 0;
  }
  const auto entry_count = r.count(36);
  std::vector<PackedRTree<std::uint32_t>::Entry> entries(entry_count);
  for (auto& e : entries) {
    e.box = read_rect(r);
    e.value = r.u32();
    if (e.value >= t.rows.size()) throw StoreError("spatial entry refers to an unknown row");
  }
  if (entries.size() != t.rows.size()) throw StoreError("spatial index does not cover every row");
  t.spatial = PackedRTree<std::uint32_t>::from_parts(std::move(nodes), std::move(entries), fanout);
  const auto id_count = r.count(12);
  t.id_index.resize(id_count);
  for (auto& [id, row] : t.id_index) {
    id = r.u64();
    row = r.u32();
    if (row >= t.rows.size()) throw StoreError("id index refers to an unknown row");
  }
  const auto label_count = r.count(12);
  t.labels.resize(label_count);
  t.label_nodes.resize(label_count);
  for (std::size_t i = 0; i < label_count; ++i) {
    t.labels[i] = r.str();
    t.label_nodes[i].resize(r.count(8));
    for (auto& id : t.label_nodes[i]) id = r.u64();
  }
  const auto suffix_count = r.count(8);
  std::vector<SuffixIndex::Suffix> suffixes(suffix_count);
  for (auto& s : suffixes) {
    s.doc = r.u32();
    s.offset = r.u32();
  }
  t.label_index = SuffixIndex::from_parts(t.labels, std::move(suffixes));
  return t;
}

inline std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in pieces.
  constexpr std::size_t piece = 1u << 30;
  for (std::size_t off = 0; off < bytes.size(); off += piece) {
    const auto n = std::min(piece, bytes.size() - off);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + off), static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace detail

inline std::string serialize_store(const Store& store) {
  io::Writer w;
  w.raw(detail::kMagic);
  w.u16(store.manifest.format_version);
  nlohmann::json m;
  m["dataset"] = store.manifest.dataset;
  m["criterion"] = store.manifest.criterion;
  m["build"] = store.manifest.build_parameters;
  w.str(m.dump());
  w.u32(static_cast<std::uint32_t>(store.layers.size()));
  for (const auto& t : store.layers) detail::write_layer(w, t);
  const std::uint32_t crc = detail::crc32_of(w.bytes());
  w.u32(crc);
  return w.take();
}

inline Store deserialize_store(std::string_view bytes) {
  if (bytes.size() < detail::kMagic.size() + 2 + 4) throw StoreError("truncated store file");
  if (bytes.substr(0, 4) != detail::kMagic) throw StoreError("not a store file (bad magic)");
  const auto body = bytes.substr(0, bytes.size() - 4);
  io::Reader tail(bytes.substr(bytes.size() - 4));
  if (tail.u32() != detail::crc32_of(body)) throw StoreError("store checksum mismatch");

  io::Reader r(body);
  r.raw(4);
  Store store;
  store.manifest.format_version = r.u16();
  if (store.manifest.format_version != kStoreFormatVersion) {
    throw StoreError("unsupported store format version " +
                     std::to_string(store.manifest.format_version));
  }
  try {
    const auto m = nlohmann::json::parse(r.str());
    store.manifest.dataset = m.value("dataset", "");
    store.manifest.criterion = m.value("criterion", "");
    store.manifest.build_parameters = m.value("build", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw StoreError(std::string("corrupt manifest: ") + e.what());
  }
  const auto layer_count = r.u32();
  for (std::uint32_t i = 0; i < layer_count; ++i) {
    store.layers.push_back(detail::read_layer(r));
    if (store.layers.back().index != static_cast<int>(i)) throw StoreError("layer indices not contiguous");
  }
  if (r.remaining() != 0) throw StoreError("trailing bytes in store file");
  return store;
}

inline void save(const Store& store, const std::filesystem::path& path) {
  const std::string bytes = serialize_store(store);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StoreError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw StoreError("failed writing " + path.string());
}

inline Store load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_store(bytes);
}

}  // namespace gvdb
