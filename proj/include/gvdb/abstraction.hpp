#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gvdb/error.hpp"
#include "gvdb/graph.hpp"
#include "gvdb/layout.hpp"
#include "gvdb/ranking.hpp"

namespace gvdb {

enum class CriterionKind { degree, pagerank, hits_authority };

inline const char* to_string(CriterionKind k) {
  switch (k) {
    case CriterionKind::degree: return "degree";
    case CriterionKind::pagerank: return "pagerank";
    case CriterionKind::hits_authority: return "hits";
  }
  return "?";
}

inline CriterionKind parse_criterion(const std::string& s) {
  if (s == "degree") return CriterionKind::degree;
  if (s == "pagerank") return CriterionKind::pagerank;
  if (s == "hits" || s == "hits_authority") return CriterionKind::hits_authority;
  throw ConfigError("unknown criterion '" + s + "'");
}

/// Ranking criterion plus a cut rule: keep the top `keep_fraction` of the
/// nodes, or every node scoring at least `threshold`. Exactly one is set.
struct AbstractionCriterion {
  CriterionKind kind = CriterionKind::degree;
  std::optional<double> keep_fraction = 0.5;
  std::optional<double> threshold;

  static AbstractionCriterion top_fraction(CriterionKind kind, double fraction) {
    return {kind, fraction, std::nullopt};
  }
  static AbstractionCriterion at_least(CriterionKind kind, double threshold) {
    return {kind, std::nullopt, threshold};
  }

  void validate() const {
    if (keep_fraction.has_value() == threshold.has_value()) {
      throw ConfigError("set exactly one of keep_fraction and threshold");
    }
    if (keep_fraction && !(*keep_fraction > 0.0 && *keep_fraction <= 1.0)) {
      throw ConfigError("keep_fraction must lie in (0, 1]");
    }
  }
};

/// One level of the hierarchy. Layer 0 is the input graph; layer i > 0 is
/// filtered from layer i - 1 and reuses its coordinates.
struct Layer {
  int index = 0;
  Graph graph;
  PositionMap layout;
  std::optional<AbstractionCriterion> provenance;
};

/// Scores of `g` under `kind`, aligned with `g.nodes()`.
inline std::vector<double> criterion_scores(const Graph& g, CriterionKind kind) {
  switch (kind) {
    case CriterionKind::degree: return degree_scores(g);
    case CriterionKind::pagerank: return pagerank(g).score;
    case CriterionKind::hits_authority: return hits(g).authorities;
  }
  return {};
}

/// Dense indices of the nodes that survive `crit`, given their scores.
/// Ties at the cutoff keep the lower NodeId first.
inline std::vector<bool> select_survivors(const Graph& g, const std::vector<double>& scores,
                                          const AbstractionCriterion& crit) {
  crit.validate();
  const std::size_t n = g.node_count();
  std::vector<bool> keep(n, false);
  if (crit.threshold) {
    for (std::size_t v = 0; v < n; ++v) keep[v] = scores[v] >= *crit.threshold;
    return keep;
  }
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return g.node(a).id < g.node(b).id;
  });
  const auto count = static_cast<std::size_t>(
      std::ceil(*crit.keep_fraction * static_cast<double>(n) - 1e-9));
  for (std::size_t i = 0; i < std::min(count, n); ++i) keep[order[i]] = true;
  return keep;
}

/// Filters `prev` under `crit`: surviving nodes, the edges between them, and
/// their unchanged positions.
inline Layer build_layer(const Layer& prev, const AbstractionCriterion& crit) {
  crit.validate();
  if (prev.graph.empty()) throw EmptyLayerError("cannot abstract an empty layer");
  const auto scores = criterion_scores(prev.graph, crit.kind);
  const auto keep = select_survivors(prev.graph, scores, crit);
  if (std::none_of(keep.begin(), keep.end(), [](bool b) { return b; })) {
    throw EmptyLayerError("no node of layer " + std::to_string(prev.index) +
                          " passes the threshold");
  }
  Layer next;
  next.index = prev.index + 1;
  next.graph = induced_subgraph(prev.graph, [&](std::uint32_t v) { return keep[v]; });
  next.provenance = crit;
  next.layout.reserve(next.graph.node_count());
  for (const Node& node : next.graph.nodes()) {
    auto it = prev.layout.find(node.id);
    if (it == prev.layout.end()) {
      throw StoreError("layer " + std::to_string(prev.index) + " has no position for node " +
                       std::to_string(node.id));
    }
    next.layout.emplace(node.id, it->second);
  }
  return next;
}

/// Layers 0..num_layers-1 built bottom-up. Stops early, appending a line to
/// `notices`, when the next layer would be empty.
inline std::vector<Layer> build_hierarchy(Layer layer0, const AbstractionCriterion& crit,
                                          int num_layers,
                                          std::vector<std::string>* notices = nullptr) {
  if (num_layers < 1) throw ConfigError("num_layers must be >= 1");
  crit.validate();
  std::vector<Layer> layers;
  layer0.index = 0;
  layer0.provenance.reset();
  layers.push_back(std::move(layer0));
  while (static_cast<int>(layers.size()) < num_layers) {
    try {
      layers.push_back(build_layer(layers.back(), crit));
    } catch (const EmptyLayerError& e) {
      if (notices) {
        notices->push_back("hierarchy stopped at " + std::to_string(layers.size()) +
                           " layers: " + e.what());
      }
      break;
    }
  }
  return layers;
}

/// Extension point for abstractions that merge groups of nodes into single
/// nodes instead of filtering. Implementations return the condensed graph,
/// a position for every new node, and where every lower-layer node went.
struct MergeResult {
  Graph graph;
  PositionMap layout;
  std::unordered_map<NodeId, NodeId> merged_into;
};

class MergeAbstraction {
public:
  virtual ~MergeAbstraction() = default;
  virtual MergeResult merge(const Layer& prev) const = 0;
};

}  // namespace gvdb
