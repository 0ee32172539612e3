#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "gvdb/abstraction.hpp"
#include "gvdb/graph.hpp"
#include "gvdb/layout.hpp"
#include "gvdb/organizer.hpp"
#include "gvdb/partition.hpp"
#include "gvdb/store.hpp"

namespace gvdb {

struct PipelineConfig {
  std::string dataset = "graph";
  /// Number of partitions; defaults to `default_partition_count`.
  std::optional<std::uint32_t> partitions;
  double balance_tolerance = 1.1;
  std::uint64_t seed = 1;
  LayoutAlgorithm layout;
  double gap = kDefaultPartitionGap;
  AbstractionCriterion criterion{CriterionKind::pagerank, 0.5, std::nullopt};
  int layers = 5;
  /// Worker threads for per-partition layout; 0 picks the hardware count.
  unsigned threads = 0;
};

struct StepTiming {
  std::string label;
  double seconds = 0.0;
};

struct PreprocessReport {
  std::vector<StepTiming> steps;
  double total_seconds = 0.0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::uint32_t partitions = 0;
  std::size_t cut_edges = 0;
  std::vector<std::size_t> layer_nodes;
  std::vector<std::size_t> layer_edges;
  std::vector<std::string> notices;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["nodes"] = nodes;
    j["edges"] = edges;
    j["partitions"] = partitions;
    j["cut_edges"] = cut_edges;
    j["layer_nodes"] = layer_nodes;
    j["layer_edges"] = layer_edges;
    j["total_seconds"] = total_seconds;
    j["steps"] = nlohmann::json::array();
    for (const auto& s : steps) j["steps"].push_back({{"label", s.label}, {"seconds", s.seconds}});
    j["notices"] = notices;
    return j;
  }
};

inline constexpr const char* kStepLabels[5] = {
    "Step 1: Partitioning", "Step 2: Layout", "Step 3: Partition Organizer",
    "Step 4: Abstraction Layers", "Step 5: Indexing"};

namespace detail {

/// Lays out every partition, spreading partitions over worker threads.
inline std::vector<LocalLayout> layout_partitions(const Graph& g, const PartitionAssignment& a,
                                                  const PipelineConfig& cfg) {
  std::vector<std::vector<std::uint32_t>> members(a.k);
  for (std::uint32_t v = 0; v < a.part.size(); ++v) members[a.part[v]].push_back(v);
  std::vector<LocalLayout> out(a.k);
  unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, a.k);
  auto run = [&](unsigned w) {
    for (std::uint32_t p = w; p < a.k; p += workers) {
      const Graph sub = induced_subgraph(g, [&](std::uint32_t v) { return a.part[v] == p; });
      out[p] = layout_partition(sub, cfg.layout, mix_seed(cfg.seed, p));
    }
  };
  if (workers <= 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  return out;
}

}  // namespace detail

/// Runs the five preprocessing steps on `g` and returns the indexed store.
/// When `output` is given the store is written there as part of step 5.
/// Errors are rethrown prefixed with the failing step.
inline Store preprocess(const Graph& g, const PipelineConfig& cfg, PreprocessReport* report = nullptr,
                        const std::optional<std::filesystem::path>& output = std::nullopt) {
  using clock = std::chrono::steady_clock;
  PreprocessReport local;
  PreprocessReport& rep = report ? *report : local;
  rep = {};
  rep.nodes = g.node_count();
  rep.edges = g.edge_count();

  const auto start = clock::now();
  auto last = start;
  auto lap = [&](int step) {
    const auto now = clock::now();
    rep.steps.push_back({kStepLabels[step], std::chrono::duration<double>(now - last).count()});
    last = now;
  };
  auto stage = [&](int step, auto&& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      throw Error(std::string(kStepLabels[step]) + " failed: " + e.what());
    }
  };

  PartitionConfig pc;
  pc.k = cfg.partitions.value_or(default_partition_count(g));
  pc.balance_tolerance = cfg.balance_tolerance;
  pc.seed = cfg.seed;
  const PartitionAssignment assignment = stage(0, [&] { return partition(g, pc); });
  rep.partitions = assignment.k;
  rep.cut_edges = assignment.cut_edges;
  lap(0);

  const auto local_layouts = stage(1, [&] { return detail::layout_partitions(g, assignment, cfg); });
  lap(1);

  GlobalLayout global = stage(2, [&] {
    const auto crossings = crossing_edges(g, assignment);
    return arrange(local_layouts, crossings, cfg.gap);
  });
  lap(2);

  std::vector<Layer> layers = stage(3, [&] {
    Layer base{0, g, std::move(global.positions), std::nullopt};
    return build_hierarchy(std::move(base), cfg.criterion, cfg.layers, &rep.notices);
  });
  for (const auto& l : layers) {
    rep.layer_nodes.push_back(l.graph.node_count());
    rep.layer_edges.push_back(l.graph.edge_count());
  }
  lap(3);

  Store store = stage(4, [&] {
    Manifest m;
    m.dataset = cfg.dataset;
    m.criterion = to_string(cfg.criterion.kind);
    m.build_parameters = {
        {"partitions", pc.k},
        {"balance", pc.balance_tolerance},
        {"seed", cfg.seed},
        {"layout", to_string(cfg.layout.kind)},
        {"iterations", cfg.layout.iterations},
        {"edge_length", cfg.layout.ideal_edge_length},
        {"gap", cfg.gap},
        {"layers", cfg.layers},
        {"keep_fraction", cfg.criterion.keep_fraction ? nlohmann::json(*cfg.criterion.keep_fraction)
                                                      : nlohmann::json(nullptr)},
        {"threshold", cfg.criterion.threshold ? nlohmann::json(*cfg.criterion.threshold)
                                              : nlohmann::json(nullptr)},
    };
    Store s = build_store(layers, std::move(m));
    if (output) save(s, *output);
    return s;
  });
  lap(4);
  rep.total_seconds = std::chrono::duration<double>(clock::now() - start).count();
  return store;
}

}  // namespace gvdb
