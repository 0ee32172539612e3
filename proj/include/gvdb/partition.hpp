#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "gvdb/error.hpp"
#include "gvdb/graph.hpp"

namespace gvdb {

struct PartitionConfig {
  std::uint32_t k = 1;
  /// Largest allowed partition size relative to n / k.
  double balance_tolerance = 1.1;
  std::uint64_t seed = 1;
};

struct PartitionAssignment {
  std::uint32_t k = 0;
  /// Partition of every node, aligned with `Graph::nodes()`.
  std::vector<std::uint32_t> part;
  std::size_t cut_edges = 0;

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> s(k, 0);
    for (auto p : part) ++s[p];
    return s;
  }
};

/// ceil(edge_count / 50'000) clamped to [1, 1024] and to the node count.
inline std::uint32_t default_partition_count(const Graph& g) {
  const std::size_t by_edges = (g.edge_count() + 49'999) / 50'000;
  std::size_t k = std::clamp<std::size_t>(by_edges, 1, 1024);
  k = std::min(k, std::max<std::size_t>(g.node_count(), 1));
  return static_cast<std::uint32_t>(k);
}

/// Largest partition size allowed by `cfg` for a graph with `n` nodes.
inline std::size_t partition_capacity(std::size_t n, const PartitionConfig& cfg) {
  const double ideal = static_cast<double>(n) / cfg.k;
  // Guard against 1.1 * 10 / 1 = 11.000000000000002 style round-up.
  return static_cast<std::size_t>(std::ceil(cfg.balance_tolerance * ideal - 1e-9));
}

/// Number of edges whose endpoints sit in different partitions. Parallel
/// edges count individually; self-loops never cross.
inline std::size_t edge_cut(const Graph& g, const PartitionAssignment& a) {
  if (a.part.size() != g.node_count()) {
    throw ConfigError("partition assignment covers " + std::to_string(a.part.size()) +
                      " of " + std::to_string(g.node_count()) + " nodes");
  }
  for (auto p : a.part) {
    if (p >= a.k) throw ConfigError("partition index out of range");
  }
  std::size_t cut = 0;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    auto [s, t] = g.endpoints(e);
    cut += a.part[s] != a.part[t] ? 1 : 0;
  }
  return cut;
}

namespace detail {

/// Undirected weighted graph in CSR form used during multilevel partitioning.
struct WeightedGraph {
  std::vector<std::uint32_t> offsets{0};
  std::vector<std::uint32_t> adjacency;
  std::vector<std::int64_t> edge_weight;
  std::vector<std::int64_t> vertex_weight;
  /// Smallest original NodeId merged into the vertex; tie-break key.
  std::vector<NodeId> key;

  std::uint32_t size() const { return static_cast<std::uint32_t>(vertex_weight.size()); }
  std::int64_t total_weight() const {
    return std::accumulate(vertex_weight.begin(), vertex_weight.end(), std::int64_t{0});
  }
};

/// Builds a CSR graph from per-vertex neighbor lists, merging duplicate
/// neighbors by summing their weights.
inline void finish_csr(WeightedGraph& w,
                       std::vector<std::vector<std::pair<std::uint32_t, std::int64_t>>>& lists) {
  w.offsets.assign(1, 0);
  w.adjacency.clear();
  w.edge_weight.clear();
  for (auto& list : lists) {
    std::sort(list.begin(), list.end());
    for (std::size_t i = 0; i < list.size();) {
      std::size_t j = i;
      std::int64_t sum = 0;
      while (j < list.size() && list[j].first == list[i].first) sum += list[j++].second;
      w.adjacency.push_back(list[i].first);
      w.edge_weight.push_back(sum);
      i = j;
    }
    w.offsets.push_back(static_cast<std::uint32_t>(w.adjacency.size()));
  }
}

inline WeightedGraph to_weighted(const Graph& g) {
  WeightedGraph w;
  const auto n = g.node_count();
  w.vertex_weight.assign(n, 1);
  w.key.resize(n);
  for (std::size_t i = 0; i < n; ++i) w.key[i] = g.node(i).id;
  std::vector<std::vector<std::pair<std::uint32_t, std::int64_t>>> lists(n);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    auto [s, t] = g.endpoints(e);
    if (s == t) continue;
    lists[s].emplace_back(t, 1);
    lists[t].emplace_back(s, 1);
  }
  finish_csr(w, lists);
  return w;
}

inline std::uint64_t next_random(std::mt19937_64& rng, std::uint64_t bound) {
  return rng() % bound;
}

inline std::vector<std::uint32_t> shuffled_order(std::uint32_t n, std::mt19937_64& rng) {
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  for (std::uint32_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[next_random(rng, i)]);
  }
  return order;
}

struct CoarseLevel {
  WeightedGraph graph;
  /// Fine vertex -> coarse vertex of the next level.
  std::vector<std::uint32_t> map;
};

/// One round of heavy-edge matching. Returns false when the graph barely
/// shrinks.
inline bool coarsen_once(const WeightedGraph& fine, std::int64_t max_vertex_weight,
                         std::mt19937_64& rng, CoarseLevel& out) {
  const auto n = fine.size();
  constexpr std::uint32_t unmatched = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> mate(n, unmatched);
  std::size_t pairs = 0;
  for (auto v : shuffled_order(n, rng)) {
    if (mate[v] != unmatched) continue;
    std::uint32_t best = unmatched;
    std::int64_t best_w = -1;
    for (auto i = fine.offsets[v]; i < fine.offsets[v + 1]; ++i) {
      const auto u = fine.adjacency[i];
      if (mate[u] != unmatched || u == v) continue;
      if (fine.vertex_weight[u] + fine.vertex_weight[v] > max_vertex_weight) continue;
      const auto w = fine.edge_weight[i];
      if (w > best_w || (w == best_w && fine.key[u] < fine.key[best])) {
        best = u;
        best_w = w;
      }
    }
    if (best == unmatched) {
      mate[v] = v;
    } else {
      mate[v] = best;
      mate[best] = v;
      ++pairs;
    }
  }
  if (pairs * 20 < n) return false;

  out.map.assign(n, unmatched);
  std::uint32_t next = 0;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (out.map[v] != unmatched) continue;
    out.map[v] = next;
    out.map[mate[v]] = next;
    ++next;
  }
  WeightedGraph& c = out.graph;
  c.vertex_weight.assign(next, 0);
  c.key.assign(next, std::numeric_limits<NodeId>::max());
  for (std::uint32_t v = 0; v < n; ++v) {
    c.vertex_weight[out.map[v]] += fine.vertex_weight[v];
    c.key[out.map[v]] = std::min(c.key[out.map[v]], fine.key[v]);
  }
  std::vector<std::vector<std::pair<std::uint32_t, std::int64_t>>> lists(next);
  for (std::uint32_t v = 0; v < n; ++v) {
    const auto cv = out.map[v];
    for (auto i = fine.offsets[v]; i < fine.offsets[v + 1]; ++i) {
      const auto cu = out.map[fine.adjacency[i]];
      if (cu != cv) lists[cv].emplace_back(cu, fine.edge_weight[i]);
    }
  }
  finish_csr(c, lists);
  return true;
}

inline std::int64_t weighted_cut(const WeightedGraph& g, const std::vector<std::uint32_t>& part) {
  std::int64_t cut = 0;
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    for (auto i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
      if (part[v] != part[g.adjacency[i]]) cut += g.edge_weight[i];
    }
  }
  return cut / 2;
}

/// Partition state with per-part weights.
struct PartState {
  const WeightedGraph* g;
  std::uint32_t k;
  std::int64_t cap;
  std::vector<std::uint32_t> part;
  std::vector<std::int64_t> weight;
  std::vector<std::int64_t> count;

  PartState(const WeightedGraph& graph, std::uint32_t parts, std::int64_t capacity,
            std::vector<std::uint32_t> assignment)
      : g(&graph), k(parts), cap(capacity), part(std::move(assignment)),
        weight(parts, 0), count(parts, 0) {
    for (std::uint32_t v = 0; v < g->size(); ++v) {
      weight[part[v]] += g->vertex_weight[v];
      ++count[part[v]];
    }
  }

  void move(std::uint32_t v, std::uint32_t to) {
    const auto from = part[v];
    weight[from] -= g->vertex_weight[v];
    --count[from];
    weight[to] += g->vertex_weight[v];
    ++count[to];
    part[v] = to;
  }

  /// Connection weight of `v` towards every part (sparse, small).
  void connections(std::uint32_t v, std::vector<std::int64_t>& conn) const {
    conn.assign(k, 0);
    for (auto i = g->offsets[v]; i < g->offsets[v + 1]; ++i) {
      conn[part[g->adjacency[i]]] += g->edge_weight[i];
    }
  }

  bool can_leave(std::uint32_t v) const { return count[part[v]] > 1; }

  bool fits(std::uint32_t v, std::uint32_t to) const {
    return weight[to] + g->vertex_weight[v] <= cap;
  }
};

struct Move {
  std::int64_t gain;
  std::uint32_t target;
};

/// Best admissible move of `v` to a part it is connected to.
inline std::optional<Move> best_move(const PartState& s, std::uint32_t v,
                                     std::vector<std::int64_t>& conn) {
  if (!s.can_leave(v)) return std::nullopt;
  s.connections(v, conn);
  const auto from = s.part[v];
  std::optional<Move> best;
  for (std::uint32_t p = 0; p < s.k; ++p) {
    if (p == from || conn[p] == 0 || !s.fits(v, p)) continue;
    const std::int64_t gain = conn[p] - conn[from];
    if (!best || gain > best->gain) best = Move{gain, p};
  }
  return best;
}

/// Kernighan-Lin / Fiduccia-Mattheyses style boundary refinement: repeatedly
/// move the unlocked vertex with the highest gain (even when negative), then
/// roll back to the best prefix of the move sequence.
inline void refine(PartState& s, int max_passes = 8) {
  const auto n = s.g->size();
  std::vector<std::int64_t> conn;
  for (int pass = 0; pass < max_passes; ++pass) {
    // (negated gain, key, vertex, target)
    using Entry = std::tuple<std::int64_t, NodeId, std::uint32_t, std::uint32_t>;
    std::set<Entry> queue;
    std::vector<std::optional<Entry>> entry_of(n);
    std::vector<bool> locked(n, false);
    auto refresh = [&](std::uint32_t v) {
      if (entry_of[v]) {
        queue.erase(*entry_of[v]);
        entry_of[v].reset();
      }
      if (locked[v]) return;
      if (auto m = best_move(s, v, conn)) {
        Entry e{-m->gain, s.g->key[v], v, m->target};
        queue.insert(e);
        entry_of[v] = e;
      }
    };
    for (std::uint32_t v = 0; v < n; ++v) refresh(v);

    std::vector<std::pair<std::uint32_t, std::uint32_t>> moves;  // (vertex, from)
    std::int64_t running = 0;
    std::int64_t best = 0;
    std::size_t best_len = 0;
    std::size_t since_best = 0;
    const std::size_t patience = std::max<std::size_t>(25, n / 50);
    while (!queue.empty() && since_best < patience) {
      const auto [neg_gain, key, v, target] = *queue.begin();
      queue.erase(queue.begin());
      entry_of[v].reset();
      if (!s.can_leave(v) || !s.fits(v, target)) {
        refresh(v);
        continue;
      }
      moves.emplace_back(v, s.part[v]);
      s.move(v, target);
      locked[v] = true;
      running += -neg_gain;
      if (running > best) {
        best = running;
        best_len = moves.size();
        since_best = 0;
      } else {
        ++since_best;
      }
      for (auto i = s.g->offsets[v]; i < s.g->offsets[v + 1]; ++i) {
        refresh(s.g->adjacency[i]);
      }
    }
    while (moves.size() > best_len) {
      auto [v, from] = moves.back();
      moves.pop_back();
      s.move(v, from);
    }
    if (best <= 0) break;
  }
}

/// Moves vertices out of overweight parts and into empty parts. Picks the
/// move with the highest gain each time; ties go to the smallest key.
inline void rebalance(PartState& s) {
  const auto n = s.g->size();
  std::vector<std::int64_t> conn;
  for (std::size_t guard = 0; guard < 4 * static_cast<std::size_t>(n) + 16; ++guard) {
    std::optional<std::uint32_t> heavy;
    std::optional<std::uint32_t> empty;
    for (std::uint32_t p = 0; p < s.k; ++p) {
      if (s.count[p] == 0 && !empty) empty = p;
      if (s.weight[p] > s.cap && (!heavy || s.weight[p] > s.weight[*heavy])) heavy = p;
    }
    if (!heavy && !empty) return;
    std::uint32_t source = 0;
    if (heavy) {
      source = *heavy;
    } else {
      std::int64_t heaviest = -1;
      for (std::uint32_t p = 0; p < s.k; ++p) {
        if (s.count[p] > 1 && s.weight[p] > heaviest) {
          heaviest = s.weight[p];
          source = p;
        }
      }
      if (heaviest < 0) return;
    }
    struct Candidate {
      std::int64_t gain;
      NodeId key;
      std::uint32_t v;
      std::uint32_t to;
    };
    std::optional<Candidate> pick;
    for (std::uint32_t v = 0; v < n; ++v) {
      if (s.part[v] != source || s.count[source] <= 1) continue;
      s.connections(v, conn);
      for (std::uint32_t p = 0; p < s.k; ++p) {
        if (p == source) continue;
        if (empty && p != *empty) continue;
        if (!s.fits(v, p)) continue;
        const std::int64_t gain = conn[p] - conn[source];
        if (!pick || gain > pick->gain ||
            (gain == pick->gain && s.g->key[v] < pick->key)) {
          pick = Candidate{gain, s.g->key[v], v, p};
        }
      }
    }
    if (!pick) return;  // vertices too heavy at this level; finer levels fix it
    s.move(pick->v, pick->to);
  }
}

/// Greedy graph growing: parts 0..k-2 absorb the frontier vertex most
/// connected to them until they reach n / k; the last part takes the rest.
inline std::vector<std::uint32_t> grow_initial(const WeightedGraph& g, std::uint32_t k,
                                               std::uint32_t first_seed,
                                               std::mt19937_64& rng) {
  const auto n = g.size();
  constexpr std::uint32_t unassigned = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> part(n, unassigned);
  const std::int64_t total = g.total_weight();
  std::size_t remaining = n;
  std::vector<std::int64_t> gain(n, 0);
  auto random_unassigned = [&]() {
    std::uint64_t r = next_random(rng, remaining);
    for (std::uint32_t v = 0; v < n; ++v) {
      if (part[v] == unassigned && r-- == 0) return v;
    }
    return unassigned;
  };
  for (std::uint32_t p = 0; p + 1 < k; ++p) {
    const std::int64_t target = (total * (p + 1)) / k - (total * p) / k;
    std::int64_t w = 0;
    std::fill(gain.begin(), gain.end(), 0);
    // (negated connection, key, vertex): strongest, then smallest key first.
    std::set<std::tuple<std::int64_t, NodeId, std::uint32_t>> frontier;
    auto absorb = [&](std::uint32_t v) {
      part[v] = p;
      --remaining;
      w += g.vertex_weight[v];
      for (auto i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
        const auto u = g.adjacency[i];
        if (part[u] != unassigned) continue;
        if (gain[u] > 0) frontier.erase({-gain[u], g.key[u], u});
        gain[u] += g.edge_weight[i];
        frontier.insert({-gain[u], g.key[u], u});
      }
    };
    while (w < target && remaining > k - p - 1) {
      std::uint32_t v;
      if (!frontier.empty()) {
        v = std::get<2>(*frontier.begin());
        frontier.erase(frontier.begin());
      } else if (p == 0 && part[first_seed] == unassigned) {
        v = first_seed;
      } else {
        v = random_unassigned();
      }
      absorb(v);
    }
  }
  for (auto& x : part) {
    if (x == unassigned) x = k - 1;
  }
  return part;
}

}  // namespace detail

/// Multilevel k-way partitioning: heavy-edge matching coarsens the graph,
/// greedy growing partitions the coarsest level, and boundary refinement
/// runs at every level on the way back up. Deterministic for a fixed seed.
inline PartitionAssignment partition(const Graph& g, const PartitionConfig& cfg) {
  if (cfg.k == 0) throw ConfigError("k must be at least 1");
  if (g.empty()) throw ConfigError("cannot partition an empty graph");
  if (cfg.k > g.node_count()) {
    throw ConfigError("k = " + std::to_string(cfg.k) + " exceeds node count " +
                      std::to_string(g.node_count()));
  }
  if (!(cfg.balance_tolerance >= 1.0)) throw ConfigError("balance tolerance must be >= 1");

  PartitionAssignment result;
  result.k = cfg.k;
  if (cfg.k == 1) {
    result.part.assign(g.node_count(), 0);
    return result;
  }

  const std::size_t n = g.node_count();
  const auto cap = static_cast<std::int64_t>(partition_capacity(n, cfg));
  std::mt19937_64 rng(cfg.seed);

  std::vector<detail::CoarseLevel> levels;
  detail::WeightedGraph current = detail::to_weighted(g);
  const std::size_t coarsen_to = std::max<std::size_t>(20u * cfg.k, 60);
  const std::int64_t max_vertex_weight =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(1.5 * n / coarsen_to));
  while (current.size() > coarsen_to) {
    detail::CoarseLevel level;
    if (!detail::coarsen_once(current, max_vertex_weight, rng, level)) break;
    std::swap(level.graph, current);  // level keeps the finer graph
    levels.push_back(std::move(level));
  }

  // Several growing trials on the coarsest graph; keep the best balanced one.
  const auto nc = current.size();
  const std::uint32_t trials = nc <= 64 ? std::max<std::uint32_t>(nc, 8) : 8;
  std::vector<std::uint32_t> best_part;
  std::tuple<bool, std::int64_t> best_score{false, 0};
  for (std::uint32_t t = 0; t < trials; ++t) {
    const std::uint32_t seed_vertex =
        nc <= 64 ? t % nc : static_cast<std::uint32_t>(detail::next_random(rng, nc));
    detail::PartState s(current, cfg.k, cap,
                        detail::grow_initial(current, cfg.k, seed_vertex, rng));
    detail::rebalance(s);
    detail::refine(s);
    bool balanced = true;
    for (std::uint32_t p = 0; p < cfg.k; ++p) {
      balanced = balanced && s.weight[p] <= cap && s.count[p] > 0;
    }
    const std::int64_t cut = detail::weighted_cut(current, s.part);
    // Prefer balanced, then lower cut; earlier trial wins ties.
    const bool better = best_part.empty() ||
                        (balanced && !std::get<0>(best_score)) ||
                        (balanced == std::get<0>(best_score) && cut < std::get<1>(best_score));
    if (better) {
      best_part = s.part;
      best_score = {balanced, cut};
    }
  }

  std::vector<std::uint32_t> part = std::move(best_part);
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    std::vector<std::uint32_t> fine(it->map.size());
    for (std::size_t v = 0; v < fine.size(); ++v) fine[v] = part[it->map[v]];
    detail::PartState s(it->graph, cfg.k, cap, std::move(fine));
    detail::rebalance(s);
    detail::refine(s);
    part = std::move(s.part);
  }
  // Finest level without coarsening still needs a final balance check.
  if (levels.empty()) {
    detail::PartState s(current, cfg.k, cap, std::move(part));
    detail::rebalance(s);
    part = std::move(s.part);
  }

  result.part = std::move(part);
  result.cut_edges = edge_cut(g, result);
  return result;
}

}  // namespace gvdb
