#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gvdb/error.hpp"
#include "gvdb/graph.hpp"

namespace gvdb {

/// Per-node scores aligned with `Graph::nodes()`.
struct RankResult {
  std::vector<double> score;
  bool converged = true;
  int iterations = 0;
};

struct HitsResult {
  std::vector<double> hubs;
  std::vector<double> authorities;
  bool converged = true;
  /// Set when the graph has no edges and uniform scores were returned.
  bool degenerate = false;
  int iterations = 0;
};

/// In-degree plus out-degree. Parallel edges count individually; a
/// self-loop adds 2.
inline std::vector<double> degree_scores(const Graph& g) {
  std::vector<double> deg(g.node_count(), 0.0);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    auto [s, t] = g.endpoints(e);
    deg[s] += 1.0;
    deg[t] += 1.0;
  }
  return deg;
}

namespace detail {

template <typename Fn>
void for_each_arc(const Graph& g, Fn&& fn) {
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    auto [s, t] = g.endpoints(e);
    fn(s, t);
    if (!g.directed() && s != t) fn(t, s);
  }
}

}  // namespace detail

/// PageRank by power iteration with uniform teleport. Mass of dangling
/// nodes is spread uniformly. Stops when the L1 change drops below `eps`;
/// `converged` is false when `max_iter` ran out first.
inline RankResult pagerank(const Graph& g, double damping = 0.85, double eps = 1e-10,
                           int max_iter = 200) {
  const std::size_t n = g.node_count();
  if (n == 0) throw ConfigError("pagerank of an empty graph");
  std::vector<double> out_degree(n, 0.0);
  detail::for_each_arc(g, [&](std::uint32_t s, std::uint32_t) { out_degree[s] += 1.0; });

  const double nd = static_cast<double>(n);
  RankResult r;
  r.score.assign(n, 1.0 / nd);
  r.converged = false;
  std::vector<double> next(n);
  for (int it = 1; it <= max_iter; ++it) {
    double dangling = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (out_degree[v] == 0.0) dangling += r.score[v];
    }
    const double base = (1.0 - damping) / nd + damping * dangling / nd;
    std::fill(next.begin(), next.end(), base);
    detail::for_each_arc(g, [&](std::uint32_t s, std::uint32_t t) {
      next[t] += damping * r.score[s] / out_degree[s];
    });
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) change += std::abs(next[v] - r.score[v]);
    r.score.swap(next);
    r.iterations = it;
    if (change < eps) {
      r.converged = true;
      break;
    }
  }
  return r;
}

/// HITS mutual reinforcement: authorities = A^T hubs, hubs = A authorities,
/// each L2-normalized per step, starting from uniform vectors.
inline HitsResult hits(const Graph& g, double eps = 1e-10, int max_iter = 200) {
  const std::size_t n = g.node_count();
  if (n == 0) throw ConfigError("hits of an empty graph");
  HitsResult r;
  const double uniform = 1.0 / std::sqrt(static_cast<double>(n));
  r.hubs.assign(n, uniform);
  r.authorities.assign(n, uniform);
  if (g.edge_count() == 0) {
    r.degenerate = true;
    return r;
  }
  auto normalize = [](std::vector<double>& v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return false;
    for (double& x : v) x /= norm;
    return true;
  };
  r.converged = false;
  std::vector<double> auth(n), hub(n);
  for (int it = 1; it <= max_iter; ++it) {
    std::fill(auth.begin(), auth.end(), 0.0);
    detail::for_each_arc(g, [&](std::uint32_t s, std::uint32_t t) { auth[t] += r.hubs[s]; });
    if (!normalize(auth)) {
      r.degenerate = true;
      r.hubs.assign(n, uniform);
      r.authorities.assign(n, uniform);
      return r;
    }
    std::fill(hub.begin(), hub.end(), 0.0);
    detail::for_each_arc(g, [&](std::uint32_t s, std::uint32_t t) { hub[s] += auth[t]; });
    normalize(hub);
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      change += std::abs(auth[v] - r.authorities[v]) + std::abs(hub[v] - r.hubs[v]);
    }
    r.authorities.swap(auth);
    r.hubs.swap(hub);
    r.iterations = it;
    if (change < eps) {
      r.converged = true;
      break;
    }
  }
  return r;
}

}  // namespace gvdb
