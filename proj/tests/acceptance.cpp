// Acceptance gate: runs every primary criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit status is non-zero if any
// criterion fails.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "gvdb/gvdb.hpp"
#include "gvdb/http_server.hpp"
#include "gvdb/synthetic.hpp"
#include "support.hpp"

extern char** environ;

using namespace gvdb;
using nlohmann::json;
using clock_type = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome spatial_oracle() {
  std::mt19937_64 rng(101);
  const auto t0 = clock_type::now();
  int mismatches = 0;
  std::size_t rows_checked = 0;
  for (int c = 0; c < 1000; ++c) {
    const std::size_t m = rng() % 5001;
    const std::size_t n = 1 + rng() % (m / 2 + 2);
    const Graph g = oracle::random_graph(n, m, rng);
    const Store s = support::scattered_store(g, rng, 1000.0);
    const Rect w = support::random_window(rng, 1000.0, oracle::uniform(rng, 0, 1) < 0.1 ? 0.0 : 600.0);
    const auto got = window_query(s, 0, w);
    const auto want = support::scan_window(s.layers[0], w);
    if (got != want) ++mismatches;
    rows_checked += want.size();
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 60.0,
          fmt("1000 cases, %d mismatches, %zu matching rows, %.1f s (limit 60 s)", mismatches,
              rows_checked, secs)};
}

std::string random_label(std::mt19937_64& rng) {
  static const char* words[] = {"Christos", "Faloutsos", "graph", "Graph", "DATA", "base", "tree",
                                "R-tree", "ab", "aba", "b", "Ωmega", "straße", "x", "index", "Index"};
  std::string s;
  const int parts = 1 + static_cast<int>(rng() % 4);
  for (int p = 0; p < parts; ++p) {
    if (p) s += (rng() % 3 == 0) ? "-" : " ";
    if (rng() % 4 == 0) {
      const int len = 1 + static_cast<int>(rng() % 6);
      for (int i = 0; i < len; ++i) s += static_cast<char>((rng() % 2 ? 'a' : 'A') + rng() % 4);
    } else {
      s += words[rng() % std::size(words)];
    }
  }
  return s;
}

Outcome keyword_oracle() {
  std::mt19937_64 rng(202);
  const auto t0 = clock_type::now();
  int mismatches = 0, queries = 0;
  for (int set = 0; set < 500; ++set) {
    Graph g;
    const std::size_t n = 1 + rng() % 300;
    for (NodeId i = 0; i < n; ++i) g.add_node(i, random_label(rng));
    const Store s = support::scattered_store(g, rng, 100.0);
    std::vector<std::string> labels;
    for (const auto& node : g.nodes()) labels.push_back(node.label);
    for (int q = 0; q < 10; ++q) {
      std::string kw;
      if (q < 4) {
        const std::string& src = labels[rng() % labels.size()];
        const std::size_t a = rng() % src.size();
        kw = src.substr(a, 1 + rng() % (src.size() - a));
      } else {
        kw = random_label(rng).substr(0, 1 + rng() % 5);
      }
      std::vector<std::pair<std::string, NodeId>> want;
      for (auto i : oracle::naive_contains(labels, kw)) want.emplace_back(labels[i], i);
      std::sort(want.begin(), want.end());
      std::vector<std::pair<std::string, NodeId>> got;
      for (const auto& h : keyword_search(s, 0, kw, 0)) got.emplace_back(h.label, h.id);
      mismatches += got == want ? 0 : 1;
      ++queries;
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 30.0,
          fmt("500 label sets, %d queries, %d mismatches, %.1f s (limit 30 s)", queries, mismatches, secs)};
}

Outcome partition_quality() {
  std::mt19937_64 rng(303);
  int worse = 0, optimal = 0;
  double worst_ratio = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Graph g = oracle::random_graph(8, 8 + rng() % 13, rng, false);
    const PartitionConfig cfg{2 + static_cast<std::uint32_t>(i % 2), 1.1, rng()};
    const auto best = oracle::brute_force_min_cut(g, cfg.k, partition_capacity(8, cfg));
    const auto got = partition(g, cfg);
    bool balanced = true;
    for (auto sz : got.sizes()) balanced = balanced && sz >= 1 && sz <= partition_capacity(8, cfg);
    if (!balanced || got.cut_edges > 2 * best) ++worse;
    if (got.cut_edges == best) ++optimal;
    if (best > 0) worst_ratio = std::max(worst_ratio, static_cast<double>(got.cut_edges) / best);
  }
  Graph bridge;
  for (NodeId v = 1; v <= 6; ++v) bridge.add_node(v, "");
  for (auto [a, b] : {std::pair<NodeId, NodeId>{1, 2}, {2, 3}, {3, 1}, {4, 5}, {5, 6}, {6, 4}, {3, 4}}) {
    bridge.add_edge(a, b, "");
  }
  const auto cut = partition(bridge, {2, 1.0, 1}).cut_edges;
  return {worse == 0 && cut == 1,
          fmt("50 graphs: %d over 2x optimum, %d optimal, worst ratio %.2f; bridge cut %zu", worse,
              optimal, worst_ratio, cut)};
}

/// Clustered graph: `k` groups with dense internal links and a few links
/// between groups.
Graph clustered_graph(std::size_t n, std::uint32_t k, std::mt19937_64& rng) {
  Graph g;
  for (NodeId i = 0; i < n; ++i) g.add_node(i, "c" + std::to_string(i % k));
  for (NodeId i = 0; i < n; ++i) {
    for (int e = 0; e < 2; ++e) {
      NodeId j = (rng() % (n / k)) * k + i % k;
      if (j >= n) j = i % k;
      if (j != i) g.add_edge(i, j, "in");
    }
    if (rng() % 5 == 0) g.add_edge(i, rng() % n, "across");
  }
  return g;
}

Outcome organizer_invariants() {
  std::mt19937_64 rng(404);
  int overlapping = 0;
  for (int c = 0; c < 1000; ++c) {
    const std::size_t k = 1 + rng() % 16;
    std::vector<LocalLayout> layouts;
    NodeId next = 0;
    for (std::size_t p = 0; p < k; ++p) {
      LocalLayout l;
      Rect box;
      const std::size_t n = 1 + rng() % 4;
      const double w = oracle::uniform(rng, 0, 400), h = oracle::uniform(rng, 0, 400);
      for (std::size_t i = 0; i < n; ++i) {
        const Point pt{oracle::uniform(rng, 0, w), oracle::uniform(rng, 0, h)};
        l.positions[next++] = pt;
        box.expand(pt);
      }
      l.bbox = box.padded(oracle::uniform(rng, 0, 30));
      layouts.push_back(std::move(l));
    }
    std::vector<CrossingEdge> cross;
    for (std::size_t e = 0; k > 1 && e < rng() % 40; ++e) {
      const auto a = static_cast<std::uint32_t>(rng() % k);
      const auto b = static_cast<std::uint32_t>((a + 1 + rng() % (k - 1)) % k);
      cross.push_back({{a, layouts[a].positions.begin()->first}, {b, layouts[b].positions.begin()->first}, "x"});
    }
    const auto g = arrange(layouts, cross, oracle::uniform(rng, 0, 60));
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b)
        overlapping += g.partition_boxes[a].interiors_intersect(g.partition_boxes[b]) ? 1 : 0;
  }

  int losses = 0;
  double ratio_sum = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const auto k = static_cast<std::uint32_t>(4 + rng() % 9);
    const Graph g = clustered_graph(30 * k + rng() % 60, k, rng);
    const auto a = partition(g, {k, 1.1, 7});
    PipelineConfig cfg;
    cfg.threads = 1;
    const auto layouts = detail::layout_partitions(g, a, cfg);
    const auto cross = crossing_edges(g, a);
    const double greedy = total_crossing_length(arrange(layouts, cross, cfg.gap), cross);
    double random_sum = 0.0;
    for (int r = 0; r < 20; ++r) {
      random_sum += total_crossing_length(oracle::random_arrangement(layouts, cfg.gap, rng), cross);
    }
    const double mean = random_sum / 20.0;
    losses += greedy <= mean ? 0 : 1;
    ratio_sum += mean > 0 ? greedy / mean : 1.0;
  }
  return {overlapping == 0 && losses == 0,
          fmt("1000 arrangements, %d overlapping box pairs; 50 instances, greedy above random mean in %d, "
              "mean greedy/random length %.2f",
              overlapping, losses, ratio_sum / 50.0)};
}

Outcome ranking_correctness() {
  std::mt19937_64 rng(505);
  double pr_sum_err = 0.0, pr_err = 0.0, hits_norm_err = 0.0, hits_err = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Graph g = oracle::random_graph(10, 5 + rng() % 26, rng);
    const auto pr = pagerank(g);
    const auto ref = oracle::dense_pagerank(g);
    double sum = 0.0;
    for (std::size_t v = 0; v < 10; ++v) {
      sum += pr.score[v];
      pr_err = std::max(pr_err, std::abs(pr.score[v] - ref[v]));
    }
    pr_sum_err = std::max(pr_sum_err, std::abs(sum - 1.0));
    const auto h = hits(g);
    const auto href = oracle::dense_hits(g);
    double na = 0.0, nh = 0.0;
    for (std::size_t v = 0; v < 10; ++v) {
      na += h.authorities[v] * h.authorities[v];
      nh += h.hubs[v] * h.hubs[v];
      hits_err = std::max({hits_err, std::abs(h.authorities[v] - href.authorities[v]),
                           std::abs(h.hubs[v] - href.hubs[v])});
    }
    hits_norm_err = std::max({hits_norm_err, std::abs(std::sqrt(na) - 1.0), std::abs(std::sqrt(nh) - 1.0)});
  }
  Graph cycle;
  for (NodeId v = 0; v < 3; ++v) cycle.add_node(v, "");
  cycle.add_edge(0, 1, "");
  cycle.add_edge(1, 2, "");
  cycle.add_edge(2, 0, "");
  double cycle_err = 0.0;
  for (double s : pagerank(cycle).score) cycle_err = std::max(cycle_err, std::abs(s - 1.0 / 3.0));
  const bool ok = pr_sum_err <= 1e-9 && pr_err <= 1e-8 && hits_norm_err <= 1e-9 && hits_err <= 1e-8 &&
                  cycle_err <= 1e-9;
  return {ok, fmt("pagerank |sum-1| %.1e, oracle err %.1e; hits |norm-1| %.1e, oracle err %.1e; 3-cycle err %.1e",
                  pr_sum_err, pr_err, hits_norm_err, hits_err, cycle_err)};
}

Outcome layer_invariants() {
  std::mt19937_64 rng(606);
  int violations = 0;
  for (int i = 0; i < 20; ++i) {
    const std::size_t n = 16 + rng() % 300;
    const Graph g = oracle::random_graph(n, n + rng() % (3 * n), rng);
    Layer base{0, g, {}, std::nullopt};
    for (const auto& v : g.nodes()) base.layout[v.id] = {oracle::uniform(rng, -1e4, 1e4), oracle::uniform(rng, -1e4, 1e4)};
    const auto kind = static_cast<CriterionKind>(i % 3);
    const auto layers = build_hierarchy(base, AbstractionCriterion::top_fraction(kind, 0.5), 5);
    if (layers.size() != 5) {
      ++violations;
      continue;
    }
    for (std::size_t l = 1; l < 5; ++l) {
      const Graph& lo = layers[l - 1].graph;
      const Graph& hi = layers[l].graph;
      if (hi.node_count() >= lo.node_count()) ++violations;
      for (const auto& v : hi.nodes()) {
        if (!lo.contains(v.id)) ++violations;
        const Point p = layers[l].layout.at(v.id), q = layers[0].layout.at(v.id);
        if (std::memcmp(&p, &q, sizeof(Point)) != 0) ++violations;
      }
      std::vector<Edge> kept;
      for (const auto& e : lo.edges()) {
        if (hi.contains(e.source) && hi.contains(e.target)) kept.push_back(e);
      }
      if (!std::ranges::equal(kept, hi.edges())) ++violations;
      const auto scores = criterion_scores(lo, kind);
      double min_kept = std::numeric_limits<double>::infinity();
      double max_dropped = -std::numeric_limits<double>::infinity();
      for (std::size_t v = 0; v < lo.node_count(); ++v) {
        (hi.contains(lo.node(v).id) ? min_kept : max_dropped) =
            hi.contains(lo.node(v).id) ? std::min(min_kept, scores[v]) : std::max(max_dropped, scores[v]);
      }
      if (max_dropped > min_kept) ++violations;
    }
  }
  return {violations == 0, fmt("20 hierarchies of 5 layers, %d violations", violations)};
}

// ---------------------------------------------------------------------------

struct ShapeRow {
  double side = 0;
  double objects = 0;
  double query_ms = 0, serialize_ms = 0, transfer_ms = 0;
};

Outcome fig4_shape(const Store& store) {
  const LayerTable& t = store.layers[0];
  const Rect plane = t.plane_bounds();
  httplib::Server server;
  mount_service(server, store);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  client.set_keep_alive(true);

  std::mt19937_64 rng(707);
  std::vector<ShapeRow> table;
  bool fits = true;
  for (double side : {200.0, 1000.0, 2000.0, 3000.0}) {
    ShapeRow row{side};
    if (plane.width() < side || plane.height() < side) fits = false;
    for (int q = 0; q < 100; ++q) {
      const double x = plane.min_x + oracle::uniform(rng, 0, std::max(0.0, plane.width() - side));
      const double y = plane.min_y + oracle::uniform(rng, 0, std::max(0.0, plane.height() - side));
      const std::string path = fmt("/api/window?layer=0&x1=%.17g&y1=%.17g&x2=%.17g&y2=%.17g", x, y, x + side, y + side);
      const auto c0 = clock_type::now();
      auto res = client.Get(path);
      const auto rows = reassemble_rows(res->body);
      const double client_ms = std::chrono::duration<double, std::milli>(clock_type::now() - c0).count();
      const double qms = std::stod(res->get_header_value("X-Query-Ms"));
      const double sms = std::stod(res->get_header_value("X-Serialize-Ms"));
      std::set<NodeId> nodes;
      std::size_t edges = 0;
      for (const auto& r : rows) {
        nodes.insert(r["node1_id"].get<NodeId>());
        if (!r["node2_id"].is_null()) {
          nodes.insert(r["node2_id"].get<NodeId>());
          ++edges;
        }
      }
      row.objects += static_cast<double>(nodes.size() + edges);
      row.query_ms += qms;
      row.serialize_ms += sms;
      row.transfer_ms += std::max(0.0, client_ms - qms - sms);
    }
    row.objects /= 100;
    row.query_ms /= 100;
    row.serialize_ms /= 100;
    row.transfer_ms /= 100;
    table.push_back(row);
  }
  server.stop();
  th.join();

  // Least-squares slope of objects against area through the origin.
  double sxy = 0, sxx = 0;
  for (const auto& r : table) {
    const double a = r.side * r.side;
    sxy += a * r.objects;
    sxx += a * a;
  }
  const double slope = sxy / sxx;
  bool monotone = true, linear = true, query_smallest = true;
  double worst_dev = 0;
  std::ostringstream detail;
  detail << fmt("plane %.0fx%.0f px;", plane.width(), plane.height());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& r = table[i];
    if (i > 0 && r.objects <= table[i - 1].objects) monotone = false;
    const double dev = r.objects / (slope * r.side * r.side) - 1.0;
    worst_dev = std::max(worst_dev, std::abs(dev));
    if (std::abs(dev) > 0.25) linear = false;
    if (!(r.query_ms < r.serialize_ms && r.query_ms < r.transfer_ms)) query_smallest = false;
    detail << fmt(" %.0f^2: %.0f objects (%+.0f%%), query %.3f / json %.3f / transfer+parse %.3f ms;", r.side,
                  r.objects, 100 * dev, r.query_ms, r.serialize_ms, r.transfer_ms);
  }
  detail << fmt(" worst deviation %.0f%% (limit 25%%)", 100 * worst_dev);
  if (!fits) detail << "; plane smaller than the largest window";
  return {fits && monotone && linear && query_smallest, detail.str()};
}

// ---------------------------------------------------------------------------

int free_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  const int port = ntohs(addr.sin_port);
  ::close(fd);
  return port;
}

pid_t spawn(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  pid_t pid = -1;
  if (posix_spawn(&pid, argv[0], nullptr, nullptr, argv.data(), environ) != 0) return -1;
  return pid;
}

int run(const std::vector<std::string>& args) {
  const pid_t pid = spawn(args);
  if (pid < 0) return -1;
  int status = 0;
  ::waitpid(pid, &status, 0);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> mixed_requests(const Store& store, std::mt19937_64& rng) {
  std::vector<std::string> paths;
  for (int i = 0; i < 1000; ++i) {
    const int layer = static_cast<int>(rng() % store.layers.size());
    const LayerTable& t = store.layers[layer];
    const Rect b = t.plane_bounds();
    switch (i % 8) {
      case 0:
      case 1:
      case 2: {
        const double side = oracle::uniform(rng, 200, 3000);
        const double x = oracle::uniform(rng, b.min_x - side, b.max_x);
        const double y = oracle::uniform(rng, b.min_y - side, b.max_y);
        std::string p = fmt("/api/window?layer=%d&x1=%.3f&y1=%.3f&x2=%.3f&y2=%.3f", layer, x, y, x + side, y + side);
        if (rng() % 4 == 0) p += "&hide=cites";
        paths.push_back(p);
        break;
      }
      case 3:
        paths.push_back(fmt("/api/search?layer=%d&q=node%%20%d&limit=%d", layer, static_cast<int>(rng() % 500),
                            static_cast<int>(1 + rng() % 50)));
        break;
      case 4:
      case 5:
        paths.push_back(fmt("/api/node?layer=%d&id=%llu", layer,
                            static_cast<unsigned long long>(t.nodes[rng() % t.nodes.size()].id)));
        break;
      case 6:
        paths.push_back(fmt("/api/stats?layer=%d", layer));
        break;
      default:
        paths.push_back(rng() % 2 ? std::string("/api/manifest")
                                  : fmt("/api/birdview?layer=%d&max_points=%d", layer, static_cast<int>(100 + rng() % 2000)));
    }
  }
  return paths;
}

Outcome end_to_end(const std::filesystem::path& dir) {
  const std::string input = (dir / "synthetic_100k.tsv").string();
  const std::string output = (dir / "synthetic_100k.gvdb").string();
  const std::string report_path = (dir / "report.json").string();
  {
    const Graph g = synthetic_lattice(100'000, 1);
    std::ofstream(input, std::ios::binary) << serialize_edge_list(g);
  }
  const auto t0 = clock_type::now();
  const int rc = run({GVDB_CLI, "preprocess", "--input", input, "--output", output, "--report-json", report_path,
                      "--dataset", "synthetic-100k"});
  const double pre_secs = seconds_since(t0);
  if (rc != 0) return {false, fmt("preprocess exited with %d", rc)};
  json report;
  std::ifstream(report_path) >> report;
  bool steps_ok = report["steps"].size() == 5;
  for (std::size_t i = 0; steps_ok && i < 5; ++i) {
    steps_ok = report["steps"][i]["label"] == kStepLabels[i] && report["steps"][i]["seconds"].get<double>() >= 0.0;
  }

  const Store store = load(output);
  const int port = free_port();
  const pid_t server = spawn({GVDB_CLI, "serve", "--store", output, "--bind", "127.0.0.1:" + std::to_string(port)});
  httplib::Client client("127.0.0.1", port);
  client.set_keep_alive(true);
  bool up = false;
  for (int attempt = 0; attempt < 600 && !up; ++attempt) {
    auto r = client.Get("/api/manifest");
    up = r && r->status == 200;
    if (!up) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  if (!up) {
    ::kill(server, SIGKILL);
    ::waitpid(server, nullptr, 0);
    return {false, "server did not come up"};
  }

  std::mt19937_64 rng(808);
  const auto paths = mixed_requests(store, rng);
  std::vector<std::string> first(paths.size());
  int errors = 0;
  const auto s0 = clock_type::now();
  for (std::size_t i = 0; i < paths.size(); ++i) {
    auto r = client.Get(paths[i]);
    if (!r || r->status != 200) {
      ++errors;
      continue;
    }
    first[i] = r->body;
  }
  const double serve_secs = seconds_since(s0);

  int serial_diffs = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    auto r = client.Get(paths[i]);
    if (!r || r->body != first[i]) ++serial_diffs;
  }
  std::atomic<int> concurrent_diffs = 0;
  {
    std::vector<std::jthread> workers;
    for (int w = 0; w < 4; ++w) {
      workers.emplace_back([&, w] {
        httplib::Client c("127.0.0.1", port);
        for (std::size_t i = w; i < paths.size(); i += 4) {
          auto r = c.Get(paths[i]);
          if (!r || r->body != first[i]) ++concurrent_diffs;
        }
      });
    }
  }
  ::kill(server, SIGTERM);
  int status = 0;
  ::waitpid(server, &status, 0);

  const bool ok = pre_secs < 600.0 && steps_ok && errors == 0 && serial_diffs == 0 && concurrent_diffs == 0;
  std::ostringstream detail;
  detail << fmt("preprocess %zu nodes / %zu edges in %.1f s (limit 600 s)", report["nodes"].get<std::size_t>(),
                report["edges"].get<std::size_t>(), pre_secs);
  for (const auto& s : report["steps"]) detail << fmt(", %s %.1f s", s["label"].get<std::string>().c_str(), s["seconds"].get<double>());
  detail << fmt("; 1000 requests in %.1f s, %d errors, %d serial replay diffs, %d concurrent replay diffs", serve_secs,
                errors, serial_diffs, concurrent_diffs.load());
  return {ok, detail.str()};
}

Outcome persistence(const Store& store, const std::filesystem::path& dir) {
  const auto path = dir / "probe.gvdb";
  save(store, path);
  const Store back = load(path);
  std::mt19937_64 rng(909);
  int diffs = 0;
  for (int i = 0; i < 100; ++i) {
    const int layer = static_cast<int>(rng() % store.layers.size());
    const LayerTable& t = store.layers[layer];
    const Rect b = t.plane_bounds();
    switch (i % 3) {
      case 0: {
        const double side = oracle::uniform(rng, 100, 3000);
        const double x = oracle::uniform(rng, b.min_x - side, b.max_x), y = oracle::uniform(rng, b.min_y - side, b.max_y);
        const Rect w{x, y, x + side, y + side};
        diffs += window_query(store, layer, w) == window_query(back, layer, w) ? 0 : 1;
        break;
      }
      case 1: {
        const std::string kw = "node " + std::to_string(rng() % 1000);
        diffs += keyword_search(store, layer, kw, 0) == keyword_search(back, layer, kw, 0) ? 0 : 1;
        break;
      }
      default: {
        const NodeId id = t.nodes[rng() % t.nodes.size()].id;
        const auto a = node_lookup(store, layer, id), c = node_lookup(back, layer, id);
        diffs += a.incident == c.incident && a.position == c.position && a.label == c.label ? 0 : 1;
      }
    }
  }
  const auto bytes = std::filesystem::file_size(path);
  std::filesystem::remove(path);
  return {diffs == 0, fmt("100 probes over %zu layers, %d differences, file %.1f MB", store.layers.size(), diffs,
                          static_cast<double>(bytes) / 1e6)};
}

}  // namespace

int main() {
  const auto dir = std::filesystem::temp_directory_path() / ("gvdb-acceptance-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);

  int failures = 0;
  auto report = [&](const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    const auto t0 = clock_type::now();
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " [" << fmt("%.1f s", seconds_since(t0)) << "] "
              << o.detail << std::endl;
  };

  report("spatial-oracle", spatial_oracle);
  report("keyword-oracle", keyword_oracle);
  report("partition-quality", partition_quality);
  report("organizer-invariants", organizer_invariants);
  report("ranking-correctness", ranking_correctness);
  report("layer-invariants", layer_invariants);

  // Shape of the window-size experiment on a 100K-edge lattice. A short
  // edge length keeps edges small relative to the smallest window.
  Store shape_store;
  report("window-size-shape", [&] {
    PipelineConfig cfg;
    cfg.dataset = "lattice-100k";
    cfg.partitions = 16;
    cfg.layout.ideal_edge_length = 20.0;
    shape_store = preprocess(synthetic_lattice(100'000, 1), cfg);
    return fig4_shape(shape_store);
  });
  report("end-to-end", [&] { return end_to_end(dir); });
  report("persistence", [&] { return persistence(shape_store, dir); });

  std::filesystem::remove_all(dir);
  std::cout << (failures == 0 ? "all criteria passed" : fmt("%d criteria failed", failures)) << std::endl;
  return failures == 0 ? 0 : 1;
}
