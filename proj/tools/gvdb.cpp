// gvdb: preprocess a graph into a store file, serve it over HTTP, or query it
// from the command line.

#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gvdb/gvdb.hpp"
#include "gvdb/http_server.hpp"
#include "gvdb/synthetic.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gvdb::Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_report(const gvdb::PreprocessReport& r, std::ostream& out) {
  out << "nodes " << r.nodes << ", edges " << r.edges << ", partitions " << r.partitions
      << ", cut edges " << r.cut_edges << "\n";
  for (std::size_t i = 0; i < r.layer_nodes.size(); ++i) {
    out << "  layer " << i << ": " << r.layer_nodes[i] << " nodes, " << r.layer_edges[i]
        << " edges\n";
  }
  out << std::fixed << std::setprecision(3);
  for (const auto& s : r.steps) out << "  " << std::left << std::setw(30) << s.label << s.seconds << " s\n";
  out << "  " << std::left << std::setw(30) << "Total" << r.total_seconds << " s\n";
  for (const auto& n : r.notices) out << "note: " << n << "\n";
}

httplib::Server* g_server = nullptr;

void stop_server(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-level graph exploration engine"};
  app.require_subcommand(1);

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "Partition, lay out, abstract and index a graph");
  std::string input, format = "edgelist", output = "store.gvdb", layout = "force",
              criterion = "pagerank", dataset, report_json;
  std::uint32_t partitions = 0;
  std::uint64_t seed = 1;
  double balance = 1.1, edge_length = 60.0, gap = gvdb::kDefaultPartitionGap;
  int iterations = 300, layers = 5;
  std::optional<double> keep_fraction, threshold;
  unsigned threads = 0;
  pre->add_option("--input", input, "Input graph file")->required();
  pre->add_option("--format", format, "edgelist | ntriples")->check(CLI::IsMember({"edgelist", "ntriples"}));
  pre->add_option("--output", output, "Store file to write");
  pre->add_option("--dataset", dataset, "Dataset name recorded in the manifest");
  pre->add_option("--partitions", partitions, "Number of partitions (default: edges / 50000)");
  pre->add_option("--seed", seed, "Random seed");
  pre->add_option("--balance", balance, "Partition balance tolerance (>= 1)");
  pre->add_option("--layout", layout, "force | circular | grid")->check(CLI::IsMember({"force", "circular", "grid"}));
  pre->add_option("--iterations", iterations, "Force-directed iterations");
  pre->add_option("--edge-length", edge_length, "Ideal edge length in pixels");
  pre->add_option("--gap", gap, "Spacing between partitions in pixels");
  pre->add_option("--criterion", criterion, "degree | pagerank | hits")->check(CLI::IsMember({"degree", "pagerank", "hits"}));
  pre->add_option("--layers", layers, "Number of abstraction layers including layer 0");
  auto* kf = pre->add_option("--keep-fraction", keep_fraction, "Fraction of nodes kept per layer");
  auto* th = pre->add_option("--threshold", threshold, "Minimum score kept per layer");
  kf->excludes(th);
  pre->add_option("--threads", threads, "Layout worker threads (0 = all cores)");
  pre->add_option("--report-json", report_json, "Also write the timing report as JSON");

  // serve
  auto* serve = app.add_subcommand("serve", "Serve a store over HTTP");
  std::string store_path = "store.gvdb", bind = "127.0.0.1:8080";
  std::size_t chunk_size = gvdb::kDefaultChunkSize;
  serve->add_option("--store", store_path, "Store file")->required();
  serve->add_option("--bind", bind, "host:port to listen on");
  serve->add_option("--chunk-size", chunk_size, "Rows per streamed chunk")->check(CLI::PositiveNumber);

  // query
  auto* query = app.add_subcommand("query", "Run one query against a store and print JSON");
  std::string qstore, kind;
  int qlayer = 0;
  std::vector<double> window;
  std::string keyword;
  std::uint64_t node_id = 0;
  std::size_t limit = 20;
  query->add_option("--store", qstore, "Store file")->required();
  query->add_option("kind", kind, "window | search | node | stats | manifest")
      ->required()
      ->check(CLI::IsMember({"window", "search", "node", "stats", "manifest"}));
  query->add_option("--layer", qlayer, "Layer index");
  query->add_option("--window", window, "x1 y1 x2 y2")->expected(4);
  query->add_option("--keyword", keyword, "Keyword for search");
  query->add_option("--id", node_id, "Node id");
  query->add_option("--limit", limit, "Maximum search hits (0 = all)");

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic lattice graph as an edge list");
  std::size_t synth_edges = 100'000;
  std::string synth_out = "synthetic.tsv";
  synth->add_option("--edges", synth_edges, "Number of edges");
  synth->add_option("--output", synth_out, "Edge-list file to write");
  synth->add_option("--seed", seed, "Random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*pre) {
      const std::string text = read_file(input);
      std::vector<std::string> warnings;
      const gvdb::Graph g = format == "ntriples" ? gvdb::parse_ntriples_subset(text)
                                                 : gvdb::parse_edge_list(text, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      gvdb::PipelineConfig cfg;
      cfg.dataset = dataset.empty() ? std::filesystem::path(input).stem().string() : dataset;
      if (partitions > 0) cfg.partitions = partitions;
      cfg.seed = seed;
      cfg.balance_tolerance = balance;
      cfg.layout.kind = gvdb::parse_layout_kind(layout);
      cfg.layout.iterations = iterations;
      cfg.layout.ideal_edge_length = edge_length;
      cfg.gap = gap;
      cfg.criterion.kind = gvdb::parse_criterion(criterion);
      if (threshold) {
        cfg.criterion.keep_fraction.reset();
        cfg.criterion.threshold = *threshold;
      } else if (keep_fraction) {
        cfg.criterion.keep_fraction = *keep_fraction;
      }
      cfg.layers = layers;
      cfg.threads = threads;
      gvdb::PreprocessReport report;
      gvdb::preprocess(g, cfg, &report, std::filesystem::path(output));
      print_report(report, std::cout);
      std::cout << "wrote " << output << "\n";
      if (!report_json.empty()) {
        std::ofstream(report_json) << report.to_json().dump(2) << "\n";
      }
      return 0;
    }

    if (*serve) {
      const gvdb::Store store = gvdb::load(store_path);
      const auto colon = bind.rfind(':');
      if (colon == std::string::npos) throw gvdb::ConfigError("--bind must be host:port");
      const std::string host = bind.substr(0, colon);
      const int port = std::stoi(bind.substr(colon + 1));
      httplib::Server server;
      gvdb::mount_service(server, store, {chunk_size});
      g_server = &server;
      std::signal(SIGINT, stop_server);
      std::signal(SIGTERM, stop_server);
      std::cout << "serving " << store.manifest.dataset << " (" << store.layers.size()
                << " layers) on http://" << host << ":" << port << std::endl;
      if (!server.listen(host, port)) throw gvdb::Error("cannot listen on " + bind);
      return 0;
    }

    if (*query) {
      const gvdb::Store store = gvdb::load(qstore);
      nlohmann::json out;
      if (kind == "manifest") {
        out = store.manifest_json();
      } else if (kind == "stats") {
        out = gvdb::stats_json(store, qlayer);
      } else if (kind == "node") {
        out = gvdb::node_json(store, qlayer, node_id);
      } else if (kind == "search") {
        out = gvdb::search_json(store, qlayer, keyword, limit);
      } else {
        if (window.size() != 4) throw gvdb::ConfigError("window needs --window x1 y1 x2 y2");
        out = nlohmann::json::array();
        for (const auto& row : gvdb::window_query(store, qlayer, {window[0], window[1], window[2], window[3]})) {
          out.push_back(gvdb::row_json(row));
        }
      }
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (*synth) {
      const gvdb::Graph g = gvdb::synthetic_lattice(synth_edges, seed);
      std::ofstream(synth_out, std::ios::binary) << gvdb::serialize_edge_list(g);
      std::cout << "wrote " << g.node_count() << " nodes, " << g.edge_count() << " edges to "
                << synth_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
