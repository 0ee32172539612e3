#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gvdb/error.hpp"

namespace gvdb {

using NodeId = std::uint64_t;

struct Node {
  NodeId id = 0;
  std::string label;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  NodeId source = 0;
  NodeId target = 0;
  std::string label;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed (or undirected) labeled multigraph. Nodes keep insertion order,
/// edges keep input order. Parallel edges and self-loops are allowed.
class Graph {
public:
  explicit Graph(bool directed = true) : directed_(directed) {}

  bool directed() const noexcept { return directed_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  std::span<const Node> nodes() const noexcept { return nodes_; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  const Node& node(std::size_t index) const { return nodes_.at(index); }
  const Edge& edge(std::size_t index) const { return edges_.at(index); }

  /// Dense endpoint indices of edge `e`, aligned with `nodes()`.
  std::pair<std::uint32_t, std::uint32_t> endpoints(std::size_t e) const {
    return endpoints_[e];
  }

  bool contains(NodeId id) const { return index_.contains(id); }

  std::optional<std::uint32_t> index_of(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& label(NodeId id) const {
    auto idx = index_of(id);
    if (!idx) throw NotFoundError("unknown node " + std::to_string(id));
    return nodes_[*idx].label;
  }

  /// Adds a node; returns false (and leaves the graph untouched) when the id
  /// already exists.
  bool add_node(NodeId id, std::string label) {
    auto [it, inserted] =
        index_.try_emplace(id, static_cast<std::uint32_t>(nodes_.size()));
    if (!inserted) return false;
    nodes_.push_back({id, std::move(label)});
    return true;
  }

  void add_edge(NodeId source, NodeId target, std::string label) {
    auto s = index_of(source);
    auto t = index_of(target);
    if (!s || !t) {
      throw Error("edge endpoint " + std::to_string(s ? target : source) +
                  " is not a node of the graph");
    }
    edges_.push_back({source, target, std::move(label)});
    endpoints_.emplace_back(*s, *t);
  }

  void reserve(std::size_t nodes, std::size_t edges) {
    nodes_.reserve(nodes);
    index_.reserve(nodes);
    edges_.reserve(edges);
    endpoints_.reserve(edges);
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.directed_ == b.directed_ && a.nodes_ == b.nodes_ &&
           a.edges_ == b.edges_;
  }

private:
  bool directed_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> endpoints_;
  std::unordered_map<NodeId, std::uint32_t> index_;
};

/// Sub-graph induced by `keep` (a predicate over dense node indices).
/// Node and edge order follow the parent graph.
template <typename Keep>
Graph induced_subgraph(const Graph& g, Keep&& keep) {
  Graph sub(g.directed());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (keep(static_cast<std::uint32_t>(i))) sub.add_node(g.node(i).id, g.node(i).label);
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    auto [s, t] = g.endpoints(e);
    if (keep(s) && keep(t)) {
      const Edge& edge = g.edge(e);
      sub.add_edge(edge.source, edge.target, edge.label);
    }
  }
  return sub;
}

struct GraphStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  double avg_degree = 0.0;
  /// Raw ratio; exceeds 1 only with parallel edges.
  double density = 0.0;
};

/// Degree counts in + out, so a self-loop adds 2. Density ignores self-loops
/// and is edges / (n(n-1)) for directed graphs, 2 * edges / (n(n-1)) otherwise.
inline GraphStats graph_stats(const Graph& g) {
  GraphStats s;
  s.node_count = g.node_count();
  s.edge_count = g.edge_count();
  if (s.node_count == 0) return s;
  std::size_t loops = 0;
  for (const Edge& e : g.edges()) loops += e.source == e.target ? 1 : 0;
  const double n = static_cast<double>(s.node_count);
  s.avg_degree = 2.0 * static_cast<double>(s.edge_count) / n;
  if (s.node_count > 1) {
    const double m = static_cast<double>(s.edge_count - loops);
    s.density = (g.directed() ? m : 2.0 * m) / (n * (n - 1.0));
  }
  return s;
}

namespace detail {

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t") == std::string_view::npos;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    ++line_no;
    fn(line_no, strip_cr(line));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

inline std::string unescape_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      switch (s[i + 1]) {
        case 't': out += '\t'; ++i; continue;
        case 'n': out += '\n'; ++i; continue;
        case 'r': out += '\r'; ++i; continue;
        case '\\': out += '\\'; ++i; continue;
        default: break;
      }
    }
    out += s[i];
  }
  return out;
}

inline std::string escape_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out;
}

inline NodeId parse_id(std::string_view s, std::size_t line) {
  NodeId v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(line, "invalid node id '" + std::string(s) + "'");
  }
  return v;
}

inline void note_label_conflict(const Graph& g, NodeId id, std::string_view label,
                                std::size_t line, std::vector<std::string>* warnings) {
  if (warnings == nullptr) return;
  const std::string& kept = g.label(id);
  if (kept != label) {
    warnings->push_back("line " + std::to_string(line) + ": node " +
                        std::to_string(id) + " relabeled '" + std::string(label) +
                        "', keeping '" + kept + "'");
  }
}

}  // namespace detail

/// Parses the tab-separated edge list
/// `src_id  src_label  edge_label  dst_id  dst_label`, one edge per line.
/// Lines starting with `#` and blank lines are skipped. When a node id shows
/// up with two different labels the first one is kept and a warning is
/// appended to `warnings`.
inline Graph parse_edge_list(std::string_view text,
                             std::vector<std::string>* warnings = nullptr) {
  Graph g(true);
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (detail::is_blank(line) || line.front() == '#') return;
    std::string_view fields[5];
    std::size_t count = 0;
    std::string_view rest = line;
    while (true) {
      const auto tab = rest.find('\t');
      if (count == 5) {
        count = 6;
        break;
      }
      fields[count++] = rest.substr(0, tab);
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (count != 5) {
      throw ParseError(line_no, "expected 5 tab-separated fields");
    }
    const NodeId src = detail::parse_id(fields[0], line_no);
    const NodeId dst = detail::parse_id(fields[3], line_no);
    std::string src_label = detail::unescape_field(fields[1]);
    std::string dst_label = detail::unescape_field(fields[4]);
    if (!g.add_node(src, src_label)) {
      detail::note_label_conflict(g, src, src_label, line_no, warnings);
    }
    if (!g.add_node(dst, dst_label)) {
      detail::note_label_conflict(g, dst, dst_label, line_no, warnings);
    }
    g.add_edge(src, dst, detail::unescape_field(fields[2]));
  });
  return g;
}

/// Inverse of `parse_edge_list` for graphs without isolated nodes.
inline std::string serialize_edge_list(const Graph& g) {
  std::string out;
  for (const Edge& e : g.edges()) {
    out += std::to_string(e.source);
    out += '\t';
    out += detail::escape_field(g.label(e.source));
    out += '\t';
    out += detail::escape_field(e.label);
    out += '\t';
    out += std::to_string(e.target);
    out += '\t';
    out += detail::escape_field(g.label(e.target));
    out += '\n';
  }
  return out;
}

namespace detail {

struct RdfTerm {
  std::string key;    // term text including delimiters, unique per node
  std::string label;  // IRI body or literal value
};

inline void skip_spaces(std::string_view& s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
}

inline RdfTerm read_rdf_term(std::string_view& s, std::size_t line) {
  skip_spaces(s);
  if (s.empty()) throw ParseError(line, "missing term");
  if (s.front() == '<') {
    const auto close = s.find('>');
    if (close == std::string_view::npos) throw ParseError(line, "unterminated IRI");
    RdfTerm t{std::string(s.substr(0, close + 1)), std::string(s.substr(1, close - 1))};
    s.remove_prefix(close + 1);
    return t;
  }
  if (s.front() == '"') {
    std::string value;
    std::size_t i = 1;
    bool closed = false;
    for (; i < s.size(); ++i) {
      const char c = s[i];
      if (c == '\\' && i + 1 < s.size()) {
        const char n = s[++i];
        switch (n) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case 'r': value += '\r'; break;
          default: value += n;
        }
        continue;
      }
      if (c == '"') {
        closed = true;
        break;
      }
      value += c;
    }
    if (!closed) throw ParseError(line, "unterminated literal");
    std::size_t end = i + 1;
    // Language tag or datatype suffix belongs to the term.
    if (end < s.size() && s[end] == '@') {
      while (end < s.size() && s[end] != ' ' && s[end] != '\t') ++end;
    } else if (s.substr(end).starts_with("^^<")) {
      const auto close = s.find('>', end);
      if (close == std::string_view::npos) throw ParseError(line, "unterminated datatype IRI");
      end = close + 1;
    }
    RdfTerm t{std::string(s.substr(0, end)), std::move(value)};
    s.remove_prefix(end);
    return t;
  }
  if (s.starts_with("_:")) {
    std::size_t end = 2;
    while (end < s.size() && s[end] != ' ' && s[end] != '\t') ++end;
    RdfTerm t{std::string(s.substr(0, end)), std::string(s.substr(0, end))};
    s.remove_prefix(end);
    return t;
  }
  throw ParseError(line, "unexpected character '" + std::string(1, s.front()) + "'");
}

}  // namespace detail

/// Parses the subset of N-Triples made of `<s> <p> <o> .` lines where the
/// object may also be a quoted literal. Subjects and objects become nodes
/// (keyed by their term text, ids assigned from 0 in order of first
/// appearance); the predicate becomes the edge label.
inline Graph parse_ntriples_subset(std::string_view text) {
  Graph g(true);
  std::unordered_map<std::string, NodeId> ids;
  auto node_for = [&](detail::RdfTerm&& term) {
    auto [it, inserted] = ids.try_emplace(std::move(term.key), ids.size());
    if (inserted) g.add_node(it->second, std::move(term.label));
    return it->second;
  };
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    std::string_view s = line;
    detail::skip_spaces(s);
    if (s.empty() || s.front() == '#') return;
    auto subject = detail::read_rdf_term(s, line_no);
    if (subject.key.front() == '"') throw ParseError(line_no, "literal subject");
    auto predicate = detail::read_rdf_term(s, line_no);
    if (predicate.key.front() != '<') throw ParseError(line_no, "predicate must be an IRI");
    auto object = detail::read_rdf_term(s, line_no);
    detail::skip_spaces(s);
    if (s.empty() || s.front() != '.') throw ParseError(line_no, "missing trailing '.'");
    s.remove_prefix(1);
    detail::skip_spaces(s);
    if (!s.empty() && s.front() != '#') throw ParseError(line_no, "trailing content after '.'");
    const NodeId src = node_for(std::move(subject));
    const NodeId dst = node_for(std::move(object));
    g.add_edge(src, dst, std::move(predicate.label));
  });
  return g;
}

}  // namespace gvdb
