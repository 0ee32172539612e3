#pragma once

#include <charconv>
#include <cmath>
#include <memory>
#include <sstream>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gvdb/error.hpp"
#include "gvdb/service.hpp"
#include "gvdb/store.hpp"

namespace gvdb {

struct ServiceOptions {
  std::size_t chunk_size = kDefaultChunkSize;
  std::size_t default_search_limit = 50;
  std::size_t default_birdview_points = 2000;
};

namespace detail {

/// Malformed request parameter; answered with HTTP 400.
class BadRequest : public Error {
public:
  using Error::Error;
};

inline std::string required_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) throw BadRequest(std::string("missing parameter '") + name + "'");
  return req.get_param_value(name);
}

inline double parse_double(const std::string& s, const char* name) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw BadRequest(std::string("parameter '") + name + "' is not a number");
  }
}

inline std::uint64_t parse_unsigned(const std::string& s, const char* name) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw BadRequest(std::string("parameter '") + name + "' is not an unsigned integer");
  }
  return v;
}

inline int layer_param(const httplib::Request& req) {
  if (!req.has_param("layer")) return 0;
  const auto v = parse_unsigned(req.get_param_value("layer"), "layer");
  if (v > 1'000'000) throw NotFoundError("unknown layer " + std::to_string(v));
  return static_cast<int>(v);
}

inline std::size_t size_param(const httplib::Request& req, const char* name, std::size_t fallback) {
  return req.has_param(name) ? parse_unsigned(req.get_param_value(name), name) : fallback;
}

inline std::unordered_set<std::string> split_labels(const std::string& s) {
  std::unordered_set<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.insert(item);
  }
  return out;
}

inline void send_json(httplib::Response& res, const nlohmann::json& j) {
  res.set_content(j.dump(), "application/json");
}

inline void send_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(nlohmann::json{{"error", message}}.dump(), "application/json");
}

/// Runs `fn`, mapping library errors onto HTTP status codes. Unexpected
/// failures produce an opaque 500.
template <typename Fn>
auto guarded(Fn fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const BadRequest& e) {
      send_error(res, 400, e.what());
    } catch (const ConfigError& e) {
      send_error(res, 400, e.what());
    } catch (const NotFoundError& e) {
      send_error(res, 404, e.what());
    } catch (const std::exception&) {
      send_error(res, 500, "internal error");
    }
  };
}

}  // namespace detail

/// Registers the read-only query endpoints on `server`. `store` must outlive
/// the server; it is never modified, so handlers run concurrently.
inline void mount_service(httplib::Server& server, const Store& store, ServiceOptions options = {}) {
  using namespace detail;
  const Store* s = &store;

  server.Get("/api/manifest", guarded([s](const httplib::Request&, httplib::Response& res) {
    send_json(res, s->manifest_json());
  }));

  server.Get("/api/window", guarded([s, options](const httplib::Request& req, httplib::Response& res) {
    const int layer = layer_param(req);
    const Rect rect{parse_double(required_param(req, "x1"), "x1"),
                    parse_double(required_param(req, "y1"), "y1"),
                    parse_double(required_param(req, "x2"), "x2"),
                    parse_double(required_param(req, "y2"), "y2")};
    std::optional<LabelFilter> filter;
    if (req.has_param("labels")) {
      filter = LabelFilter{LabelFilter::Mode::allow, split_labels(req.get_param_value("labels"))};
    } else if (req.has_param("hide")) {
      filter = LabelFilter{LabelFilter::Mode::hide, split_labels(req.get_param_value("hide"))};
    }
    const std::size_t chunk = size_param(req, "chunk", options.chunk_size);
    const bool timings = req.has_param("timings") && req.get_param_value("timings") == "1";
    auto result = std::make_shared<ChunkedResult>(
        window_chunks(*s, layer, rect, filter ? &*filter : nullptr, chunk, timings));
    res.set_header("X-Query-Ms", std::to_string(result->query_ms));
    res.set_header("X-Serialize-Ms", std::to_string(result->serialize_ms));
    res.set_header("X-Total-Rows", std::to_string(result->total_rows));
    auto next = std::make_shared<std::size_t>(0);
    res.set_chunked_content_provider(
        "application/x-ndjson", [result, next](std::size_t, httplib::DataSink& sink) {
          if (*next < result->chunks.size()) {
            const auto& c = result->chunks[(*next)++];
            return sink.write(c.data(), c.size());
          }
          sink.write(result->summary.data(), result->summary.size());
          sink.done();
          return true;
        });
  }));

  server.Get("/api/search", guarded([s, options](const httplib::Request& req, httplib::Response& res) {
    const int layer = layer_param(req);
    const std::string q = required_param(req, "q");
    if (q.empty()) throw BadRequest("empty keyword");
    send_json(res, search_json(*s, layer, q, size_param(req, "limit", options.default_search_limit)));
  }));

  server.Get("/api/node", guarded([s](const httplib::Request& req, httplib::Response& res) {
    const int layer = layer_param(req);
    const NodeId id = parse_unsigned(required_param(req, "id"), "id");
    send_json(res, node_json(*s, layer, id));
  }));

  server.Get("/api/stats", guarded([s](const httplib::Request& req, httplib::Response& res) {
    send_json(res, stats_json(*s, layer_param(req)));
  }));

  server.Get("/api/birdview", guarded([s, options](const httplib::Request& req, httplib::Response& res) {
    const int layer = layer_param(req);
    send_json(res, birdview_json(*s, layer,
                                 size_param(req, "max_points", options.default_birdview_points)));
  }));
}

}  // namespace gvdb
