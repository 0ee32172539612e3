#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gvdb/error.hpp"
#include "gvdb/geometry.hpp"

namespace gvdb {

/// Static R-tree bulk-loaded with Sort-Tile-Recursive packing.
///
/// Nodes are stored level by level, leaves first, root last. A leaf covers
/// `count` consecutive entries starting at `first`; an inner node covers
/// `count` consecutive nodes.
template <typename T>
class PackedRTree {
public:
  struct Entry {
    Rect box;
    T value;
  };

  struct Node {
    Rect box;
    std::uint32_t first = 0;
    std::uint32_t count = 0;
    bool leaf = true;
  };

  static constexpr std::size_t kDefaultFanout = 16;

  PackedRTree() = default;

  explicit PackedRTree(std::vector<Entry> entries, std::size_t fanout = kDefaultFanout)
      : fanout_(std::max<std::size_t>(fanout, 2)), entries_(std::move(entries)) {
    if (entries_.empty()) return;
    str_sort(entries_, [](const Entry& e) -> const Rect& { return e.box; });

    std::vector<Node> level;
    for (std::size_t i = 0; i < entries_.size(); i += fanout_) {
      Node node;
      node.first = static_cast<std::uint32_t>(i);
      node.count = static_cast<std::uint32_t>(std::min(fanout_, entries_.size() - i));
      node.leaf = true;
      for (std::size_t j = i; j < i + node.count; ++j) node.box.expand(entries_[j].box);
      level.push_back(node);
    }
    while (level.size() > 1) {
      str_sort(level, [](const Node& n) -> const Rect& { return n.box; });
      const auto offset = static_cast<std::uint32_t>(nodes_.size());
      nodes_.insert(nodes_.end(), level.begin(), level.end());
      std::vector<Node> parents;
      for (std::size_t i = 0; i < level.size(); i += fanout_) {
        Node node;
        node.first = offset + static_cast<std::uint32_t>(i);
        node.count = static_cast<std::uint32_t>(std::min(fanout_, level.size() - i));
        node.leaf = false;
        for (std::size_t j = i; j < i + node.count; ++j) node.box.expand(level[j].box);
        parents.push_back(node);
      }
      level = std::move(parents);
    }
    nodes_.push_back(level.front());
  }

  /// Rebuilds a tree from serialized parts, validating every reference.
  static PackedRTree from_parts(std::vector<Node> nodes, std::vector<Entry> entries,
                                std::size_t fanout) {
    PackedRTree t;
    t.fanout_ = fanout;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Node& n = nodes[i];
      const std::size_t limit = n.leaf ? entries.size() : i;
      if (n.count == 0 || static_cast<std::size_t>(n.first) + n.count > limit) {
        throw StoreError("corrupt spatial index node " + std::to_string(i));
      }
    }
    if (nodes.empty() != entries.empty()) throw StoreError("corrupt spatial index");
    t.nodes_ = std::move(nodes);
    t.entries_ = std::move(entries);
    return t;
  }

  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t fanout() const { return fanout_; }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Entry> entries() const { return entries_; }

  Rect bounds() const { return nodes_.empty() ? Rect{} : nodes_.back().box; }

  /// Calls `fn(entry)` for every entry whose box meets the closed `window`.
  template <typename Fn>
  void query(const Rect& window, Fn&& fn) const {
    if (nodes_.empty()) return;
    std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(nodes_.size() - 1)};
    while (!stack.empty()) {
      const Node& node = nodes_[stack.back()];
      stack.pop_back();
      if (!node.box.intersects(window)) continue;
      if (node.leaf) {
        for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
          if (entries_[i].box.intersects(window)) fn(entries_[i]);
        }
      } else {
        for (std::uint32_t i = node.first; i < node.first + node.count; ++i) stack.push_back(i);
      }
    }
  }

private:
  /// Orders items into STR tiles: vertical slices by centre x, each slice
  /// sorted by centre y.
  template <typename Item, typename BoxOf>
  void str_sort(std::vector<Item>& items, BoxOf box_of) const {
    const std::size_t n = items.size();
    const auto leaves = (n + fanout_ - 1) / fanout_;
    const auto slices = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(leaves))));
    const std::size_t per_slice = slices * fanout_;
    auto cx = [&](const Item& a) { const Rect& r = box_of(a); return r.min_x + r.max_x; };
    auto cy = [&](const Item& a) { const Rect& r = box_of(a); return r.min_y + r.max_y; };
    std::stable_sort(items.begin(), items.end(),
                     [&](const Item& a, const Item& b) { return cx(a) < cx(b); });
    for (std::size_t s = 0; s < n; s += per_slice) {
      auto begin = items.begin() + static_cast<std::ptrdiff_t>(s);
      auto end = items.begin() + static_cast<std::ptrdiff_t>(std::min(n, s + per_slice));
      std::stable_sort(begin, end, [&](const Item& a, const Item& b) { return cy(a) < cy(b); });
    }
  }

  std::size_t fanout_ = kDefaultFanout;
  std::vector<Node> nodes_;
  std::vector<Entry> entries_;
};

}  // namespace gvdb
