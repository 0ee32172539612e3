#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gvdb/error.hpp"

namespace gvdb {

/// ASCII case folding; bytes >= 0x80 (UTF-8 sequences) pass through.
inline std::string fold_case(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

/// Case-insensitive substring index over a list of documents.
///
/// Every suffix of every case-folded document is kept in lexicographic
/// order (the leaf order of a generalized suffix tree), so all suffixes that
/// start with a keyword form one contiguous run found by binary search.
class SuffixIndex {
public:
  struct Suffix {
    std::uint32_t doc = 0;
    std::uint32_t offset = 0;
    friend bool operator==(const Suffix&, const Suffix&) = default;
  };

  SuffixIndex() = default;

  explicit SuffixIndex(std::span<const std::string> documents) {
    folded_.reserve(documents.size());
    std::size_t total = 0;
    for (const auto& d : documents) {
      folded_.push_back(fold_case(d));
      total += d.size();
    }
    suffixes_.reserve(total);
    for (std::uint32_t d = 0; d < folded_.size(); ++d) {
      for (std::uint32_t off = 0; off < folded_[d].size(); ++off) suffixes_.push_back({d, off});
    }
    std::sort(suffixes_.begin(), suffixes_.end(), [this](const Suffix& a, const Suffix& b) {
      const int c = view(a).compare(view(b));
      if (c != 0) return c < 0;
      return a.doc != b.doc ? a.doc < b.doc : a.offset < b.offset;
    });
  }

  /// Restores a serialized index. The suffix order is checked, not trusted.
  static SuffixIndex from_parts(std::vector<std::string> documents, std::vector<Suffix> suffixes) {
    SuffixIndex idx;
    idx.folded_.reserve(documents.size());
    for (const auto& d : documents) idx.folded_.push_back(fold_case(d));
    std::size_t total = 0;
    for (const auto& d : idx.folded_) total += d.size();
    if (suffixes.size() != total) throw StoreError("label index size mismatch");
    for (const auto& s : suffixes) {
      if (s.doc >= idx.folded_.size() || s.offset >= idx.folded_[s.doc].size()) {
        throw StoreError("label index entry out of range");
      }
    }
    idx.suffixes_ = std::move(suffixes);
    for (std::size_t i = 1; i < idx.suffixes_.size(); ++i) {
      if (idx.view(idx.suffixes_[i - 1]) > idx.view(idx.suffixes_[i])) {
        throw StoreError("label index out of order");
      }
    }
    return idx;
  }

  std::size_t document_count() const { return folded_.size(); }
  std::span<const Suffix> suffixes() const { return suffixes_; }

  /// Ascending, de-duplicated indices of the documents containing `keyword`
  /// (case-insensitive).
  std::vector<std::uint32_t> find(std::string_view keyword) const {
    if (keyword.empty()) throw ConfigError("keyword must not be empty");
    const std::string key = fold_case(keyword);
    auto prefix = [&](const Suffix& s) { return view(s).substr(0, key.size()); };
    auto lo = std::partition_point(suffixes_.begin(), suffixes_.end(),
                                   [&](const Suffix& s) { return prefix(s) < key; });
    auto hi = std::partition_point(lo, suffixes_.end(),
                                   [&](const Suffix& s) { return prefix(s) == key; });
    std::vector<std::uint32_t> docs;
    for (auto it = lo; it != hi; ++it) docs.push_back(it->doc);
    std::sort(docs.begin(), docs.end());
    docs.erase(std::unique(docs.begin(), docs.end()), docs.end());
    return docs;
  }

private:
  std::string_view view(const Suffix& s) const {
    return std::string_view(folded_[s.doc]).substr(s.offset);
  }

  std::vector<std::string> folded_;
  std::vector<Suffix> suffixes_;
};

}  // namespace gvdb
