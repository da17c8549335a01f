#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace macroeval {

/// Per-type count triple: predicted tokens, reference tokens, clipped matches.
struct ClassStats {
  std::int64_t preds = 0;
  std::int64_t refs = 0;
  std::int64_t match = 0;

  bool is_zero() const { return preds == 0 && refs == 0 && match == 0; }

  ClassStats& operator+=(const ClassStats& o) {
    preds += o.preds;
    refs += o.refs;
    match += o.match;
    return *this;
  }
  ClassStats& operator-=(const ClassStats& o) {
    preds -= o.preds;
    refs -= o.refs;
    match -= o.match;
    return *this;
  }
  friend ClassStats operator+(ClassStats a, const ClassStats& b) { return a += b; }
  friend ClassStats operator-(ClassStats a, const ClassStats& b) { return a -= b; }
  bool operator==(const ClassStats&) const = default;
};

struct TypeEntry {
  std::string key;
  ClassStats stats;

  bool operator==(const TypeEntry&) const = default;
};

// Sorted by key, unique keys, no zero triples.
using TypeTable = std::vector<TypeEntry>;

inline const ClassStats* find_type(const TypeTable& table, std::string_view key) {
  auto it = std::lower_bound(table.begin(), table.end(), key,
                             [](const TypeEntry& e, std::string_view k) { return e.key < k; });
  return (it != table.end() && it->key == key) ? &it->stats : nullptr;
}

struct SegmentCounts {
  TypeTable per_type;
  std::int64_t hyp_len = 0;
  std::int64_t ref_len = 0;

  bool operator==(const SegmentCounts&) const = default;
};

/// Counts per type for one hypothesis/reference pair. Either side may be empty.
inline SegmentCounts count_segment(std::span<const std::string> hyp, std::span<const std::string> ref) {
  std::vector<std::string_view> h(hyp.begin(), hyp.end());
  std::vector<std::string_view> r(ref.begin(), ref.end());
  std::sort(h.begin(), h.end());
  std::sort(r.begin(), r.end());

  SegmentCounts seg;
  seg.hyp_len = static_cast<std::int64_t>(h.size());
  seg.ref_len = static_cast<std::int64_t>(r.size());

  std::size_t i = 0;
  std::size_t j = 0;
  while (i < h.size() || j < r.size()) {
    std::string_view key;
    if (j == r.size() || (i < h.size() && h[i] < r[j])) {
      key = h[i];
    } else {
      key = r[j];
    }
    ClassStats st;
    while (i < h.size() && h[i] == key) {
      ++st.preds;
      ++i;
    }
    while (j < r.size() && r[j] == key) {
      ++st.refs;
      ++j;
    }
    st.match = std::min(st.preds, st.refs);
    seg.per_type.push_back({std::string(key), st});
  }
  return seg;
}

/// Corpus-level type statistics. Keeps the per-segment counts so a segment can
/// be subtracted out again without recounting the corpus.
class CorpusCounts {
 public:
  const TypeTable& per_type() const { return per_type_; }
  const std::vector<SegmentCounts>& segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  std::size_t vocabulary_size() const { return per_type_.size(); }
  std::int64_t total_hyp_len() const { return total_hyp_len_; }
  std::int64_t total_ref_len() const { return total_ref_len_; }

  const ClassStats* find(std::string_view key) const { return find_type(per_type_, key); }

  bool operator==(const CorpusCounts&) const = default;

 private:
  friend CorpusCounts aggregate(std::vector<SegmentCounts> segments);
  friend CorpusCounts remove_segment(const CorpusCounts& corpus, std::size_t index);

  TypeTable per_type_;
  std::vector<SegmentCounts> segments_;
  std::int64_t total_hyp_len_ = 0;
  std::int64_t total_ref_len_ = 0;
};

inline CorpusCounts aggregate(std::vector<SegmentCounts> segments) {
  if (segments.empty()) throw std::invalid_argument("empty corpus");

  std::unordered_map<std::string_view, ClassStats> sums;
  CorpusCounts corpus;
  for (const auto& seg : segments) {
    for (const auto& e : seg.per_type) sums[e.key] += e.stats;
    corpus.total_hyp_len_ += seg.hyp_len;
    corpus.total_ref_len_ += seg.ref_len;
  }
  corpus.per_type_.reserve(sums.size());
  for (const auto& [key, st] : sums) {
    if (!st.is_zero()) corpus.per_type_.push_back({std::string(key), st});
  }
  std::sort(corpus.per_type_.begin(), corpus.per_type_.end(),
            [](const TypeEntry& a, const TypeEntry& b) { return a.key < b.key; });
  corpus.segments_ = std::move(segments);
  return corpus;
}

/// Leave-one-out counts: identical to aggregating every segment except `index`.
inline CorpusCounts remove_segment(const CorpusCounts& corpus, std::size_t index) {
  if (index >= corpus.size()) throw std::out_of_range("segment index out of range");
  if (corpus.size() < 2) throw std::invalid_argument("cannot remove the only segment of a corpus");

  const SegmentCounts& seg = corpus.segments_[index];
  CorpusCounts out;
  out.per_type_.reserve(corpus.per_type_.size());
  auto s = seg.per_type.begin();
  for (const auto& e : corpus.per_type_) {
    ClassStats st = e.stats;
    if (s != seg.per_type.end() && s->key == e.key) {
      st -= s->stats;
      ++s;
    }
    if (!st.is_zero()) out.per_type_.push_back({e.key, st});
  }
  out.segments_.reserve(corpus.size() - 1);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (i != index) out.segments_.push_back(corpus.segments_[i]);
  }
  out.total_hyp_len_ = corpus.total_hyp_len_ - seg.hyp_len;
  out.total_ref_len_ = corpus.total_ref_len_ - seg.ref_len;
  return out;
}

}  // namespace macroeval
