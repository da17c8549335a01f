#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "macroeval/corpus.hpp"
#include "macroeval/error.hpp"
#include "macroeval/metrics.hpp"

namespace macroeval {

/// Corpus score of one system with any single segment removed, in O(|segment|)
/// per query for every metric.
class LeaveOneOut {
 public:
  LeaveOneOut(const SystemCorpus& sys, Metric metric, const MetricConfig& cfg)
      : sys_(&sys), metric_(metric), beta_(cfg.beta), k_(cfg.k) {
    if (sys.size() < 2) {
      throw Error(ExitCode::kTooFewSegments, "leave-one-out needs at least 2 segments");
    }
    full_ = corpus_score(metric, sys, cfg);
    if (metric == Metric::kMacroF || metric == Metric::kMicroF) index_types();
  }

  Metric metric() const { return metric_; }
  std::size_t size() const { return sys_->size(); }

  /// Score of the complete corpus (0-100).
  double full() const { return full_; }

  /// Score with segment `i` excluded (0-100).
  double without(std::size_t i) const {
    if (i >= size()) throw std::out_of_range("segment index out of range");
    switch (metric_) {
      case Metric::kMacroF:
      case Metric::kMicroF:
        return without_typed(i);
      case Metric::kBleu:
        return bleu_from_stats(sys_->ngram_total() - sys_->ngrams()[i]);
      case Metric::kChrf:
        return chrf_from_stats(sys_->char_total() - sys_->chars()[i], beta_);
    }
    throw std::logic_error("unknown metric");
  }

  /// Benefit of segment i on the 0-1 scale: M(full) - M(without i).
  double benefit(std::size_t i) const { return (full_ - without(i)) / 100.0; }

 private:
  void index_types() {
    const auto& table = sys_->types().per_type();
    f_.reserve(table.size());
    for (const auto& e : table) {
      const double f = f_beta(e.stats, beta_);
      f_.push_back(f);
      sum_f_ += f;
      sum_wf_ += (static_cast<double>(e.stats.refs) + k_) * f;
    }
    const auto& segs = sys_->types().segments();
    seg_index_.resize(segs.size());
    for (std::size_t i = 0; i < segs.size(); ++i) {
      // Segment and corpus tables are both key-sorted: a merge walk suffices.
      auto pos = table.begin();
      seg_index_[i].reserve(segs[i].per_type.size());
      for (const auto& e : segs[i].per_type) {
        pos = std::lower_bound(pos, table.end(), e.key,
                               [](const TypeEntry& t, const std::string& k) { return t.key < k; });
        seg_index_[i].push_back(static_cast<std::uint32_t>(pos - table.begin()));
      }
    }
  }

  double without_typed(std::size_t i) const {
    const auto& table = sys_->types().per_type();
    const auto& seg = sys_->types().segments()[i];
    double sum_f = sum_f_;
    double sum_wf = sum_wf_;
    auto vocab = static_cast<std::int64_t>(table.size());
    for (std::size_t j = 0; j < seg.per_type.size(); ++j) {
      const std::uint32_t t = seg_index_[i][j];
      const ClassStats& full = table[t].stats;
      const ClassStats rest = full - seg.per_type[j].stats;
      const double f_old = f_[t];
      const double w_old = static_cast<double>(full.refs) + k_;
      if (rest.is_zero()) {
        --vocab;
        sum_f -= f_old;
        sum_wf -= w_old * f_old;
      } else {
        const double f_new = f_beta(rest, beta_);
        sum_f += f_new - f_old;
        sum_wf += (static_cast<double>(rest.refs) + k_) * f_new - w_old * f_old;
      }
    }
    if (metric_ == Metric::kMacroF) {
      if (vocab == 0) throw Error(ExitCode::kUndefined, "macrof: empty vocabulary after leaving out a segment");
      return 100.0 * sum_f / static_cast<double>(vocab);
    }
    const double weight = static_cast<double>(sys_->types().total_ref_len() - seg.ref_len) +
                          k_ * static_cast<double>(vocab);
    if (!(weight > 0.0)) throw Error(ExitCode::kUndefined, "microf: total weight is zero after leaving out a segment");
    return 100.0 * sum_wf / weight;
  }

  const SystemCorpus* sys_;
  Metric metric_;
  double beta_;
  double k_;
  double full_ = 0.0;
  std::vector<double> f_;
  double sum_f_ = 0.0;
  double sum_wf_ = 0.0;
  std::vector<std::vector<std::uint32_t>> seg_index_;
};

enum class Favored { kS, kU, kNeither };

inline const char* favored_name(Favored f) {
  switch (f) {
    case Favored::kS:
      return "S";
    case Favored::kU:
      return "U";
    case Favored::kNeither:
      return "neither";
  }
  return "?";
}

struct FavoritismRecord {
  std::size_t segment_index = 0;
  double delta_s = 0.0;
  double delta_u = 0.0;
  double favoritism = 0.0;
  Favored favored = Favored::kNeither;
};

inline FavoritismRecord favoritism(const LeaveOneOut& sys_s, const LeaveOneOut& sys_u, std::size_t i) {
  if (sys_s.size() != sys_u.size()) throw Error(ExitCode::kLineMismatch, "systems differ in segment count");
  FavoritismRecord rec;
  rec.segment_index = i;
  rec.delta_s = sys_s.benefit(i);
  rec.delta_u = sys_u.benefit(i);
  rec.favoritism = rec.delta_s - rec.delta_u;
  rec.favored = rec.favoritism > 0 ? Favored::kS : (rec.favoritism < 0 ? Favored::kU : Favored::kNeither);
  return rec;
}

/// All segments ordered by descending |favoritism|, ties by index, cut to top_k.
inline std::vector<FavoritismRecord> rank_favoritism(const LeaveOneOut& sys_s, const LeaveOneOut& sys_u,
                                                     std::size_t top_k) {
  if (top_k < 1) throw std::invalid_argument("top_k must be at least 1");
  std::vector<FavoritismRecord> records;
  records.reserve(sys_s.size());
  for (std::size_t i = 0; i < sys_s.size(); ++i) records.push_back(favoritism(sys_s, sys_u, i));
  std::stable_sort(records.begin(), records.end(), [](const FavoritismRecord& a, const FavoritismRecord& b) {
    return std::abs(a.favoritism) > std::abs(b.favoritism);
  });
  if (records.size() > top_k) records.resize(top_k);
  return records;
}

}  // namespace macroeval
