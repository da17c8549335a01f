#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "macroeval/error.hpp"
#include "macroeval/tokenize.hpp"
#include "macroeval/typestats.hpp"
#include "macroeval/utf8.hpp"
#include "macroeval/version.hpp"

namespace macroeval {

// ---------------------------------------------------------------------------
// Per-type F measure, macro and micro averages.
// ---------------------------------------------------------------------------

/// F_beta of a single type. Zero whenever the type never matched, which covers
/// types seen on only one side.
inline double f_beta(const ClassStats& st, double beta) {
  if (st.match == 0) return 0.0;
  const double p = static_cast<double>(st.match) / static_cast<double>(st.preds);
  const double r = static_cast<double>(st.match) / static_cast<double>(st.refs);
  const double b2 = beta * beta;
  return (1.0 + b2) * p * r / (b2 * p + r);
}

struct ClassScore {
  std::string type_key;
  ClassStats stats;
  double precision = 0.0;
  double recall = 0.0;
  double f_beta = 0.0;
};

inline ClassScore score_class(const TypeEntry& e, double beta) {
  ClassScore cs{e.key, e.stats, 0.0, 0.0, 0.0};
  if (e.stats.match > 0) {
    cs.precision = static_cast<double>(e.stats.match) / static_cast<double>(e.stats.preds);
    cs.recall = static_cast<double>(e.stats.match) / static_cast<double>(e.stats.refs);
    cs.f_beta = f_beta(e.stats, beta);
  }
  return cs;
}

inline void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive");
}

/// One score per type in the corpus vocabulary, in key order.
inline std::vector<ClassScore> class_scores(const CorpusCounts& corpus, double beta) {
  check_beta(beta);
  std::vector<ClassScore> out;
  out.reserve(corpus.vocabulary_size());
  for (const auto& e : corpus.per_type()) out.push_back(score_class(e, beta));
  return out;
}

/// Mean of per-type F over the vocabulary, on the 0-100 scale.
inline double macro_f(const CorpusCounts& corpus, double beta) {
  check_beta(beta);
  if (corpus.vocabulary_size() == 0) throw Error(ExitCode::kUndefined, "macrof: empty vocabulary");
  double sum = 0.0;
  for (const auto& e : corpus.per_type()) sum += f_beta(e.stats, beta);
  return 100.0 * sum / static_cast<double>(corpus.vocabulary_size());
}

/// Per-type F weighted by Refs(c) + k, on the 0-100 scale.
inline double micro_f(const CorpusCounts& corpus, double beta, double k) {
  check_beta(beta);
  if (!(k >= 0.0) || !std::isfinite(k)) throw std::invalid_argument("k must be non-negative");
  double num = 0.0;
  double den = 0.0;
  for (const auto& e : corpus.per_type()) {
    const double w = static_cast<double>(e.stats.refs) + k;
    num += w * f_beta(e.stats, beta);
    den += w;
  }
  if (!(den > 0.0)) throw Error(ExitCode::kUndefined, "microf: total weight is zero");
  return 100.0 * num / den;
}

enum class ReportSort { kFreq, kF };

/// Per-type scores ordered by descending Refs(c) or descending F, ties by key.
inline std::vector<ClassScore> per_type_report(const CorpusCounts& corpus, double beta, ReportSort sort,
                                               std::size_t top) {
  if (top < 1) throw std::invalid_argument("top must be at least 1");
  auto scores = class_scores(corpus, beta);
  if (sort == ReportSort::kFreq) {
    std::stable_sort(scores.begin(), scores.end(), [](const ClassScore& a, const ClassScore& b) {
      return a.stats.refs > b.stats.refs;
    });
  } else {
    std::stable_sort(scores.begin(), scores.end(),
                     [](const ClassScore& a, const ClassScore& b) { return a.f_beta > b.f_beta; });
  }
  if (scores.size() > top) scores.resize(top);
  return scores;
}

// ---------------------------------------------------------------------------
// Packed n-gram keys shared by the BLEU and chrF counters.
// ---------------------------------------------------------------------------

namespace detail {

struct PackedKey {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;
  auto operator<=>(const PackedKey&) const = default;
};

// Size of the multiset intersection of two sorted ranges.
template <typename Key>
std::int64_t clipped_matches(const std::vector<Key>& a, const std::vector<Key>& b) {
  std::int64_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// BLEU
// ---------------------------------------------------------------------------

inline constexpr int kBleuOrder = 4;

struct NgramStats {
  std::array<std::int64_t, kBleuOrder> matches{};
  std::array<std::int64_t, kBleuOrder> totals{};
  std::int64_t hyp_len = 0;
  std::int64_t ref_len = 0;

  NgramStats& operator+=(const NgramStats& o) {
    for (int n = 0; n < kBleuOrder; ++n) {
      matches[n] += o.matches[n];
      totals[n] += o.totals[n];
    }
    hyp_len += o.hyp_len;
    ref_len += o.ref_len;
    return *this;
  }
  NgramStats& operator-=(const NgramStats& o) {
    for (int n = 0; n < kBleuOrder; ++n) {
      matches[n] -= o.matches[n];
      totals[n] -= o.totals[n];
    }
    hyp_len -= o.hyp_len;
    ref_len -= o.ref_len;
    return *this;
  }
  friend NgramStats operator-(NgramStats a, const NgramStats& b) { return a -= b; }
  bool operator==(const NgramStats&) const = default;
};

/// Clipped 1..4-gram matches and hypothesis n-gram totals for one segment.
inline NgramStats bleu_segment_stats(std::span<const std::string> hyp, std::span<const std::string> ref) {
  std::unordered_map<std::string_view, std::uint32_t> ids;
  ids.reserve(hyp.size() + ref.size());
  auto to_ids = [&ids](std::span<const std::string> toks) {
    std::vector<std::uint32_t> out;
    out.reserve(toks.size());
    for (const auto& t : toks) {
      auto [it, inserted] = ids.try_emplace(t, static_cast<std::uint32_t>(ids.size() + 1));
      out.push_back(it->second);
    }
    return out;
  };
  const auto h = to_ids(hyp);
  const auto r = to_ids(ref);

  auto grams = [](const std::vector<std::uint32_t>& seq, std::size_t n) {
    std::vector<detail::PackedKey> keys;
    if (seq.size() < n) return keys;
    keys.reserve(seq.size() - n + 1);
    for (std::size_t i = 0; i + n <= seq.size(); ++i) {
      std::array<std::uint64_t, 4> w{};
      for (std::size_t k = 0; k < n; ++k) w[k] = seq[i + k];
      keys.push_back({w[2] | (w[3] << 32), w[0] | (w[1] << 32)});
    }
    std::sort(keys.begin(), keys.end());
    return keys;
  };

  NgramStats st;
  st.hyp_len = static_cast<std::int64_t>(h.size());
  st.ref_len = static_cast<std::int64_t>(r.size());
  for (int n = 1; n <= kBleuOrder; ++n) {
    const auto hk = grams(h, static_cast<std::size_t>(n));
    const auto rk = grams(r, static_cast<std::size_t>(n));
    st.totals[n - 1] = static_cast<std::int64_t>(hk.size());
    st.matches[n - 1] = detail::clipped_matches(hk, rk);
  }
  return st;
}

/// Corpus BLEU (0-100) from summed statistics with exponential smoothing.
/// Orders with no hypothesis n-grams are left out of the geometric mean.
inline double bleu_from_stats(const NgramStats& st) {
  if (st.hyp_len <= 0) return 0.0;
  double smooth = 1.0;
  double log_sum = 0.0;
  int included = 0;
  for (int n = 0; n < kBleuOrder; ++n) {
    if (st.totals[n] == 0) continue;
    double p;
    if (st.matches[n] == 0) {
      smooth *= 2.0;
      p = 1.0 / (smooth * static_cast<double>(st.totals[n]));
    } else {
      p = static_cast<double>(st.matches[n]) / static_cast<double>(st.totals[n]);
    }
    log_sum += std::log(p);
    ++included;
  }
  if (included == 0) return 0.0;
  const double bp =
      st.hyp_len < st.ref_len
          ? std::exp(1.0 - static_cast<double>(st.ref_len) / static_cast<double>(st.hyp_len))
          : 1.0;
  return 100.0 * bp * std::exp(log_sum / included);
}

inline double bleu(std::span<const TokenizedSegment> hyps, std::span<const TokenizedSegment> refs) {
  if (hyps.size() != refs.size()) throw std::invalid_argument("bleu: hypothesis/reference count mismatch");
  if (hyps.empty()) throw std::invalid_argument("bleu: empty corpus");
  NgramStats total;
  for (std::size_t i = 0; i < hyps.size(); ++i) total += bleu_segment_stats(hyps[i].tokens, refs[i].tokens);
  return bleu_from_stats(total);
}

// ---------------------------------------------------------------------------
// chrF
// ---------------------------------------------------------------------------

inline constexpr int kChrfOrder = 6;

struct CharStats {
  std::array<std::int64_t, kChrfOrder> hyp{};
  std::array<std::int64_t, kChrfOrder> ref{};
  std::array<std::int64_t, kChrfOrder> match{};

  CharStats& operator+=(const CharStats& o) {
    for (int n = 0; n < kChrfOrder; ++n) {
      hyp[n] += o.hyp[n];
      ref[n] += o.ref[n];
      match[n] += o.match[n];
    }
    return *this;
  }
  CharStats& operator-=(const CharStats& o) {
    for (int n = 0; n < kChrfOrder; ++n) {
      hyp[n] -= o.hyp[n];
      ref[n] -= o.ref[n];
      match[n] -= o.match[n];
    }
    return *this;
  }
  friend CharStats operator-(CharStats a, const CharStats& b) { return a -= b; }
  bool operator==(const CharStats&) const = default;
};

/// Character 1..6-gram counts with whitespace removed.
inline CharStats chrf_segment_stats(std::string_view hyp, std::string_view ref) {
  const std::u32string h = utf8::to_u32(utf8::remove_whitespace(hyp));
  const std::u32string r = utf8::to_u32(utf8::remove_whitespace(ref));

  // Characters are renumbered per segment in order of appearance. With fewer
  // than 1024 distinct ones a 6-gram packs into a single 64-bit key.
  constexpr std::uint64_t kNarrowAlphabet = (1u << 10) - 1;
  std::array<std::uint16_t, 128> ascii{};
  std::unordered_map<char32_t, std::uint64_t> other;
  std::uint64_t next_id = 0;
  auto id_of = [&](char32_t c) -> std::uint64_t {
    if (c < 128) {
      if (ascii[c] == 0) ascii[c] = static_cast<std::uint16_t>(++next_id);
      return ascii[c];
    }
    auto [it, fresh] = other.try_emplace(c, next_id + 1);
    if (fresh) ++next_id;
    return it->second;
  };
  std::vector<std::uint64_t> hi(h.size()), ri(r.size());
  for (std::size_t i = 0; i < h.size(); ++i) hi[i] = id_of(h[i]);
  for (std::size_t i = 0; i < r.size(); ++i) ri[i] = id_of(r[i]);
  const bool narrow = next_id <= kNarrowAlphabet;
  if (!narrow) {
    hi.assign(h.begin(), h.end());
    ri.assign(r.begin(), r.end());
  }

  auto wide_grams = [](const std::vector<std::uint64_t>& s, std::size_t n) {
    std::vector<detail::PackedKey> keys;
    if (s.size() < n) return keys;
    keys.reserve(s.size() - n + 1);
    for (std::size_t i = 0; i + n <= s.size(); ++i) {
      std::array<std::uint64_t, 6> c{};
      for (std::size_t k = 0; k < n; ++k) c[k] = s[i + k];
      keys.push_back({c[3] | (c[4] << 21) | (c[5] << 42), c[0] | (c[1] << 21) | (c[2] << 42)});
    }
    std::sort(keys.begin(), keys.end());
    return keys;
  };

  CharStats st;
  for (int n = 1; n <= kChrfOrder; ++n) {
    const auto order = static_cast<std::size_t>(n);
    st.hyp[n - 1] = static_cast<std::int64_t>(h.size() >= order ? h.size() - order + 1 : 0);
    st.ref[n - 1] = static_cast<std::int64_t>(r.size() >= order ? r.size() - order + 1 : 0);
  }
  if (!narrow) {
    for (int n = 1; n <= kChrfOrder; ++n) {
      const auto order = static_cast<std::size_t>(n);
      st.match[n - 1] = detail::clipped_matches(wide_grams(hi, order), wide_grams(ri, order));
    }
    return st;
  }

  // Every position starts a window of up to six ids in bits 60..1; bit 0
  // marks the reference side. After one sort
  // the n-grams of each order are runs sharing the top 10n bits. Windows
  // shorter than n have a zero id in slot n and are skipped.
  std::vector<std::uint64_t> keys;
  keys.reserve(hi.size() + ri.size());
  auto windows = [&keys](const std::vector<std::uint64_t>& s, std::uint64_t side) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::uint64_t k = 0;
      const std::size_t end = std::min(s.size(), i + kChrfOrder);
      for (std::size_t j = i; j < end; ++j) k |= s[j] << (51 - 10 * (j - i));
      keys.push_back(k | side);
    }
  };
  windows(hi, 0);
  windows(ri, 1);
  std::sort(keys.begin(), keys.end());
  constexpr std::uint64_t kAllSlots = ((std::uint64_t{1} << 61) - 1) & ~std::uint64_t{1};
  for (int n = 1; n <= kChrfOrder; ++n) {
    const std::uint64_t prefix = kAllSlots & ~((std::uint64_t{1} << (61 - 10 * n)) - 1);
    const int last_slot = 51 - 10 * (n - 1);
    std::int64_t match = 0;
    for (std::size_t i = 0; i < keys.size();) {
      const std::uint64_t group = keys[i] & prefix;
      std::int64_t in_hyp = 0;
      std::int64_t in_ref = 0;
      for (; i < keys.size() && (keys[i] & prefix) == group; ++i) {
        ((keys[i] & 1) ? in_ref : in_hyp) += 1;
      }
      if (((group >> last_slot) & 1023) != 0) match += std::min(in_hyp, in_ref);
    }
    st.match[n - 1] = match;
  }
  return st;
}

/// chrF_beta (0-100): precision and recall averaged over the orders present
/// on both sides, then combined.
inline double chrf_from_stats(const CharStats& st, double beta) {
  check_beta(beta);
  double avg_p = 0.0;
  double avg_r = 0.0;
  int effective = 0;
  for (int n = 0; n < kChrfOrder; ++n) {
    if (st.hyp[n] > 0 && st.ref[n] > 0) {
      avg_p += static_cast<double>(st.match[n]) / static_cast<double>(st.hyp[n]);
      avg_r += static_cast<double>(st.match[n]) / static_cast<double>(st.ref[n]);
      ++effective;
    }
  }
  if (effective == 0) return 0.0;
  avg_p /= effective;
  avg_r /= effective;
  const double b2 = beta * beta;
  const double den = b2 * avg_p + avg_r;
  if (den == 0.0) return 0.0;
  return 100.0 * (1.0 + b2) * avg_p * avg_r / den;
}

inline double chrf(std::span<const std::string> hyps, std::span<const std::string> refs, double beta) {
  if (hyps.size() != refs.size()) throw std::invalid_argument("chrf: hypothesis/reference count mismatch");
  if (hyps.empty()) throw std::invalid_argument("chrf: empty corpus");
  CharStats total;
  for (std::size_t i = 0; i < hyps.size(); ++i) total += chrf_segment_stats(hyps[i], refs[i]);
  return chrf_from_stats(total, beta);
}

// ---------------------------------------------------------------------------
// Named scores and signatures
// ---------------------------------------------------------------------------

enum class Metric { kMacroF, kMicroF, kBleu, kChrf };

inline constexpr std::array<Metric, 4> kAllMetrics = {Metric::kMacroF, Metric::kMicroF, Metric::kBleu,
                                                      Metric::kChrf};

inline const char* metric_name(Metric m) {
  switch (m) {
    case Metric::kMacroF:
      return "macrof";
    case Metric::kMicroF:
      return "microf";
    case Metric::kBleu:
      return "bleu";
    case Metric::kChrf:
      return "chrf";
  }
  return "?";
}

inline std::optional<Metric> parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics) {
    if (name == metric_name(m)) return m;
  }
  return std::nullopt;
}

struct MetricConfig {
  double beta = 1.0;
  double k = 1.0;
  Tokenizer tokenizer = Tokenizer::k13a;
  bool lowercase = false;
  std::string lang_pair;  // "xx-yy", metadata only; empty when unknown
};

struct MetricScore {
  Metric metric = Metric::kMacroF;
  double value = 0.0;
  double beta = 1.0;
  double k = 1.0;
  std::string signature;
};

// Shortest round-trip decimal form.
inline std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

inline std::string signature(Metric m, const MetricConfig& cfg) {
  std::string s = metric_name(m);
  if (m != Metric::kBleu) s += format_number(cfg.beta);
  if (!cfg.lang_pair.empty()) s += "+lang." + cfg.lang_pair;
  s += "+numrefs.1";
  if (m == Metric::kBleu) s += "+smooth.exp";
  if (m == Metric::kChrf) {
    s += "+numchars.6+space.false";
  } else {
    s += std::string("+tok.") + tokenizer_name(cfg.tokenizer);
  }
  if (m == Metric::kMicroF) s += "+k." + format_number(cfg.k);
  s += cfg.lowercase ? "+case.lc" : "+case.mixed";
  s += std::string("+v.") + kVersion;
  return s;
}

inline MetricScore make_score(Metric m, double value, const MetricConfig& cfg) {
  return {m, value, cfg.beta, cfg.k, signature(m, cfg)};
}

}  // namespace macroeval
