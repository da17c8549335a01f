#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "macroeval/metrics.hpp"
#include "macroeval/tokenize.hpp"
#include "macroeval/typestats.hpp"
#include "macroeval/utf8.hpp"

namespace macroeval {

struct Preprocess {
  Tokenizer tokenizer = Tokenizer::k13a;
  bool lowercase = false;
};

/// Reference side of an evaluation, prepared once and shared by every system.
struct PreparedSide {
  std::vector<std::string> raw;  // after optional lowercasing
  std::vector<TokenizedSegment> tokens;
};

inline PreparedSide prepare_side(std::span<const std::string> lines, const Preprocess& pre) {
  PreparedSide side;
  side.raw.reserve(lines.size());
  side.tokens.reserve(lines.size());
  for (const auto& line : lines) {
    side.raw.push_back(pre.lowercase ? utf8::to_lower(line) : line);
    side.tokens.push_back(tokenize(side.raw.back(), pre.tokenizer));
  }
  return side;
}

/// Everything the four metrics need for one system against the references,
/// kept per segment so any segment can be left out cheaply.
class SystemCorpus {
 public:
  SystemCorpus(const PreparedSide& hyps, const PreparedSide& refs) {
    if (hyps.raw.size() != refs.raw.size()) {
      throw std::invalid_argument("hypothesis/reference segment count mismatch");
    }
    if (hyps.raw.empty()) throw std::invalid_argument("empty corpus");
    const std::size_t m = hyps.raw.size();

    std::vector<SegmentCounts> segs;
    segs.reserve(m);
    ngrams_.reserve(m);
    chars_.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      segs.push_back(count_segment(hyps.tokens[i].tokens, refs.tokens[i].tokens));
      ngrams_.push_back(bleu_segment_stats(hyps.tokens[i].tokens, refs.tokens[i].tokens));
      chars_.push_back(chrf_segment_stats(hyps.raw[i], refs.raw[i]));
      ngram_total_ += ngrams_.back();
      char_total_ += chars_.back();
    }
    types_ = aggregate(std::move(segs));
  }

  std::size_t size() const { return types_.size(); }
  const CorpusCounts& types() const { return types_; }
  const std::vector<NgramStats>& ngrams() const { return ngrams_; }
  const std::vector<CharStats>& chars() const { return chars_; }
  const NgramStats& ngram_total() const { return ngram_total_; }
  const CharStats& char_total() const { return char_total_; }

 private:
  CorpusCounts types_;
  std::vector<NgramStats> ngrams_;
  std::vector<CharStats> chars_;
  NgramStats ngram_total_;
  CharStats char_total_;
};

/// Corpus-level value of `m` on the 0-100 scale.
inline double corpus_score(Metric m, const SystemCorpus& sys, const MetricConfig& cfg) {
  switch (m) {
    case Metric::kMacroF:
      return macro_f(sys.types(), cfg.beta);
    case Metric::kMicroF:
      return micro_f(sys.types(), cfg.beta, cfg.k);
    case Metric::kBleu:
      return bleu_from_stats(sys.ngram_total());
    case Metric::kChrf:
      return chrf_from_stats(sys.char_total(), cfg.beta);
  }
  throw std::logic_error("unknown metric");
}

}  // namespace macroeval
