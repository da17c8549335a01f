#include "macroeval/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "json.hpp"
#include "macroeval/corpus.hpp"
#include "oracle/brute_force.hpp"

namespace macroeval {
namespace {

using Tokens = std::vector<std::string>;

CorpusCounts corpus_of(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs) {
  std::vector<SegmentCounts> segs;
  for (std::size_t i = 0; i < hyps.size(); ++i) segs.push_back(count_segment(hyps[i], refs[i]));
  return aggregate(std::move(segs));
}

const CorpusCounts& worked() {
  static const CorpusCounts c = corpus_of({{"a", "b", "c", "d"}}, {{"a", "b", "b", "c"}});
  return c;
}

std::vector<TokenizedSegment> segs_of(const std::vector<std::string>& lines) {
  std::vector<TokenizedSegment> out;
  for (const auto& l : lines) out.push_back(tokenize_13a(l));
  return out;
}

TEST(ClassScores, Examples) {
  EXPECT_NEAR(f_beta({1, 2, 1}, 1.0), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(f_beta({2, 2, 2}, 1.0), 1.0);
  EXPECT_EQ(f_beta({1, 0, 0}, 1.0), 0.0);
  // Present on both sides but never co-occurring in a segment.
  EXPECT_EQ(f_beta({1, 1, 0}, 1.0), 0.0);

  const auto scores = class_scores(worked(), 1.0);
  ASSERT_EQ(scores.size(), 4u);
  EXPECT_EQ(scores[1].type_key, "b");
  EXPECT_EQ(scores[1].precision, 1.0);
  EXPECT_EQ(scores[1].recall, 0.5);
  EXPECT_EQ(scores[3].type_key, "d");
  EXPECT_EQ(scores[3].precision, 0.0);
  EXPECT_EQ(scores[3].recall, 0.0);
}

TEST(ClassScores, RejectsNonPositiveBeta) {
  EXPECT_THROW(class_scores(worked(), 0.0), std::invalid_argument);
  EXPECT_THROW(macro_f(worked(), -1.0), std::invalid_argument);
}

TEST(MacroF, WorkedExample) {
  EXPECT_NEAR(macro_f(worked(), 1.0), (1.0 + 2.0 / 3.0 + 1.0 + 0.0) / 4.0 * 100.0, 1e-12);
  EXPECT_NEAR(oracle::macro_f({{"a", "b", "c", "d"}}, {{"a", "b", "b", "c"}}, 1.0), 66.66666666666667, 1e-12);
}

TEST(MacroF, IdentityAndDisjoint) {
  EXPECT_EQ(macro_f(corpus_of({{"x", "y", "y"}}, {{"x", "y", "y"}}), 1.0), 100.0);
  EXPECT_EQ(macro_f(corpus_of({{"x", "y"}}, {{"p", "q"}}), 1.0), 0.0);
}

TEST(MacroF, EmptyVocabularyThrows) {
  EXPECT_THROW(macro_f(corpus_of({{}}, {{}}), 1.0), Error);
}

TEST(MicroF, WorkedExample) {
  EXPECT_NEAR(micro_f(worked(), 1.0, 1.0), 75.0, 1e-12);
  EXPECT_NEAR(oracle::micro_f({{"a", "b", "c", "d"}}, {{"a", "b", "b", "c"}}, 1.0, 1.0), 75.0, 1e-12);
  EXPECT_EQ(micro_f(corpus_of({{"x", "y", "y"}}, {{"x", "y", "y"}}), 1.0, 1.0), 100.0);
}

TEST(MicroF, ZeroWeightThrows) {
  // k = 0 and no reference tokens at all.
  EXPECT_THROW(micro_f(corpus_of({{"a"}}, {{}}), 1.0, 0.0), Error);
  EXPECT_THROW(micro_f(worked(), 1.0, -1.0), std::invalid_argument);
}

TEST(MicroF, LargeKApproachesMacro) {
  EXPECT_LT(std::abs(micro_f(worked(), 1.0, 1e9) - macro_f(worked(), 1.0)), 1e-5);
}

TEST(Bleu, Identity) {
  const std::vector<std::string> lines = {"the cat sat on the mat", "a b c d e f"};
  EXPECT_EQ(bleu(segs_of(lines), segs_of(lines)), 100.0);
}

TEST(Bleu, BrevityPenalty) {
  EXPECT_NEAR(bleu(segs_of({"a b c d"}), segs_of({"a b c d e"})), 100.0 * std::exp(-0.25), 1e-12);
}

TEST(Bleu, FirstSmoothingStep) {
  // 4-gram totals 2 with no 4-gram match: p4 = 1 / (2 * 2).
  const auto st = bleu_segment_stats(Tokens{"a", "b", "c", "d", "x"}, Tokens{"a", "b", "c", "y", "d"});
  ASSERT_EQ(st.matches[3], 0);
  ASSERT_EQ(st.totals[3], 2);
  const double p1 = 4.0 / 5, p2 = 2.0 / 4, p3 = 1.0 / 3, p4 = 1.0 / (2.0 * 2);
  EXPECT_NEAR(bleu_from_stats(st), 100.0 * std::exp((std::log(p1) + std::log(p2) + std::log(p3) + std::log(p4)) / 4),
              1e-12);
}

TEST(Bleu, ShortCorpusUsesAvailableOrders) {
  // Two tokens: only unigrams and bigrams exist.
  EXPECT_NEAR(bleu(segs_of({"a b"}), segs_of({"a b"})), 100.0, 1e-12);
  EXPECT_EQ(bleu(segs_of({""}), segs_of({"a b"})), 0.0);
}

TEST(Bleu, LengthMismatchThrows) {
  EXPECT_THROW(bleu(segs_of({"a"}), segs_of({"a", "b"})), std::invalid_argument);
}

TEST(Chrf, Examples) {
  EXPECT_EQ(chrf(std::vector<std::string>{"abc def"}, std::vector<std::string>{"abc def"}, 1.0), 100.0);
  EXPECT_EQ(chrf(std::vector<std::string>{"abc"}, std::vector<std::string>{"xyz"}, 1.0), 0.0);
  EXPECT_NEAR(chrf(std::vector<std::string>{"abcd"}, std::vector<std::string>{"abce"}, 1.0),
              100.0 * (0.75 + 2.0 / 3.0 + 0.5 + 0.0) / 4.0, 1e-12);
}

TEST(ReferenceScorer, GoldenValues) {
  std::ifstream in(std::string(MACROEVAL_TEST_DATA_DIR) + "/sacrebleu_golden.json");
  ASSERT_TRUE(in);
  const auto golden = nlohmann::json::parse(in);
  for (const auto& g : golden) {
    const std::vector<std::string> hyps = g["hyps"];
    const std::vector<std::string> refs = g["refs"];
    SCOPED_TRACE(g["name"].get<std::string>());
    EXPECT_NEAR(chrf(hyps, refs, 1.0), g["chrf1"].get<double>(), 1e-9);
    if (!g["bleu"].is_null()) {
      EXPECT_NEAR(bleu(segs_of(hyps), segs_of(refs)), g["bleu"].get<double>(), 1e-9);
    }
  }
}

TEST(PerTypeReport, FrequencyOrderWithTieBreak) {
  const auto top2 = per_type_report(worked(), 1.0, ReportSort::kFreq, 2);
  ASSERT_EQ(top2.size(), 2u);
  EXPECT_EQ(top2[0].type_key, "b");
  EXPECT_EQ(top2[1].type_key, "a");

  const auto all = per_type_report(worked(), 1.0, ReportSort::kFreq, 100);
  ASSERT_EQ(all.size(), 4u);
  EXPECT_EQ(all[2].type_key, "c");
  EXPECT_EQ(all[3].type_key, "d");
}

TEST(PerTypeReport, FOrder) {
  const auto byf = per_type_report(worked(), 1.0, ReportSort::kF, 4);
  EXPECT_EQ(byf[0].type_key, "a");
  EXPECT_EQ(byf[1].type_key, "c");
  EXPECT_EQ(byf[2].type_key, "b");
  EXPECT_EQ(byf[3].type_key, "d");

  const auto perfect = per_type_report(corpus_of({{"z", "m", "a"}}, {{"a", "m", "z"}}), 1.0, ReportSort::kF, 10);
  ASSERT_EQ(perfect.size(), 3u);
  EXPECT_EQ(perfect[0].type_key, "a");
  EXPECT_EQ(perfect[2].type_key, "z");
  EXPECT_THROW(per_type_report(worked(), 1.0, ReportSort::kF, 0), std::invalid_argument);
}

TEST(Signature, Grammar) {
  MetricConfig cfg;
  cfg.lang_pair = "de-en";
  EXPECT_EQ(signature(Metric::kMacroF, cfg), std::string("macrof1+lang.de-en+numrefs.1+tok.13a+case.mixed+v.") + kVersion);
  EXPECT_EQ(signature(Metric::kMicroF, cfg),
            std::string("microf1+lang.de-en+numrefs.1+tok.13a+k.1+case.mixed+v.") + kVersion);
  EXPECT_EQ(signature(Metric::kBleu, cfg),
            std::string("bleu+lang.de-en+numrefs.1+smooth.exp+tok.13a+case.mixed+v.") + kVersion);
  cfg.beta = 0.5;
  cfg.lowercase = true;
  cfg.lang_pair.clear();
  EXPECT_EQ(signature(Metric::kChrf, cfg),
            std::string("chrf0.5+numrefs.1+numchars.6+space.false+case.lc+v.") + kVersion);
}

// ---- properties over random corpora ----

TEST(MetricsProperty, OracleEquivalence) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const auto rc = oracle::random_corpus(rng, 1, 20, 10, 8);
    const auto corpus = corpus_of(rc.hyps, rc.refs);
    for (double beta : {1.0, 0.5, 2.0}) {
      const double ma = oracle::macro_f(rc.hyps, rc.refs, beta);
      const double mi = oracle::micro_f(rc.hyps, rc.refs, beta, 1.0);
      EXPECT_LE(std::abs(macro_f(corpus, beta) - ma), 1e-12 * std::max(1.0, std::abs(ma)));
      EXPECT_LE(std::abs(micro_f(corpus, beta, 1.0) - mi), 1e-12 * std::max(1.0, std::abs(mi)));
    }
    std::vector<TokenizedSegment> h, r;
    for (std::size_t i = 0; i < rc.hyps.size(); ++i) {
      h.push_back({rc.hyps[i], 0});
      r.push_back({rc.refs[i], 0});
    }
    EXPECT_NEAR(bleu(h, r), oracle::bleu(rc.hyps, rc.refs), 1e-9);
  }
}

TEST(MetricsProperty, RangePermutationDuplication) {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 200; ++trial) {
    auto rc = oracle::random_corpus(rng, 1, 15, 12, 10);
    const auto corpus = corpus_of(rc.hyps, rc.refs);
    const double ma = macro_f(corpus, 1.0);
    const double mi = micro_f(corpus, 1.0, 1.0);
    EXPECT_GE(ma, 0.0);
    EXPECT_LE(ma, 100.0);
    EXPECT_GE(mi, 0.0);
    EXPECT_LE(mi, 100.0);

    // Same permutation on both sides.
    std::vector<std::size_t> order(rc.hyps.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Tokens> ph, pr;
    for (auto i : order) {
      ph.push_back(rc.hyps[i]);
      pr.push_back(rc.refs[i]);
    }
    const auto permuted = corpus_of(ph, pr);
    EXPECT_EQ(macro_f(permuted, 1.0), ma);
    EXPECT_EQ(micro_f(permuted, 1.0, 1.0), mi);

    auto dh = rc.hyps, dr = rc.refs;
    dh.insert(dh.end(), rc.hyps.begin(), rc.hyps.end());
    dr.insert(dr.end(), rc.refs.begin(), rc.refs.end());
    const auto dup = corpus_of(dh, dr);
    EXPECT_NEAR(macro_f(dup, 1.0), ma, 1e-12);
    // MicroF weights Refs(c)+k, so doubling only preserves it when k scales too.
    EXPECT_NEAR(micro_f(dup, 1.0, 2.0), mi, 1e-9);
  }
}

TEST(MetricsProperty, KLimit) {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rc = oracle::random_corpus(rng, 1, 20, 50, 12);
    const auto corpus = corpus_of(rc.hyps, rc.refs);
    EXPECT_LT(std::abs(micro_f(corpus, 1.0, 1e9) - macro_f(corpus, 1.0)), 1e-5);
  }
}

TEST(MetricsProperty, MacroMonotoneInMatch) {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rc = oracle::random_corpus(rng, 1, 10, 8, 8);
    auto corpus = corpus_of(rc.hyps, rc.refs);
    const double before = macro_f(corpus, 1.0);
    // Raise one class's match by one where room exists; compare through the
    // per-class formula since CorpusCounts is immutable.
    double sum = 0.0;
    bool raised = false;
    for (const auto& e : corpus.per_type()) {
      ClassStats st = e.stats;
      if (!raised && st.match < std::min(st.preds, st.refs)) {
        ++st.match;
        raised = true;
      }
      sum += f_beta(st, 1.0);
    }
    EXPECT_GE(100.0 * sum / static_cast<double>(corpus.vocabulary_size()), before - 1e-12);
  }
}

TEST(MetricsProperty, IdentityScoresExactly100) {
  std::mt19937_64 rng(505);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> lines;
    for (int i = 0; i < 5; ++i) {
      auto t = oracle::random_tokens(rng, 30, 12);
      t.insert(t.end(), {"w1", "w2", "w3", "w4"});
      lines.push_back(oracle::join(t));
    }
    const auto side = prepare_side(lines, {});
    const SystemCorpus sys(side, side);
    for (Metric m : kAllMetrics) EXPECT_EQ(corpus_score(m, sys, MetricConfig{}), 100.0) << metric_name(m);
  }
}

// More distinct characters than fit the packed single-word keys.
TEST(Chrf, LargeAlphabet) {
  std::string fwd, rev;
  std::vector<char32_t> cps;
  for (char32_t c = 0x4E00; c < 0x4E00 + 1100; ++c) cps.push_back(c);
  for (char32_t c : cps) utf8::append(fwd, c);
  for (auto it = cps.rbegin(); it != cps.rend(); ++it) utf8::append(rev, *it);
  const auto same = chrf_segment_stats(fwd, fwd);
  for (int n = 0; n < 6; ++n) {
    EXPECT_EQ(same.match[n], 1100 - n);
    EXPECT_EQ(same.hyp[n], 1100 - n);
  }
  const auto reversed = chrf_segment_stats(fwd, rev);
  EXPECT_EQ(reversed.match[0], 1100);
  for (int n = 1; n < 6; ++n) EXPECT_EQ(reversed.match[n], 0);
}

TEST(Chrf, MatchesOracleOnAscii) {
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> ch(0, 5), len(0, 14);
  auto text = [&] {
    std::string s;
    for (int i = len(rng); i > 0; --i) s += "ab c"[ch(rng) % 4];
    return s;
  };
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> h, r;
    for (int i = 0; i < 4; ++i) {
      h.push_back(text());
      r.push_back(text());
    }
    EXPECT_NEAR(chrf(h, r, 1.0), oracle::chrf(h, r, 1.0), 1e-9);
    EXPECT_NEAR(chrf(h, r, 2.0), oracle::chrf(h, r, 2.0), 1e-9);
  }
}

}  // namespace
}  // namespace macroeval
