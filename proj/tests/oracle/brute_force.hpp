#pragma once

// Test-only reference implementations. They transcribe the metric
// definitions as directly as possible and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Tokens = std::vector<std::string>;

inline std::int64_t count_of(const std::string& c, const Tokens& seq) {
  return std::count(seq.begin(), seq.end(), c);
}

struct TypeTriple {
  std::int64_t preds = 0, refs = 0, match = 0;
};

// Preds(c), Refs(c), Match(c) summed over segments for every c in V_h u V_y.
inline std::map<std::string, TypeTriple> corpus_triples(const std::vector<Tokens>& hyps,
                                                        const std::vector<Tokens>& refs) {
  std::set<std::string> vocab;
  for (const auto& h : hyps) vocab.insert(h.begin(), h.end());
  for (const auto& r : refs) vocab.insert(r.begin(), r.end());
  std::map<std::string, TypeTriple> out;
  for (const auto& c : vocab) {
    TypeTriple t;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      const auto ch = count_of(c, hyps[i]);
      const auto cr = count_of(c, refs[i]);
      t.preds += ch;
      t.refs += cr;
      t.match += std::min(ch, cr);
    }
    out[c] = t;
  }
  return out;
}

inline double class_f(const TypeTriple& t, double beta) {
  if (t.preds == 0 || t.refs == 0) return 0.0;
  const double p = double(t.match) / double(t.preds);
  const double r = double(t.match) / double(t.refs);
  if (p * r == 0.0) return 0.0;
  return (1 + beta * beta) * p * r / (beta * beta * p + r);
}

inline double macro_f(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs, double beta) {
  const auto triples = corpus_triples(hyps, refs);
  double sum = 0;
  for (const auto& [c, t] : triples) sum += class_f(t, beta);
  return 100.0 * sum / double(triples.size());
}

inline double micro_f(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs, double beta, double k) {
  const auto triples = corpus_triples(hyps, refs);
  double num = 0, den = 0;
  for (const auto& [c, t] : triples) {
    num += (double(t.refs) + k) * class_f(t, beta);
    den += double(t.refs) + k;
  }
  return 100.0 * num / den;
}

inline std::map<std::string, std::int64_t> word_ngrams(const Tokens& toks, std::size_t n) {
  std::map<std::string, std::int64_t> out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    std::string key;
    for (std::size_t j = 0; j < n; ++j) key += toks[i + j] + "\x1f";
    ++out[key];
  }
  return out;
}

// Corpus BLEU with exponential smoothing; orders with no hypothesis n-grams
// are left out of the mean.
inline double bleu(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs) {
  std::int64_t hyp_len = 0, ref_len = 0;
  std::int64_t matches[4] = {}, totals[4] = {};
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    hyp_len += hyps[i].size();
    ref_len += refs[i].size();
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto h = word_ngrams(hyps[i], n);
      const auto r = word_ngrams(refs[i], n);
      for (const auto& [g, c] : h) {
        totals[n - 1] += c;
        auto it = r.find(g);
        if (it != r.end()) matches[n - 1] += std::min(c, it->second);
      }
    }
  }
  if (hyp_len == 0) return 0.0;
  double smooth = 1, logsum = 0;
  int used = 0;
  for (int n = 0; n < 4; ++n) {
    if (totals[n] == 0) continue;
    double p;
    if (matches[n] == 0) {
      smooth *= 2;
      p = 1.0 / (smooth * double(totals[n]));
    } else {
      p = double(matches[n]) / double(totals[n]);
    }
    logsum += std::log(p);
    ++used;
  }
  if (used == 0) return 0.0;
  const double bp = hyp_len < ref_len ? std::exp(1.0 - double(ref_len) / double(hyp_len)) : 1.0;
  return 100.0 * bp * std::exp(logsum / used);
}

// chrF over inputs that are plain ASCII without whitespace handling subtleties:
// every ' ' is dropped, windows are over bytes.
inline double chrf(const std::vector<std::string>& hyps, const std::vector<std::string>& refs, double beta) {
  std::int64_t h_tot[6] = {}, r_tot[6] = {}, m_tot[6] = {};
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    std::string h, r;
    for (char c : hyps[i]) if (c != ' ') h += c;
    for (char c : refs[i]) if (c != ' ') r += c;
    for (std::size_t n = 1; n <= 6; ++n) {
      std::map<std::string, std::int64_t> hc, rc;
      for (std::size_t j = 0; j + n <= h.size(); ++j) ++hc[h.substr(j, n)];
      for (std::size_t j = 0; j + n <= r.size(); ++j) ++rc[r.substr(j, n)];
      for (const auto& [g, c] : hc) {
        h_tot[n - 1] += c;
        if (rc.count(g)) m_tot[n - 1] += std::min(c, rc[g]);
      }
      for (const auto& [g, c] : rc) r_tot[n - 1] += c;
    }
  }
  double p = 0, r = 0;
  int eff = 0;
  for (int n = 0; n < 6; ++n) {
    if (h_tot[n] > 0 && r_tot[n] > 0) {
      p += double(m_tot[n]) / double(h_tot[n]);
      r += double(m_tot[n]) / double(r_tot[n]);
      ++eff;
    }
  }
  if (eff == 0) return 0.0;
  p /= eff;
  r /= eff;
  if (beta * beta * p + r == 0) return 0.0;
  return 100.0 * (1 + beta * beta) * p * r / (beta * beta * p + r);
}

// Kendall tau by looking at every pair; ties count for neither side.
inline double tau_b_pairs(const std::vector<double>& x, const std::vector<double>& y) {
  double c = 0, d = 0, tx = 0, ty = 0, n0 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (i >= j) continue;
      n0 += 1;
      const double a = (x[i] - x[j]) * (y[i] - y[j]);
      if (x[i] == x[j]) tx += 1;
      if (y[i] == y[j]) ty += 1;
      if (a > 0) c += 1;
      if (a < 0) d += 1;
    }
  }
  return (c - d) / std::sqrt((n0 - tx) * (n0 - ty));
}

// Two-sided exact p of Kendall's S for untied x, y by enumerating all n!
// orderings of y against x.
inline double exact_p_enumerate(const std::vector<double>& x, const std::vector<double>& y) {
  auto s_of = [](const std::vector<double>& a, const std::vector<double>& b) {
    long s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = i + 1; j < a.size(); ++j) {
        const double v = (a[i] - a[j]) * (b[i] - b[j]);
        s += v > 0 ? 1 : (v < 0 ? -1 : 0);
      }
    return s;
  };
  const long observed = std::labs(s_of(x, y));
  std::vector<double> perm = y;
  std::sort(perm.begin(), perm.end());
  long hits = 0, total = 0;
  do {
    ++total;
    if (std::labs(s_of(x, perm)) >= observed) ++hits;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return double(hits) / double(total);
}

// Random token corpus: up to max_segments lines, types "w0".."w{vocab-1}".
struct RandomCorpus {
  std::vector<Tokens> hyps;
  std::vector<Tokens> refs;
};

inline Tokens random_tokens(std::mt19937_64& rng, int vocab, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> type(0, vocab - 1);
  Tokens t(static_cast<std::size_t>(len(rng)));
  for (auto& s : t) s = "w" + std::to_string(type(rng));
  return t;
}

inline RandomCorpus random_corpus(std::mt19937_64& rng, int min_segments, int max_segments, int vocab,
                                  int max_len) {
  std::uniform_int_distribution<int> segs(min_segments, max_segments);
  RandomCorpus c;
  const int m = segs(rng);
  for (int i = 0; i < m; ++i) {
    c.hyps.push_back(random_tokens(rng, vocab, max_len));
    c.refs.push_back(random_tokens(rng, vocab, max_len));
  }
  // Guarantee a non-empty vocabulary.
  if (c.refs[0].empty()) c.refs[0].push_back("w0");
  return c;
}

inline std::string join(const Tokens& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ' ';
    s += t[i];
  }
  return s;
}

}  // namespace oracle
