#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "macroeval/error.hpp"

namespace macroeval {

inline constexpr double kDefaultAlpha = 0.05;

// Exact p-values are used up to this many samples when neither side has ties.
inline constexpr std::size_t kExactKendallMaxN = 8;

struct CorrelationResult {
  double tau = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  bool significant = false;
  bool exact = false;
};

struct PairCounts {
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t tied_x = 0;  // pairs tied in x (including pairs tied in both)
  std::int64_t tied_y = 0;
};

inline PairCounts count_pairs(std::span<const double> x, std::span<const double> y) {
  PairCounts pc;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0) ++pc.tied_x;
      if (dy == 0) ++pc.tied_y;
      if (dx == 0 || dy == 0) continue;
      if ((dx > 0) == (dy > 0)) {
        ++pc.concordant;
      } else {
        ++pc.discordant;
      }
    }
  }
  return pc;
}

/// Number of permutations of n items with each possible inversion count.
inline std::vector<double> inversion_distribution(std::size_t n) {
  std::vector<double> dist{1.0};
  for (std::size_t k = 2; k <= n; ++k) {
    std::vector<double> next(dist.size() + k - 1, 0.0);
    for (std::size_t i = 0; i < dist.size(); ++i) {
      for (std::size_t j = 0; j < k; ++j) next[i + j] += dist[i];
    }
    dist = std::move(next);
  }
  return dist;
}

/// Two-sided exact p-value of S = C - D for untied samples of size n.
inline double kendall_exact_p(std::int64_t s, std::size_t n) {
  const auto dist = inversion_distribution(n);
  const auto pairs = static_cast<std::int64_t>(n * (n - 1) / 2);
  double hits = 0.0;
  double total = 0.0;
  for (std::size_t inv = 0; inv < dist.size(); ++inv) {
    total += dist[inv];
    const std::int64_t s_perm = pairs - 2 * static_cast<std::int64_t>(inv);
    if (std::llabs(s_perm) >= std::llabs(s)) hits += dist[inv];
  }
  return std::min(1.0, hits / total);
}

namespace detail {

// Sums over tie groups of t(t-1), t(t-1)(t-2) and t(t-1)(2t+5).
struct TieSums {
  double t1 = 0, t2 = 0, t3 = 0;
};

inline TieSums tie_sums(std::span<const double> v) {
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  TieSums ts;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto t = static_cast<double>(j - i);
    ts.t1 += t * (t - 1);
    ts.t2 += t * (t - 1) * (t - 2);
    ts.t3 += t * (t - 1) * (2 * t + 5);
    i = j;
  }
  return ts;
}

}  // namespace detail

/// Two-sided normal approximation with tie-adjusted variance and a unit
/// continuity correction on S.
inline double kendall_normal_p(std::span<const double> x, std::span<const double> y, std::int64_t s) {
  const auto n = static_cast<double>(x.size());
  const auto tx = detail::tie_sums(x);
  const auto ty = detail::tie_sums(y);
  double var = (n * (n - 1) * (2 * n + 5) - tx.t3 - ty.t3) / 18.0;
  var += tx.t1 * ty.t1 / (2.0 * n * (n - 1));
  if (n > 2) var += tx.t2 * ty.t2 / (9.0 * n * (n - 1) * (n - 2));
  if (!(var > 0.0)) return 1.0;
  const double corrected = std::max(0.0, static_cast<double>(std::llabs(s)) - 1.0);
  return std::clamp(std::erfc(corrected / std::sqrt(2.0 * var)), 0.0, 1.0);
}

/// Kendall's tau-b with a two-sided p-value.
inline CorrelationResult kendall_tau_b(std::span<const double> x, std::span<const double> y,
                                       double alpha = kDefaultAlpha) {
  if (x.size() != y.size()) throw std::invalid_argument("kendall_tau_b: length mismatch");
  if (x.size() < 2) throw Error(ExitCode::kUndefined, "undefined correlation: fewer than 2 samples");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw Error(ExitCode::kUndefined, "undefined correlation: non-finite value");
    }
  }
  const std::size_t n = x.size();
  const auto pairs = static_cast<std::int64_t>(n * (n - 1) / 2);
  const PairCounts pc = count_pairs(x, y);
  if (pc.tied_x == pairs || pc.tied_y == pairs) {
    throw Error(ExitCode::kUndefined, "undefined correlation: constant vector");
  }

  CorrelationResult res;
  res.n = n;
  const std::int64_t s = pc.concordant - pc.discordant;
  res.tau = static_cast<double>(s) /
            std::sqrt(static_cast<double>(pairs - pc.tied_x) * static_cast<double>(pairs - pc.tied_y));
  res.tau = std::clamp(res.tau, -1.0, 1.0);
  if (n <= kExactKendallMaxN && pc.tied_x == 0 && pc.tied_y == 0) {
    res.p_value = kendall_exact_p(s, n);
    res.exact = true;
  } else {
    res.p_value = kendall_normal_p(x, y, s);
  }
  res.significant = res.p_value < alpha;
  return res;
}

// ---------------------------------------------------------------------------
// Tables of (setting x metric) correlations and their summaries.
// ---------------------------------------------------------------------------

struct MetricColumn {
  std::string name;
  std::vector<double> scores;
};

/// One evaluation setting (e.g. a language pair): human scores and metric
/// scores for the same list of systems.
struct TableRow {
  std::string setting;
  std::vector<std::string> systems;
  std::vector<double> human;
  std::vector<MetricColumn> metrics;
};

struct MetricTable {
  std::vector<TableRow> rows;
  double alpha = kDefaultAlpha;
};

struct CorrelationCell {
  std::string setting;
  std::string metric;
  std::optional<CorrelationResult> result;  // empty when undefined
  std::string error;
};

inline std::vector<CorrelationCell> correlate_table(const MetricTable& table) {
  std::vector<CorrelationCell> cells;
  for (const auto& row : table.rows) {
    for (const auto& col : row.metrics) {
      if (col.scores.size() != row.human.size()) {
        throw std::invalid_argument("metric column '" + col.name + "' length differs from human column");
      }
      CorrelationCell cell{row.setting, col.name, std::nullopt, {}};
      try {
        cell.result = kendall_tau_b(col.scores, row.human, table.alpha);
      } catch (const Error& e) {
        cell.error = e.what();
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

struct AggregateRow {
  std::string metric;
  std::size_t significant_cells = 0;
  std::optional<double> mean;
  std::optional<double> median;
  std::optional<double> sd;  // population
  int wins = 0;
};

/// Metric names in order of first appearance.
inline std::vector<std::string> metric_order(const std::vector<CorrelationCell>& cells) {
  std::vector<std::string> names;
  for (const auto& c : cells) {
    if (std::find(names.begin(), names.end(), c.metric) == names.end()) names.push_back(c.metric);
  }
  return names;
}

/// Mean/median/SD over significant cells only, plus wins per setting.
/// Missing cells count as insignificant. Tied maxima all win.
inline std::vector<AggregateRow> aggregate_correlations(const std::vector<CorrelationCell>& cells) {
  const auto names = metric_order(cells);
  std::map<std::string, std::vector<double>> taus;
  std::map<std::string, int> wins;

  std::vector<std::string> settings;
  for (const auto& c : cells) {
    if (std::find(settings.begin(), settings.end(), c.setting) == settings.end()) settings.push_back(c.setting);
    if (c.result && c.result->significant) taus[c.metric].push_back(c.result->tau);
  }
  for (const auto& setting : settings) {
    std::optional<double> best;
    for (const auto& c : cells) {
      if (c.setting != setting || !c.result || !c.result->significant) continue;
      if (!best || c.result->tau > *best) best = c.result->tau;
    }
    if (!best) continue;
    for (const auto& c : cells) {
      if (c.setting == setting && c.result && c.result->significant && c.result->tau == *best) ++wins[c.metric];
    }
  }

  std::vector<AggregateRow> out;
  for (const auto& name : names) {
    AggregateRow row;
    row.metric = name;
    row.wins = wins[name];
    auto& v = taus[name];
    row.significant_cells = v.size();
    if (!v.empty()) {
      double sum = 0.0;
      for (double t : v) sum += t;
      const double mean = sum / static_cast<double>(v.size());
      double sq = 0.0;
      for (double t : v) sq += (t - mean) * (t - mean);
      std::sort(v.begin(), v.end());
      const std::size_t mid = v.size() / 2;
      row.mean = mean;
      row.median = v.size() % 2 == 1 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
      row.sd = std::sqrt(sq / static_cast<double>(v.size()));
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace macroeval
