#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "macroeval/corpus.hpp"
#include "macroeval/error.hpp"
#include "macroeval/favoritism.hpp"
#include "macroeval/io.hpp"
#include "macroeval/metrics.hpp"
#include "macroeval/rankstats.hpp"
#include "macroeval/tokenize.hpp"
#include "macroeval/version.hpp"

// Command implementations behind the `macroeval` executable. Each command
// returns its complete output as a string so that nothing is printed when it
// fails part way.
namespace macroeval::cli {

using Json = nlohmann::ordered_json;

enum class OutputFormat { kText, kJson, kTsv };

inline std::optional<OutputFormat> parse_output(std::string_view s) {
  if (s == "text") return OutputFormat::kText;
  if (s == "json") return OutputFormat::kJson;
  if (s == "tsv") return OutputFormat::kTsv;
  return std::nullopt;
}

struct CommonOptions {
  std::string tokenizer = "13a";
  bool lowercase = false;
  OutputFormat output = OutputFormat::kText;
  bool color = false;
};

struct ScoreRequest {
  std::string ref_path;
  std::vector<std::string> hyp_paths;
  std::vector<Metric> metrics{Metric::kMacroF, Metric::kMicroF, Metric::kBleu, Metric::kChrf};
  double beta = 1.0;
  double k = 1.0;
  std::string lang_pair;
  CommonOptions common;
};

struct FavoritismRequest {
  std::string ref_path;
  std::string sys_s_path;
  std::string sys_u_path;
  Metric metric = Metric::kMacroF;
  std::size_t top_k = 10;
  double beta = 1.0;
  double k = 1.0;
  CommonOptions common;
};

struct CorrelateRequest {
  std::vector<std::string> inputs;  // table files or directories of *.tsv
  double alpha = kDefaultAlpha;
  CommonOptions common;
};

struct ReportTypesRequest {
  std::string ref_path;
  std::string hyp_path;
  ReportSort sort = ReportSort::kFreq;
  std::size_t top = 500;
  double beta = 1.0;
  CommonOptions common;
};

namespace detail {

inline Tokenizer check_tokenizer(const std::string& name) {
  auto tok = parse_tokenizer(name);
  if (!tok) throw Error(ExitCode::kUnsupportedTokenizer, "unsupported tokenizer: " + name);
  return *tok;
}

inline void check_beta_k(double beta, double k) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(ExitCode::kUsage, "--beta must be positive");
  if (!(k >= 0.0) || !std::isfinite(k)) throw Error(ExitCode::kUsage, "--k must be non-negative");
}

inline void check_lang_pair(const std::string& lp) {
  if (lp.empty()) return;
  const auto dash = lp.find('-');
  auto alpha = [](std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
      return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    });
  };
  if (dash == std::string::npos || !alpha(std::string_view(lp).substr(0, dash)) ||
      !alpha(std::string_view(lp).substr(dash + 1))) {
    throw Error(ExitCode::kUsage, "--langpair must look like xx-yy");
  }
}

inline std::string bold(const std::string& s, bool color) { return color ? "\x1b[1m" + s + "\x1b[0m" : s; }

inline void check_aligned(const std::string& ref_path, std::size_t ref_lines, const std::string& other_path,
                          std::size_t other_lines) {
  if (ref_lines != other_lines) {
    throw Error(ExitCode::kLineMismatch, "line count mismatch: " + ref_path + " has " + std::to_string(ref_lines) +
                                             " lines, " + other_path + " has " + std::to_string(other_lines));
  }
}

inline Json common_config(const CommonOptions& c) {
  Json j;
  j["tokenizer"] = c.tokenizer;
  j["lowercase"] = c.lowercase;
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

inline std::string cmd_score(const ScoreRequest& req) {
  const Tokenizer tok = detail::check_tokenizer(req.common.tokenizer);
  detail::check_beta_k(req.beta, req.k);
  detail::check_lang_pair(req.lang_pair);
  if (req.metrics.empty()) throw Error(ExitCode::kUsage, "no metrics requested");
  if (req.hyp_paths.empty()) throw Error(ExitCode::kUsage, "no hypothesis files given");

  const auto ref_lines = io::read_segments(req.ref_path);
  std::vector<std::vector<std::string>> hyp_lines;
  for (const auto& path : req.hyp_paths) {
    hyp_lines.push_back(io::read_segments(path));
    detail::check_aligned(req.ref_path, ref_lines.size(), path, hyp_lines.back().size());
  }
  if (ref_lines.empty()) {
    throw Error(ExitCode::kLineMismatch, "empty corpus: " + req.ref_path + " has 0 lines");
  }

  const Preprocess pre{tok, req.common.lowercase};
  const MetricConfig cfg{req.beta, req.k, tok, req.common.lowercase, req.lang_pair};
  const PreparedSide refs = prepare_side(ref_lines, pre);

  std::vector<std::vector<MetricScore>> results;
  for (const auto& lines : hyp_lines) {
    const SystemCorpus sys(prepare_side(lines, pre), refs);
    std::vector<MetricScore> scores;
    for (Metric m : req.metrics) scores.push_back(make_score(m, corpus_score(m, sys, cfg), cfg));
    results.push_back(std::move(scores));
  }

  std::ostringstream out;
  switch (req.common.output) {
    case OutputFormat::kText:
      for (std::size_t h = 0; h < results.size(); ++h) {
        for (const auto& s : results[h]) {
          if (results.size() > 1) out << req.hyp_paths[h] << ": ";
          out << s.signature << " = " << detail::bold(io::fixed(s.value, 3), req.common.color) << '\n';
        }
      }
      break;
    case OutputFormat::kTsv:
      out << "hyp\tmetric\tvalue\tsignature\n";
      for (std::size_t h = 0; h < results.size(); ++h) {
        for (const auto& s : results[h]) {
          out << io::tsv_field(req.hyp_paths[h]) << '\t' << metric_name(s.metric) << '\t' << io::fixed(s.value, 3)
              << '\t' << s.signature << '\n';
        }
      }
      break;
    case OutputFormat::kJson: {
      Json j;
      j["version"] = kVersion;
      Json config = detail::common_config(req.common);
      config["beta"] = req.beta;
      config["k"] = req.k;
      config["langpair"] = req.lang_pair;
      config["ref"] = req.ref_path;
      j["config"] = config;
      Json files = Json::array();
      for (std::size_t h = 0; h < results.size(); ++h) {
        Json scores = Json::array();
        for (const auto& s : results[h]) {
          Json sj;
          sj["metric"] = metric_name(s.metric);
          sj["value"] = s.value;
          sj["signature"] = s.signature;
          scores.push_back(sj);
        }
        Json fj;
        fj["hyp"] = req.hyp_paths[h];
        fj["scores"] = scores;
        files.push_back(fj);
      }
      j["results"] = files;
      out << j.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// favoritism
// ---------------------------------------------------------------------------

inline std::string cmd_favoritism(const FavoritismRequest& req) {
  const Tokenizer tok = detail::check_tokenizer(req.common.tokenizer);
  detail::check_beta_k(req.beta, req.k);
  if (req.top_k < 1) throw Error(ExitCode::kUsage, "--top must be at least 1");

  const auto ref_lines = io::read_segments(req.ref_path);
  const auto s_lines = io::read_segments(req.sys_s_path);
  const auto u_lines = io::read_segments(req.sys_u_path);
  detail::check_aligned(req.ref_path, ref_lines.size(), req.sys_s_path, s_lines.size());
  detail::check_aligned(req.ref_path, ref_lines.size(), req.sys_u_path, u_lines.size());
  if (ref_lines.size() < 2) {
    throw Error(ExitCode::kTooFewSegments,
                "favoritism needs at least 2 segments, got " + std::to_string(ref_lines.size()));
  }

  const Preprocess pre{tok, req.common.lowercase};
  const MetricConfig cfg{req.beta, req.k, tok, req.common.lowercase, {}};
  const PreparedSide refs = prepare_side(ref_lines, pre);
  const SystemCorpus sys_s(prepare_side(s_lines, pre), refs);
  const SystemCorpus sys_u(prepare_side(u_lines, pre), refs);
  const LeaveOneOut loo_s(sys_s, req.metric, cfg);
  const LeaveOneOut loo_u(sys_u, req.metric, cfg);
  const auto records = rank_favoritism(loo_s, loo_u, req.top_k);

  std::ostringstream out;
  switch (req.common.output) {
    case OutputFormat::kTsv:
      out << "index\tdelta_s\tdelta_u\tfavoritism\tfavored\tref\thyp_s\thyp_u\n";
      for (const auto& r : records) {
        const std::size_t i = r.segment_index;
        out << i << '\t' << io::fixed(r.delta_s, 5) << '\t' << io::fixed(r.delta_u, 5) << '\t'
            << io::fixed(r.favoritism, 5) << '\t' << favored_name(r.favored) << '\t' << io::tsv_field(ref_lines[i])
            << '\t' << io::tsv_field(s_lines[i]) << '\t' << io::tsv_field(u_lines[i]) << '\n';
      }
      break;
    case OutputFormat::kText: {
      out << "metric " << metric_name(req.metric) << ": S = " << io::fixed(loo_s.full(), 3)
          << ", U = " << io::fixed(loo_u.full(), 3) << '\n';
      std::size_t rank = 0;
      for (const auto& r : records) {
        const std::size_t i = r.segment_index;
        out << '\n'
            << '#' << ++rank << "  segment " << i << "  favoritism "
            << detail::bold(io::fixed(r.favoritism, 5), req.common.color) << "  favors " << favored_name(r.favored)
            << "  (delta_s " << io::fixed(r.delta_s, 5) << ", delta_u " << io::fixed(r.delta_u, 5) << ")\n"
            << "  ref:   " << ref_lines[i] << '\n'
            << "  hyp_s: " << s_lines[i] << '\n'
            << "  hyp_u: " << u_lines[i] << '\n';
      }
      break;
    }
    case OutputFormat::kJson: {
      Json j;
      j["version"] = kVersion;
      Json config = detail::common_config(req.common);
      config["metric"] = metric_name(req.metric);
      config["beta"] = req.beta;
      config["k"] = req.k;
      config["top"] = req.top_k;
      j["config"] = config;
      j["signature"] = signature(req.metric, cfg);
      j["full"] = Json{{"s", loo_s.full()}, {"u", loo_u.full()}};
      Json recs = Json::array();
      for (const auto& r : records) {
        const std::size_t i = r.segment_index;
        Json rj;
        rj["index"] = i;
        rj["delta_s"] = r.delta_s;
        rj["delta_u"] = r.delta_u;
        rj["favoritism"] = r.favoritism;
        rj["favored"] = favored_name(r.favored);
        rj["ref"] = ref_lines[i];
        rj["hyp_s"] = s_lines[i];
        rj["hyp_u"] = u_lines[i];
        recs.push_back(rj);
      }
      j["records"] = recs;
      out << j.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// correlate
// ---------------------------------------------------------------------------

inline std::vector<std::string> expand_table_inputs(const std::vector<std::string>& inputs) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  for (const auto& in : inputs) {
    std::error_code ec;
    if (fs::is_directory(in, ec)) {
      std::vector<std::string> found;
      for (const auto& entry : fs::directory_iterator(in)) {
        if (entry.is_regular_file() && entry.path().extension() == ".tsv") found.push_back(entry.path().string());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(in, ec)) {
      files.push_back(in);
    } else {
      throw Error(ExitCode::kMissingFile, "cannot open file: " + in);
    }
  }
  if (files.empty()) throw Error(ExitCode::kMissingFile, "no .tsv table files found");
  return files;
}

inline std::string cmd_correlate(const CorrelateRequest& req) {
  if (!(req.alpha > 0.0 && req.alpha < 1.0)) throw Error(ExitCode::kUsage, "--alpha must be in (0, 1)");
  MetricTable table;
  table.alpha = req.alpha;
  for (const auto& path : expand_table_inputs(req.inputs)) {
    const std::string text = io::read_file(path);
    table.rows.push_back(io::parse_table(text, std::filesystem::path(path).stem().string(), path));
  }
  const auto cells = correlate_table(table);
  const auto aggregates = aggregate_correlations(cells);
  const auto metrics = metric_order(cells);

  auto cell_at = [&](const std::string& setting, const std::string& metric) -> const CorrelationCell* {
    for (const auto& c : cells) {
      if (c.setting == setting && c.metric == metric) return &c;
    }
    return nullptr;
  };
  auto opt = [](const std::optional<double>& v) { return v ? io::fixed(*v, 3) : std::string("n/a"); };

  std::ostringstream out;
  switch (req.common.output) {
    case OutputFormat::kText: {
      std::size_t width = 7;
      for (const auto& r : table.rows) width = std::max(width, r.setting.size());
      auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.append(w - s.size(), ' ');
        return s;
      };
      out << pad("setting", width);
      for (const auto& m : metrics) out << "  " << pad(m, 8);
      out << '\n';
      for (const auto& r : table.rows) {
        out << pad(r.setting, width);
        for (const auto& m : metrics) {
          const auto* c = cell_at(r.setting, m);
          std::string v = "-";
          if (c && c->result) {
            v = io::fixed(c->result->tau, 3);
            if (!c->result->significant) v = "x" + v;
          } else if (c) {
            v = "n/a";
          }
          out << "  " << pad(v, 8);
        }
        out << '\n';
      }
      const std::string rule(width + metrics.size() * 10, '-');
      out << rule << '\n';
      auto stat_row = [&](const char* label, auto getter) {
        out << pad(label, width);
        for (const auto& a : aggregates) out << "  " << pad(getter(a), 8);
        out << '\n';
      };
      stat_row("Mean", [&](const AggregateRow& a) { return opt(a.mean); });
      stat_row("Median", [&](const AggregateRow& a) { return opt(a.median); });
      stat_row("SD", [&](const AggregateRow& a) { return opt(a.sd); });
      stat_row("Wins", [&](const AggregateRow& a) { return detail::bold(std::to_string(a.wins), req.common.color); });
      out << "\nx = not significant at alpha=" << format_number(req.alpha)
          << "; excluded from Mean, Median, SD and Wins\n";
      break;
    }
    case OutputFormat::kTsv:
      out << "setting\tmetric\ttau\tp_value\tn\tsignificant\n";
      for (const auto& c : cells) {
        out << io::tsv_field(c.setting) << '\t' << io::tsv_field(c.metric) << '\t';
        if (c.result) {
          out << io::fixed(c.result->tau, 3) << '\t' << io::fixed(c.result->p_value, 5) << '\t' << c.result->n << '\t'
              << (c.result->significant ? "true" : "false") << '\n';
        } else {
          out << "n/a\tn/a\tn/a\tfalse\n";
        }
      }
      out << "\nmetric\tmean\tmedian\tsd\twins\tsignificant_cells\n";
      for (const auto& a : aggregates) {
        out << io::tsv_field(a.metric) << '\t' << opt(a.mean) << '\t' << opt(a.median) << '\t' << opt(a.sd) << '\t'
            << a.wins << '\t' << a.significant_cells << '\n';
      }
      break;
    case OutputFormat::kJson: {
      Json j;
      j["version"] = kVersion;
      j["config"] = Json{{"alpha", req.alpha}};
      Json cj = Json::array();
      for (const auto& c : cells) {
        Json e;
        e["setting"] = c.setting;
        e["metric"] = c.metric;
        if (c.result) {
          e["tau"] = c.result->tau;
          e["p_value"] = c.result->p_value;
          e["n"] = c.result->n;
          e["significant"] = c.result->significant;
          e["exact"] = c.result->exact;
        } else {
          e["tau"] = nullptr;
          e["error"] = c.error;
        }
        cj.push_back(e);
      }
      j["cells"] = cj;
      Json aj = Json::array();
      for (const auto& a : aggregates) {
        Json e;
        e["metric"] = a.metric;
        auto put = [&e](const char* key, const std::optional<double>& v) {
          if (v) {
            e[key] = *v;
          } else {
            e[key] = nullptr;
          }
        };
        put("mean", a.mean);
        put("median", a.median);
        put("sd", a.sd);
        e["wins"] = a.wins;
        e["significant_cells"] = a.significant_cells;
        aj.push_back(e);
      }
      j["aggregate"] = aj;
      out << j.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// report-types
// ---------------------------------------------------------------------------

inline std::string cmd_report_types(const ReportTypesRequest& req) {
  const Tokenizer tok = detail::check_tokenizer(req.common.tokenizer);
  detail::check_beta_k(req.beta, 0.0);
  if (req.top < 1) throw Error(ExitCode::kUsage, "--top must be at least 1");

  const auto ref_lines = io::read_segments(req.ref_path);
  const auto hyp_lines = io::read_segments(req.hyp_path);
  detail::check_aligned(req.ref_path, ref_lines.size(), req.hyp_path, hyp_lines.size());
  if (ref_lines.empty()) throw Error(ExitCode::kLineMismatch, "empty corpus: " + req.ref_path + " has 0 lines");

  const Preprocess pre{tok, req.common.lowercase};
  const auto refs = prepare_side(ref_lines, pre);
  const auto hyps = prepare_side(hyp_lines, pre);
  std::vector<SegmentCounts> segs;
  segs.reserve(refs.tokens.size());
  for (std::size_t i = 0; i < refs.tokens.size(); ++i) {
    segs.push_back(count_segment(hyps.tokens[i].tokens, refs.tokens[i].tokens));
  }
  const auto rows = per_type_report(aggregate(std::move(segs)), req.beta, req.sort, req.top);

  std::ostringstream out;
  switch (req.common.output) {
    case OutputFormat::kTsv:
    case OutputFormat::kText:
      // The text view is the same table; it is meant to be plotted anyway.
      out << "type\trefs\tpreds\tmatch\tP\tR\tF\n";
      for (const auto& r : rows) {
        out << io::tsv_field(r.type_key) << '\t' << r.stats.refs << '\t' << r.stats.preds << '\t' << r.stats.match
            << '\t' << io::fixed(r.precision, 3) << '\t' << io::fixed(r.recall, 3) << '\t' << io::fixed(r.f_beta, 3)
            << '\n';
      }
      break;
    case OutputFormat::kJson: {
      Json j;
      j["version"] = kVersion;
      Json config = detail::common_config(req.common);
      config["beta"] = req.beta;
      config["sort"] = req.sort == ReportSort::kFreq ? "freq" : "f";
      config["top"] = req.top;
      j["config"] = config;
      Json types = Json::array();
      for (const auto& r : rows) {
        Json e;
        e["type"] = r.type_key;
        e["refs"] = r.stats.refs;
        e["preds"] = r.stats.preds;
        e["match"] = r.stats.match;
        e["P"] = r.precision;
        e["R"] = r.recall;
        e["F"] = r.f_beta;
        types.push_back(e);
      }
      j["types"] = types;
      out << j.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

/// Runs a command, writing its output on success or a one-line error.
/// Returns the process exit code.
template <typename Command>
int run(Command&& command, std::ostream& out, std::ostream& err) {
  try {
    out << command();
    out.flush();
    return static_cast<int>(ExitCode::kOk);
  } catch (const Error& e) {
    err << "macroeval: error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "macroeval: error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kUsage);
  }
}

}  // namespace macroeval::cli
