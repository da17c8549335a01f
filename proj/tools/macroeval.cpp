// macroeval: corpus-level MT evaluation (MacroF/MicroF, BLEU, chrF),
// per-segment favoritism and Kendall tau meta-evaluation.

#include <unistd.h>

#include <clocale>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "macroeval/cli.hpp"

namespace me = macroeval;
namespace cli = macroeval::cli;

int main(int argc, char** argv) {
  std::setlocale(LC_CTYPE, "C.UTF-8");

  CLI::App app{"Corpus-level MT evaluation: MacroF, MicroF, BLEU, chrF, favoritism and Kendall tau"};
  app.set_version_flag("--version", std::string("macroeval ") + me::kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::string tokenizer = "13a";
  bool lowercase = false;
  std::string output = "text";
  app.add_option("--tokenizer", tokenizer, "Tokenizer: 13a or none")->capture_default_str();
  app.add_flag("--lowercase", lowercase, "Lowercase hypotheses and references before scoring");
  app.add_option("--output", output, "Output format: text, json or tsv")->capture_default_str();

  // score
  cli::ScoreRequest score;
  std::vector<std::string> metric_names{"macrof", "microf", "bleu", "chrf"};
  auto* score_cmd = app.add_subcommand("score", "Score hypothesis files against one reference file");
  score_cmd->add_option("ref", score.ref_path, "Reference file, one segment per line")->required();
  score_cmd->add_option("hyps", score.hyp_paths, "Hypothesis files, each scored independently")->required();
  score_cmd->add_option("-m,--metrics", metric_names, "Metrics: macrof microf bleu chrf")
      ->delimiter(',')
      ->capture_default_str();
  score_cmd->add_option("-b,--beta", score.beta, "F-measure beta")->capture_default_str();
  score_cmd->add_option("-k,--k", score.k, "MicroF smoothing constant added to Refs(c)")->capture_default_str();
  score_cmd->add_option("-l,--langpair", score.lang_pair, "Language pair tag xx-yy (metadata only)");

  // favoritism
  cli::FavoritismRequest fav;
  std::string fav_metric = "macrof";
  auto* fav_cmd = app.add_subcommand("favoritism", "Rank segments by how much a metric favors system S over U");
  fav_cmd->add_option("ref", fav.ref_path, "Reference file")->required();
  fav_cmd->add_option("sys_s", fav.sys_s_path, "Hypotheses of system S")->required();
  fav_cmd->add_option("sys_u", fav.sys_u_path, "Hypotheses of system U")->required();
  fav_cmd->add_option("-m,--metric", fav_metric, "Metric: macrof, microf, bleu or chrf")->capture_default_str();
  fav_cmd->add_option("-n,--top", fav.top_k, "Number of segments to report")->capture_default_str();
  fav_cmd->add_option("-b,--beta", fav.beta, "F-measure beta")->capture_default_str();
  fav_cmd->add_option("-k,--k", fav.k, "MicroF smoothing constant")->capture_default_str();

  // correlate
  cli::CorrelateRequest corr;
  auto* corr_cmd = app.add_subcommand("correlate", "Kendall tau between metric and human scores per setting");
  corr_cmd->add_option("tables", corr.inputs, "Table files (or directories of *.tsv), one per setting")->required();
  corr_cmd->add_option("-a,--alpha", corr.alpha, "Significance level")->capture_default_str();

  // report-types
  cli::ReportTypesRequest rep;
  std::string sort = "freq";
  auto* rep_cmd = app.add_subcommand("report-types", "Per-type precision, recall and F table");
  rep_cmd->add_option("ref", rep.ref_path, "Reference file")->required();
  rep_cmd->add_option("hyp", rep.hyp_path, "Hypothesis file")->required();
  rep_cmd->add_option("-s,--sort", sort, "Order by reference frequency (freq) or F (f)")
      ->check(CLI::IsMember({"freq", "f"}))
      ->capture_default_str();
  rep_cmd->add_option("-n,--top", rep.top, "Number of types to report")->capture_default_str();
  rep_cmd->add_option("-b,--beta", rep.beta, "F-measure beta")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(me::ExitCode::kUsage);
  }

  const auto format = cli::parse_output(output);
  if (!format) {
    std::cerr << "macroeval: error: unknown output format: " << output << '\n';
    return static_cast<int>(me::ExitCode::kUsage);
  }
  const char* no_color = std::getenv("MACROEVAL_NO_COLOR");
  const cli::CommonOptions common{tokenizer, lowercase, *format,
                                  *format == cli::OutputFormat::kText && isatty(STDOUT_FILENO) != 0 &&
                                      (no_color == nullptr || *no_color == '\0')};

  if (score_cmd->parsed()) {
    score.common = common;
    score.metrics.clear();
    for (const auto& name : metric_names) {
      auto m = me::parse_metric(name);
      if (!m) {
        std::cerr << "macroeval: error: unknown metric: " << name << '\n';
        return static_cast<int>(me::ExitCode::kUsage);
      }
      score.metrics.push_back(*m);
    }
    return cli::run([&] { return cli::cmd_score(score); }, std::cout, std::cerr);
  }
  if (fav_cmd->parsed()) {
    fav.common = common;
    auto m = me::parse_metric(fav_metric);
    if (!m) {
      std::cerr << "macroeval: error: unknown metric: " << fav_metric << '\n';
      return static_cast<int>(me::ExitCode::kUsage);
    }
    fav.metric = *m;
    return cli::run([&] { return cli::cmd_favoritism(fav); }, std::cout, std::cerr);
  }
  if (corr_cmd->parsed()) {
    corr.common = common;
    return cli::run([&] { return cli::cmd_correlate(corr); }, std::cout, std::cerr);
  }
  rep.common = common;
  rep.sort = sort == "f" ? me::ReportSort::kF : me::ReportSort::kFreq;
  return cli::run([&] { return cli::cmd_report_types(rep); }, std::cout, std::cerr);
}
