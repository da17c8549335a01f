#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "macroeval/error.hpp"
#include "macroeval/rankstats.hpp"
#include "macroeval/utf8.hpp"

namespace macroeval::io {

/// Splits file contents into lines: LF or CRLF, final newline optional.
inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = end + 1;
  }
  return lines;
}

inline std::string read_file(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ExitCode::kMissingFile, "cannot open file: " + path);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ExitCode::kMissingFile, "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

/// One segment per line, validated as UTF-8.
inline std::vector<std::string> read_segments(const std::string& path) {
  const std::string text = read_file(path);
  if (!utf8::is_valid(text)) throw Error(ExitCode::kBadEncoding, "file is not valid UTF-8: " + path);
  return split_lines(text);
}

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  // Never print "-0.000".
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

/// Tabs and newlines inside a TSV field are written as escapes.
inline std::string tsv_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\t':
        out += "\\t";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\\':
        out += "\\\\";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

inline bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

/// Parses a correlation table: header `system<TAB>human<TAB><metric>...`,
/// then one row per system. Blank lines are ignored.
inline TableRow parse_table(std::string_view text, const std::string& setting, const std::string& origin) {
  auto fail = [&](std::size_t line_no, const std::string& msg) -> Error {
    return Error(ExitCode::kMalformedTable, origin + ":" + std::to_string(line_no) + ": " + msg);
  };
  const auto lines = split_lines(text);
  TableRow row;
  row.setting = setting;
  std::size_t columns = 0;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    if (lines[li].find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = split_tabs(lines[li]);
    if (columns == 0) {
      if (fields.size() < 3 || fields[0] != "system" || fields[1] != "human") {
        throw fail(line_no, "header must be 'system<TAB>human<TAB><metric>...'");
      }
      columns = fields.size();
      for (std::size_t c = 2; c < fields.size(); ++c) {
        if (fields[c].empty()) throw fail(line_no, "empty metric name in header");
        row.metrics.push_back({std::string(fields[c]), {}});
      }
      continue;
    }
    if (fields.size() != columns) {
      throw fail(line_no, "expected " + std::to_string(columns) + " columns, found " + std::to_string(fields.size()));
    }
    row.systems.emplace_back(fields[0]);
    double v = 0.0;
    if (!parse_double(fields[1], v)) throw fail(line_no, "non-numeric human score '" + std::string(fields[1]) + "'");
    row.human.push_back(v);
    for (std::size_t c = 2; c < fields.size(); ++c) {
      if (!parse_double(fields[c], v)) throw fail(line_no, "non-numeric score '" + std::string(fields[c]) + "'");
      row.metrics[c - 2].scores.push_back(v);
    }
  }
  if (columns == 0) throw fail(std::max<std::size_t>(1, lines.size()), "missing header");
  return row;
}

}  // namespace macroeval::io
