#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "macroeval/utf8.hpp"

namespace macroeval {

struct TokenizedSegment {
  std::vector<std::string> tokens;
  std::size_t source_len_chars = 0;

  bool operator==(const TokenizedSegment&) const = default;
};

enum class Tokenizer { k13a, kNone };

inline const char* tokenizer_name(Tokenizer tok) { return tok == Tokenizer::k13a ? "13a" : "none"; }

inline std::optional<Tokenizer> parse_tokenizer(std::string_view name) {
  if (name == "13a") return Tokenizer::k13a;
  if (name == "none") return Tokenizer::kNone;
  return std::nullopt;
}

namespace detail {

inline void replace_all(std::string& s, std::string_view from, std::string_view to) {
  if (s.find(from) == std::string::npos) return;
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  for (;;) {
    const std::size_t hit = s.find(from, pos);
    if (hit == std::string::npos) break;
    out.append(s, pos, hit - pos);
    out.append(to);
    pos = hit + from.size();
  }
  out.append(s, pos, std::string::npos);
  s = std::move(out);
}

constexpr bool is_digit(char c) { return c >= '0' && c <= '9'; }
constexpr bool is_period_or_comma(char c) { return c == '.' || c == ','; }

// ASCII symbol ranges that always become standalone tokens:
// {-~  [-`  space-&  (-+  :-@  /
constexpr bool is_split_symbol(char ch) {
  const auto c = static_cast<unsigned char>(ch);
  return (c >= 0x7B && c <= 0x7E) || (c >= 0x5B && c <= 0x60) || (c >= 0x20 && c <= 0x26) ||
         (c >= 0x28 && c <= 0x2B) || (c >= 0x3A && c <= 0x40) || c == '/';
}

// Each pass below reproduces one left-to-right, non-overlapping regex
// substitution of the mteval-v13a convention. Working on bytes is equivalent
// to working on scalar values here because every pattern anchors on ASCII.

inline std::string pad_symbols(std::string_view s) {
  std::string out;
  out.reserve(s.size() * 2);
  for (char c : s) {
    if (is_split_symbol(c)) {
      out.push_back(' ');
      out.push_back(c);
      out.push_back(' ');
    } else {
      out.push_back(c);
    }
  }
  return out;
}

// ([^0-9])([\.,]) -> "\1 \2 "
inline std::string split_separator_after_nondigit(std::string_view s) {
  std::string out;
  out.reserve(s.size() + s.size() / 4);
  std::size_t p = 0;
  while (p < s.size()) {
    if (p + 1 < s.size() && !is_digit(s[p]) && is_period_or_comma(s[p + 1])) {
      out.push_back(s[p]);
      out.push_back(' ');
      out.push_back(s[p + 1]);
      out.push_back(' ');
      p += 2;
    } else {
      out.push_back(s[p++]);
    }
  }
  return out;
}

// ([\.,])([^0-9]) -> " \1 \2"
inline std::string split_separator_before_nondigit(std::string_view s) {
  std::string out;
  out.reserve(s.size() + s.size() / 4);
  std::size_t p = 0;
  while (p < s.size()) {
    if (p + 1 < s.size() && is_period_or_comma(s[p]) && !is_digit(s[p + 1])) {
      out.push_back(' ');
      out.push_back(s[p]);
      out.push_back(' ');
      out.push_back(s[p + 1]);
      p += 2;
    } else {
      out.push_back(s[p++]);
    }
  }
  return out;
}

// ([0-9])(-) -> "\1 \2 "
inline std::string split_dash_after_digit(std::string_view s) {
  std::string out;
  out.reserve(s.size() + s.size() / 4);
  std::size_t p = 0;
  while (p < s.size()) {
    if (p + 1 < s.size() && is_digit(s[p]) && s[p + 1] == '-') {
      out.push_back(s[p]);
      out.append(" - ");
      p += 2;
    } else {
      out.push_back(s[p++]);
    }
  }
  return out;
}

}  // namespace detail

/// Applies the 13a rules and returns the tokens joined by single spaces.
inline std::string tokenize_13a_line(std::string_view raw) {
  std::string line(raw);
  detail::replace_all(line, "<skipped>", "");
  detail::replace_all(line, "-\n", "");
  detail::replace_all(line, "\n", " ");
  detail::replace_all(line, "&quot;", "\"");
  detail::replace_all(line, "&amp;", "&");
  detail::replace_all(line, "&lt;", "<");
  detail::replace_all(line, "&gt;", ">");

  std::string padded;
  padded.reserve(line.size() + 2);
  padded.push_back(' ');
  padded.append(line);
  padded.push_back(' ');

  std::string s = detail::pad_symbols(padded);
  s = detail::split_separator_after_nondigit(s);
  s = detail::split_separator_before_nondigit(s);
  s = detail::split_dash_after_digit(s);

  const auto tokens = utf8::split_whitespace(s);
  std::string joined;
  joined.reserve(s.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) joined.push_back(' ');
    joined.append(tokens[i]);
  }
  return joined;
}

inline TokenizedSegment tokenize_13a(std::string_view raw) {
  return {utf8::split_whitespace(tokenize_13a_line(raw)), utf8::length(raw)};
}

inline TokenizedSegment tokenize_none(std::string_view raw) {
  return {utf8::split_whitespace(raw), utf8::length(raw)};
}

inline TokenizedSegment tokenize(std::string_view raw, Tokenizer tok) {
  return tok == Tokenizer::k13a ? tokenize_13a(raw) : tokenize_none(raw);
}

using CharNgramCounts = std::map<std::string, std::int64_t, std::less<>>;

/// Multiset of contiguous length-n windows over Unicode scalar values.
inline CharNgramCounts char_ngrams(std::string_view raw, int n, bool remove_space) {
  if (n < 1 || n > 6) throw std::invalid_argument("char_ngrams: order must be in 1..6");
  const std::u32string chars = utf8::to_u32(remove_space ? utf8::remove_whitespace(raw) : std::string(raw));
  CharNgramCounts counts;
  const auto order = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + order <= chars.size(); ++i) {
    ++counts[utf8::from_u32(std::u32string_view(chars).substr(i, order))];
  }
  return counts;
}

}  // namespace macroeval
