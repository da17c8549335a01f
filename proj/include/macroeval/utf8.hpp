#pragma once

#include <cstdint>
#include <cwctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace macroeval::utf8 {

// Decodes one scalar value starting at s[pos]. Returns nullopt on malformed
// input; `len` receives the number of bytes consumed on success.
inline std::optional<char32_t> decode(std::string_view s, std::size_t pos, std::size_t& len) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    len = 1;
    return b0;
  }
  std::size_t need = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    need = 1;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    need = 2;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    need = 3;
    cp = b0 & 0x07;
  } else {
    return std::nullopt;
  }
  if (pos + need >= s.size()) return std::nullopt;
  for (std::size_t k = 1; k <= need; ++k) {
    const auto b = static_cast<unsigned char>(s[pos + k]);
    if ((b & 0xC0) != 0x80) return std::nullopt;
    cp = (cp << 6) | (b & 0x3F);
  }
  // Overlong forms, surrogates and out-of-range values.
  static constexpr char32_t kMin[] = {0, 0x80, 0x800, 0x10000};
  if (cp < kMin[need] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
  len = need + 1;
  return cp;
}

inline bool is_valid(std::string_view s) {
  for (std::size_t pos = 0; pos < s.size();) {
    std::size_t len = 0;
    if (!decode(s, pos, len)) return false;
    pos += len;
  }
  return true;
}

// Decodes a string assumed valid; malformed bytes map to U+FFFD.
inline std::u32string to_u32(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t pos = 0; pos < s.size();) {
    std::size_t len = 0;
    if (auto cp = decode(s, pos, len)) {
      out.push_back(*cp);
      pos += len;
    } else {
      out.push_back(U'�');
      ++pos;
    }
  }
  return out;
}

inline void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string from_u32(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) append(out, cp);
  return out;
}

// Same set as Python's str.isspace(), which is what `\s` and str.split()
// use in the reference tooling.
constexpr bool is_space(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || (c >= 0x1C && c <= 0x20) || c == 0x85 || c == 0xA0 ||
         c == 0x1680 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 ||
         c == 0x202F || c == 0x205F || c == 0x3000;
}

// Length in bytes of a whitespace scalar at s[pos], or 0 if none.
inline std::size_t space_len_at(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) return is_space(b0) ? 1 : 0;
  if (b0 != 0xC2 && b0 != 0xE1 && b0 != 0xE2 && b0 != 0xE3) return 0;
  std::size_t len = 0;
  auto cp = decode(s, pos, len);
  return (cp && is_space(*cp)) ? len : 0;
}

// Splits on runs of Unicode whitespace; never yields empty pieces.
inline std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = std::string_view::npos;
  for (std::size_t pos = 0; pos < s.size();) {
    const std::size_t sp = space_len_at(s, pos);
    if (sp > 0) {
      if (start != std::string_view::npos) {
        out.emplace_back(s.substr(start, pos - start));
        start = std::string_view::npos;
      }
      pos += sp;
    } else {
      if (start == std::string_view::npos) start = pos;
      ++pos;
    }
  }
  if (start != std::string_view::npos) out.emplace_back(s.substr(start));
  return out;
}

inline std::string remove_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t pos = 0; pos < s.size();) {
    const std::size_t sp = space_len_at(s, pos);
    if (sp > 0) {
      pos += sp;
    } else {
      out.push_back(s[pos++]);
    }
  }
  return out;
}

// Simple per-scalar lowercasing through the C library. Non-ASCII mapping
// requires a UTF-8 LC_CTYPE locale to be active; otherwise only ASCII folds.
inline std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t pos = 0; pos < s.size();) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) {
      out.push_back(static_cast<char>(b0 >= 'A' && b0 <= 'Z' ? b0 + 32 : b0));
      ++pos;
      continue;
    }
    std::size_t len = 0;
    if (auto cp = decode(s, pos, len)) {
      const auto lowered = static_cast<char32_t>(std::towlower(static_cast<wint_t>(*cp)));
      append(out, lowered);
      pos += len;
    } else {
      out.push_back(s[pos++]);
    }
  }
  return out;
}

inline std::size_t length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

}  // namespace macroeval::utf8
