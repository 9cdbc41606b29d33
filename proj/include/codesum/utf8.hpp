#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace codesum::utf8 {

/// Length of the well-formed UTF-8 sequence starting at `text[pos]`, or 0
/// when the bytes there are not valid UTF-8 (overlongs and surrogates
/// included).
inline std::size_t sequence_length(std::string_view text, std::size_t pos) {
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
  const std::size_t left = text.size() - pos;
  const unsigned char b0 = byte(pos);
  if (b0 < 0x80) return 1;
  auto cont = [&](std::size_t i) { return (byte(pos + i) & 0xC0) == 0x80; };
  if (b0 >= 0xC2 && b0 <= 0xDF) {
    return (left >= 2 && cont(1)) ? 2 : 0;
  }
  if (b0 >= 0xE0 && b0 <= 0xEF) {
    if (left < 3 || !cont(1) || !cont(2)) return 0;
    const unsigned char b1 = byte(pos + 1);
    if (b0 == 0xE0 && b1 < 0xA0) return 0;
    if (b0 == 0xED && b1 > 0x9F) return 0;
    return 3;
  }
  if (b0 >= 0xF0 && b0 <= 0xF4) {
    if (left < 4 || !cont(1) || !cont(2) || !cont(3)) return 0;
    const unsigned char b1 = byte(pos + 1);
    if (b0 == 0xF0 && b1 < 0x90) return 0;
    if (b0 == 0xF4 && b1 > 0x8F) return 0;
    return 4;
  }
  return 0;
}

inline bool is_valid(std::string_view text) {
  for (std::size_t pos = 0; pos < text.size();) {
    const std::size_t len = sequence_length(text, pos);
    if (len == 0) return false;
    pos += len;
  }
  return true;
}

/// Byte offset of the first invalid sequence, or npos.
inline std::size_t first_invalid(std::string_view text) {
  for (std::size_t pos = 0; pos < text.size();) {
    const std::size_t len = sequence_length(text, pos);
    if (len == 0) return pos;
    pos += len;
  }
  return std::string_view::npos;
}

/// Decodes to code points; invalid bytes decode as themselves (Latin-1) so
/// the function is total.
inline std::vector<char32_t> decode(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) {
    const std::size_t len = sequence_length(text, pos);
    const auto b0 = static_cast<unsigned char>(text[pos]);
    if (len <= 1) {
      out.push_back(b0);
      ++pos;
      continue;
    }
    char32_t cp = b0 & (0xFF >> (len + 1));
    for (std::size_t i = 1; i < len; ++i) {
      cp = (cp << 6) | (static_cast<unsigned char>(text[pos + i]) & 0x3F);
    }
    out.push_back(cp);
    pos += len;
  }
  return out;
}

}  // namespace codesum::utf8
