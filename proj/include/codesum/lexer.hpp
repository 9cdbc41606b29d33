#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "codesum/types.hpp"
#include "codesum/utf8.hpp"

namespace codesum {

enum class TokenOrigin { Code, Summary, AstSerialized };

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
};

/// Ordered token stream. For Code and Summary origins `spans[i]` slices the
/// originating text to exactly `tokens[i]`; AstSerialized spans cover the
/// source range of the node a token was rendered from.
struct TokenSequence {
  std::vector<std::string> tokens;
  std::vector<Span> spans;
  TokenOrigin origin = TokenOrigin::Code;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }

  void push(std::string token, Span span) {
    tokens.push_back(std::move(token));
    spans.push_back(span);
  }

  bool operator==(const TokenSequence&) const = default;
};

enum class TokenKind { Identifier, Number, String, Comment, Operator, Other };

struct LexToken {
  TokenKind kind;
  std::size_t begin;
  std::size_t end;
  /// String/comment token that ran into end of line (or input) without its
  /// closing delimiter.
  bool unterminated = false;
};

namespace detail {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

// Non-ASCII code points are accepted inside identifiers for both languages.
inline std::size_t ident_char_len(std::string_view s, std::size_t i, Language lang, bool start) {
  const char c = s[i];
  if (is_ascii_alpha(c) || c == '_' || (lang == Language::Java && c == '$')) return 1;
  if (!start && is_digit(c)) return 1;
  if (static_cast<unsigned char>(c) >= 0x80) return utf8::sequence_length(s, i);
  return 0;
}

constexpr std::array<std::string_view, 49> kJavaOperators = {
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=",
    "<=",   ">=",  "+=",  "-=",  "*=",  "/=", "&=", "|=", "^=", "%=", "<<", ">>", "(",
    ")",    "{",   "}",   "[",   "]",   ";",  ",",  ".",  "@",  "=",  ">",  "<",  "!",
    "~",    "?",   ":",   "+",   "-",   "*",  "/",  "&",  "|",  "^"};

constexpr std::array<std::string_view, 47> kPythonOperators = {
    "**=", "//=", ">>=", "<<=", "...", "->", ":=", "**", "//", "<<", ">>", "<=",
    ">=",  "==",  "!=",  "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=", "@=",
    "+",   "-",   "*",   "/",   "%",   "@",  "&",  "|",  "^",  "~",  "<",  ">",
    "(",   ")",   "[",   "]",   "{",   "}",  ",",  ":",  ".",  ";",  "="};

inline std::size_t match_operator(std::string_view s, std::size_t i, Language lang) {
  auto try_all = [&](const auto& table) -> std::size_t {
    for (std::string_view op : table) {
      if (s.compare(i, op.size(), op) == 0) return op.size();
    }
    return 0;
  };
  // '%' is in the Java table via "%=" only; add the bare char here.
  if (lang == Language::Java) {
    const std::size_t n = try_all(kJavaOperators);
    if (n) return n;
    return s[i] == '%' ? 1 : 0;
  }
  return try_all(kPythonOperators);
}

inline std::size_t scan_number(std::string_view s, std::size_t i, Language lang) {
  const std::size_t start = i;
  const bool hex = s[i] == '0' && i + 1 < s.size() && (s[i + 1] == 'x' || s[i + 1] == 'X');
  auto alnum = [&](std::size_t k) {
    return k < s.size() && (is_ascii_alpha(s[k]) || is_digit(s[k]) || s[k] == '_');
  };
  auto consume_body = [&] {
    while (alnum(i)) {
      const char c = s[i++];
      const bool exp = hex ? (c == 'p' || c == 'P') : (c == 'e' || c == 'E');
      if (exp && i + 1 < s.size() && (s[i] == '+' || s[i] == '-') && is_digit(s[i + 1])) ++i;
    }
  };
  if (s[i] == '.') ++i;
  consume_body();
  if (i < s.size() && s[i] == '.' && s.compare(start, 1, ".") != 0) {
    const bool next_digit = i + 1 < s.size() && is_digit(s[i + 1]);
    const bool next_ident = i + 1 < s.size() && (ident_char_len(s, i + 1, lang, true) > 0 ||
                                                 s[i + 1] == '.');
    if (next_digit || !next_ident) {
      ++i;
      consume_body();
    }
  }
  return i - start;
}

// Single- or triple-quoted literal starting at the quote character.
inline std::pair<std::size_t, bool> scan_quoted(std::string_view s, std::size_t i, bool allow_triple) {
  const std::size_t start = i;
  const char q = s[i];
  if (allow_triple && s.compare(i, 3, std::string(3, q)) == 0) {
    i += 3;
    while (i < s.size()) {
      if (s[i] == '\\') {
        i += 2;
        continue;
      }
      if (s.compare(i, 3, std::string(3, q)) == 0) return {i + 3 - start, false};
      ++i;
    }
    return {s.size() - start, true};
  }
  ++i;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\\') {
      if (i + 1 < s.size() && s[i + 1] == '\r' && i + 2 < s.size() && s[i + 2] == '\n') {
        i += 3;
      } else {
        i += 2;
      }
      continue;
    }
    if (c == q) return {i + 1 - start, false};
    if (c == '\n' || c == '\r') break;
    ++i;
  }
  return {std::min(i, s.size()) - start, true};
}

inline bool is_python_string_prefix(std::string_view word) {
  if (word.size() > 2) return false;
  std::string lower(word);
  for (char& c : lower) c = static_cast<char>(c | 0x20);
  static constexpr std::array<std::string_view, 8> prefixes = {"r", "u", "b", "f", "br", "rb", "fr", "rf"};
  return std::find(prefixes.begin(), prefixes.end(), lower) != prefixes.end();
}

}  // namespace detail

/// Full-detail scan used by the parsers; `lex_code` is the public view.
inline std::vector<LexToken> scan_code(std::string_view src, Language lang) {
  using namespace detail;
  std::vector<LexToken> out;
  std::size_t i = 0;
  const std::size_t n = src.size();
  while (i < n) {
    const char c = src[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    // comments
    if (lang == Language::Java && c == '/' && i + 1 < n && src[i + 1] == '/') {
      while (i < n && src[i] != '\n' && src[i] != '\r') ++i;
      out.push_back({TokenKind::Comment, start, i});
      continue;
    }
    if (lang == Language::Java && c == '/' && i + 1 < n && src[i + 1] == '*') {
      const std::size_t close = src.find("*/", i + 2);
      const bool open = close == std::string_view::npos;
      i = open ? n : close + 2;
      out.push_back({TokenKind::Comment, start, i, open});
      continue;
    }
    if (lang == Language::Python && c == '#') {
      while (i < n && src[i] != '\n' && src[i] != '\r') ++i;
      out.push_back({TokenKind::Comment, start, i});
      continue;
    }
    // string literals
    if (c == '"' || c == '\'') {
      const bool triple = lang == Language::Python || c == '"';
      auto [len, open] = scan_quoted(src, i, triple);
      i += len;
      out.push_back({TokenKind::String, start, i, open});
      continue;
    }
    if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(src[i + 1]))) {
      i += scan_number(src, i, lang);
      out.push_back({TokenKind::Number, start, i});
      continue;
    }
    if (std::size_t len = ident_char_len(src, i, lang, true); len > 0) {
      i += len;
      while (i < n) {
        const std::size_t more = ident_char_len(src, i, lang, false);
        if (more == 0) break;
        i += more;
      }
      if (lang == Language::Python && i < n && (src[i] == '"' || src[i] == '\'') &&
          is_python_string_prefix(src.substr(start, i - start))) {
        auto [slen, open] = scan_quoted(src, i, true);
        i += slen;
        out.push_back({TokenKind::String, start, i, open});
        continue;
      }
      out.push_back({TokenKind::Identifier, start, i});
      continue;
    }
    if (std::size_t len = match_operator(src, i, lang); len > 0) {
      i += len;
      out.push_back({TokenKind::Operator, start, i});
      continue;
    }
    // Unlexable: one code point (or one invalid byte).
    const std::size_t len = std::max<std::size_t>(1, utf8::sequence_length(src, i));
    i += len;
    out.push_back({TokenKind::Other, start, i});
  }
  return out;
}

inline TokenSequence lex_code(std::string_view code, Language language) {
  TokenSequence seq;
  seq.origin = TokenOrigin::Code;
  for (const LexToken& t : scan_code(code, language)) {
    seq.push(std::string(code.substr(t.begin, t.end - t.begin)), {t.begin, t.end});
  }
  return seq;
}

/// Joins code tokens with single spaces; a token that only ends at a line
/// break (line comment, unterminated literal) is followed by '\n' instead so
/// that lex_code(join_code_tokens(lex_code(x))) reproduces the tokens.
inline std::string join_code_tokens(const std::vector<std::string>& tokens, Language language) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (i > 0) {
      const std::string& prev = tokens[i - 1];
      bool needs_newline = false;
      if (language == Language::Java) {
        needs_newline = prev.starts_with("//") ||
                        ((prev.starts_with("\"") || prev.starts_with("'")) &&
                         scan_code(prev, language).size() == 1 &&
                         scan_code(prev, language).front().unterminated);
      } else {
        if (prev.starts_with("#")) {
          needs_newline = true;
        } else {
          const auto scanned = scan_code(prev, language);
          needs_newline = scanned.size() == 1 && scanned.front().kind == TokenKind::String &&
                          scanned.front().unterminated;
        }
      }
      out += needs_newline ? '\n' : ' ';
    }
    out += t;
  }
  return out;
}

/// Whitespace units, each with its trailing run of `.,;:!?` split off into
/// one token per character. A unit made only of punctuation stays whole.
inline TokenSequence lex_summary(std::string_view summary) {
  TokenSequence seq;
  seq.origin = TokenOrigin::Summary;
  auto is_trailing_punct = [](char c) {
    return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?';
  };
  std::size_t i = 0;
  while (i < summary.size()) {
    if (detail::is_space(summary[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < summary.size() && !detail::is_space(summary[i])) ++i;
    std::size_t core_end = i;
    while (core_end > start && is_trailing_punct(summary[core_end - 1])) --core_end;
    if (core_end == start) {
      seq.push(std::string(summary.substr(start, i - start)), {start, i});
      continue;
    }
    seq.push(std::string(summary.substr(start, core_end - start)), {start, core_end});
    for (std::size_t p = core_end; p < i; ++p) {
      seq.push(std::string(1, summary[p]), {p, p + 1});
    }
  }
  return seq;
}

/// Text up to and including the first '.', '!' or '?' that is followed by
/// whitespace or end of text; otherwise the first line. Abbreviations such
/// as "e.g. " end the sentence too.
inline std::string first_sentence(std::string_view summary) {
  for (std::size_t i = 0; i < summary.size(); ++i) {
    const char c = summary[i];
    if ((c == '.' || c == '!' || c == '?') &&
        (i + 1 == summary.size() || detail::is_space(summary[i + 1]))) {
      return std::string(summary.substr(0, i + 1));
    }
  }
  std::string_view line = summary.substr(0, summary.find('\n'));
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return std::string(line);
}

}  // namespace codesum
