#pragma once

// Python 3 parser producing a tree shaped like CPython's `ast` module. Node
// children follow the `_fields` order that ast.iter_child_nodes walks;
// expression contexts (Load/Store/Del) and operator singletons are not
// materialized.

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "codesum/error.hpp"
#include "codesum/java_parser.hpp"
#include "codesum/lexer.hpp"
#include "codesum/syntax_tree.hpp"

namespace codesum {

namespace python {

inline bool is_keyword(std::string_view s) {
  static constexpr std::array<std::string_view, 35> kKeywords = {
      "False", "None",   "True",    "and",      "as",       "assert", "async",
      "await", "break",  "class",   "continue", "def",      "del",    "elif",
      "else",  "except", "finally", "for",      "from",     "global", "if",
      "import", "in",    "is",      "lambda",   "nonlocal", "not",    "or",
      "pass",  "raise",  "return",  "try",      "while",    "with",   "yield"};
  return std::find(kKeywords.begin(), kKeywords.end(), s) != kKeywords.end();
}

enum class Kind { Name, Number, String, Op, Other, Newline, Indent, Dedent, End };

struct Tok {
  Kind kind;
  std::string text;
  std::size_t begin;
  std::size_t end;
};

inline std::size_t indent_width(std::string_view src, std::size_t token_begin) {
  std::size_t line_start = token_begin;
  while (line_start > 0 && src[line_start - 1] != '\n' && src[line_start - 1] != '\r') --line_start;
  std::size_t col = 0;
  for (std::size_t i = line_start; i < token_begin; ++i) {
    if (src[i] == '\t') {
      col = (col / 8 + 1) * 8;
    } else {
      ++col;
    }
  }
  return col;
}

/// Turns the lexer's flat stream into logical lines with NEWLINE, INDENT and
/// DEDENT markers. The first logical line's indentation is the base level, so
/// methods cut out of a class body parse as top-level code.
inline std::vector<Tok> tokenize(std::string_view src, std::size_t base_offset = 0) {
  const auto scanned = scan_code(src, Language::Python);
  std::vector<Tok> out;
  std::vector<std::size_t> indents;
  int depth = 0;
  bool continued = false;
  std::optional<std::size_t> prev_end;
  auto newline_between = [&](std::size_t a, std::size_t b) {
    for (std::size_t i = a; i < b; ++i) {
      if (src[i] == '\n' || src[i] == '\r') return true;
    }
    return false;
  };
  for (const LexToken& t : scanned) {
    if (t.kind == TokenKind::Comment) continue;
    const std::string text(src.substr(t.begin, t.end - t.begin));
    if (t.kind == TokenKind::Other && text == "\\") {
      continued = true;
      continue;
    }
    const bool new_line = !prev_end || (depth == 0 && !continued && newline_between(*prev_end, t.begin));
    continued = false;
    if (new_line) {
      const std::size_t width = indent_width(src, t.begin);
      if (prev_end) out.push_back({Kind::Newline, "", base_offset + *prev_end, base_offset + *prev_end});
      if (indents.empty()) {
        indents.push_back(width);
      } else if (width > indents.back()) {
        indents.push_back(width);
        out.push_back({Kind::Indent, "", base_offset + t.begin, base_offset + t.begin});
      } else {
        while (width < indents.back()) {
          indents.pop_back();
          if (indents.empty()) {
            throw ParseError(base_offset + t.begin, "unindent below the first line's indentation");
          }
          out.push_back({Kind::Dedent, "", base_offset + t.begin, base_offset + t.begin});
        }
        if (width != indents.back()) {
          throw ParseError(base_offset + t.begin, "unindent does not match any outer level");
        }
      }
    }
    Kind kind = Kind::Other;
    switch (t.kind) {
      case TokenKind::Identifier: kind = Kind::Name; break;
      case TokenKind::Number: kind = Kind::Number; break;
      case TokenKind::String: kind = Kind::String; break;
      case TokenKind::Operator: kind = Kind::Op; break;
      default: kind = Kind::Other; break;
    }
    if (kind == Kind::Op) {
      if (text == "(" || text == "[" || text == "{") ++depth;
      if ((text == ")" || text == "]" || text == "}") && depth > 0) --depth;
    }
    if (t.unterminated && kind == Kind::String) {
      throw ParseError(base_offset + t.begin, "unterminated string literal");
    }
    out.push_back({kind, text, base_offset + t.begin, base_offset + t.end});
    prev_end = t.end;
  }
  const std::size_t end = base_offset + src.size();
  if (prev_end) out.push_back({Kind::Newline, "", base_offset + *prev_end, base_offset + *prev_end});
  for (std::size_t i = 1; i < indents.size(); ++i) out.push_back({Kind::Dedent, "", end, end});
  out.push_back({Kind::End, "", end, end});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src, std::size_t base_offset = 0)
      : src_(src), base_(base_offset), toks_(tokenize(src, base_offset)) {}

  SyntaxNode parse_module() {
    SyntaxNode module = make("Module", 0);
    module.span = {base_, base_ + src_.size()};
    while (peek().kind != Kind::End) {
      if (peek().kind == Kind::Newline) {
        ++pos_;
        continue;
      }
      append(module.children, parse_statement());
    }
    return module;
  }

  /// A bare expression list, used for f-string replacement fields.
  SyntaxNode parse_standalone_expression() {
    SyntaxNode e = parse_testlist_star_expr();
    while (peek().kind == Kind::Newline) ++pos_;
    if (peek().kind != Kind::End) fail("unexpected trailing tokens in expression");
    return e;
  }

 private:
  std::string_view src_;
  std::size_t base_;
  std::vector<Tok> toks_;
  std::size_t pos_ = 0;

  // ---- token helpers -------------------------------------------------------

  const Tok& peek(std::size_t k = 0) const {
    const std::size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  bool at(std::string_view text, std::size_t k = 0) const {
    const Tok& t = peek(k);
    return (t.kind == Kind::Name || t.kind == Kind::Op) && t.text == text;
  }
  bool accept(std::string_view text) {
    if (!at(text)) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& what) const {
    const Tok& t = peek();
    std::string near;
    switch (t.kind) {
      case Kind::Newline: near = "end of line"; break;
      case Kind::Indent: near = "indent"; break;
      case Kind::Dedent: near = "dedent"; break;
      case Kind::End: near = "end of input"; break;
      default: near = "'" + t.text + "'"; break;
    }
    throw ParseError(t.begin, what + " near " + near);
  }
  void expect(std::string_view text) {
    if (!accept(text)) fail("expected '" + std::string(text) + "'");
  }
  void expect_kind(Kind kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what);
    ++pos_;
  }
  bool at_name(std::size_t k = 0) const {
    const Tok& t = peek(k);
    return t.kind == Kind::Name && !is_keyword(t.text);
  }
  std::string expect_name() {
    if (!at_name()) fail("expected name");
    return toks_[pos_++].text;
  }

  SyntaxNode make(std::string type, std::size_t start_tok, std::string name = {}) const {
    SyntaxNode n;
    n.type = std::move(type);
    n.name = std::move(name);
    const std::size_t b = toks_[std::min(start_tok, toks_.size() - 1)].begin;
    n.span = {b, b};
    return n;
  }
  void finish(SyntaxNode& n) const {
    if (pos_ > 0) n.span.end = std::max(n.span.begin, toks_[pos_ - 1].end);
  }
  static void append(std::vector<SyntaxNode>& into, std::vector<SyntaxNode>&& from) {
    for (auto& n : from) into.push_back(std::move(n));
  }

  // ---- statements ----------------------------------------------------------

  std::vector<SyntaxNode> parse_statement() {
    const Tok& t = peek();
    if (t.kind == Kind::Indent) fail("unexpected indent");
    if (t.kind == Kind::Name) {
      if (t.text == "if") return one(parse_if());
      if (t.text == "while") return one(parse_while());
      if (t.text == "for") return one(parse_for(pos_, false));
      if (t.text == "try") return one(parse_try());
      if (t.text == "with") return one(parse_with(pos_, false));
      if (t.text == "def") return one(parse_funcdef(pos_, {}, false));
      if (t.text == "class") return one(parse_classdef(pos_, {}));
      if (t.text == "match") {
        if (auto m = try_parse_match()) return one(std::move(*m));
      }
      if (t.text == "async" && (at("def", 1) || at("for", 1) || at("with", 1))) {
        const std::size_t start = pos_++;
        if (at("def")) return one(parse_funcdef(start, {}, true));
        if (at("for")) return one(parse_for(start, true));
        return one(parse_with(start, true));
      }
    }
    if (at("@")) return one(parse_decorated());
    return parse_simple_statements();
  }

  static std::vector<SyntaxNode> one(SyntaxNode n) {
    std::vector<SyntaxNode> v;
    v.push_back(std::move(n));
    return v;
  }

  std::vector<SyntaxNode> parse_simple_statements() {
    std::vector<SyntaxNode> stmts;
    stmts.push_back(parse_small_statement());
    while (accept(";")) {
      if (peek().kind == Kind::Newline || peek().kind == Kind::End) break;
      stmts.push_back(parse_small_statement());
    }
    if (peek().kind != Kind::End) expect_kind(Kind::Newline, "end of statement");
    return stmts;
  }

  std::vector<SyntaxNode> parse_suite() {
    expect(":");
    if (peek().kind != Kind::Newline) return parse_simple_statements();
    ++pos_;
    expect_kind(Kind::Indent, "an indented block");
    std::vector<SyntaxNode> body;
    while (peek().kind != Kind::Dedent && peek().kind != Kind::End) {
      if (peek().kind == Kind::Newline) {
        ++pos_;
        continue;
      }
      append(body, parse_statement());
    }
    if (peek().kind == Kind::Dedent) ++pos_;
    return body;
  }

  SyntaxNode parse_small_statement() {
    const std::size_t start = pos_;
    const Tok& t = peek();
    if (t.kind == Kind::Name) {
      if (t.text == "pass" || t.text == "break" || t.text == "continue") {
        std::string type = t.text == "pass" ? "Pass" : t.text == "break" ? "Break" : "Continue";
        ++pos_;
        SyntaxNode n = make(std::move(type), start);
        finish(n);
        return n;
      }
      if (t.text == "return") {
        ++pos_;
        SyntaxNode n = make("Return", start);
        if (!at_statement_end()) n.children.push_back(parse_testlist_star_expr());
        finish(n);
        return n;
      }
      if (t.text == "raise") {
        ++pos_;
        SyntaxNode n = make("Raise", start);
        if (!at_statement_end()) {
          n.children.push_back(parse_test());
          if (accept("from")) n.children.push_back(parse_test());
        }
        finish(n);
        return n;
      }
      if (t.text == "global" || t.text == "nonlocal") {
        std::string type = t.text == "global" ? "Global" : "Nonlocal";
        ++pos_;
        do {
          expect_name();
        } while (accept(","));
        SyntaxNode n = make(std::move(type), start);
        finish(n);
        return n;
      }
      if (t.text == "del") {
        ++pos_;
        SyntaxNode n = make("Delete", start);
        do {
          n.children.push_back(parse_expr());
        } while (accept(",") && can_start_expression());
        finish(n);
        return n;
      }
      if (t.text == "import") return parse_import();
      if (t.text == "from") return parse_from_import();
      if (t.text == "assert") {
        ++pos_;
        SyntaxNode n = make("Assert", start);
        n.children.push_back(parse_test());
        if (accept(",")) n.children.push_back(parse_test());
        finish(n);
        return n;
      }
    }
    return parse_expression_statement();
  }

  bool at_statement_end() const {
    const Kind k = peek().kind;
    return k == Kind::Newline || k == Kind::End || at(";");
  }

  SyntaxNode parse_alias(std::size_t start, bool dotted) {
    SyntaxNode alias = make("alias", start);
    if (dotted) {
      expect_name();
      while (accept(".")) expect_name();
    } else {
      expect_name();
    }
    if (accept("as")) expect_name();
    finish(alias);
    return alias;
  }

  SyntaxNode parse_import() {
    const std::size_t start = pos_;
    expect("import");
    SyntaxNode n = make("Import", start);
    do {
      n.children.push_back(parse_alias(pos_, true));
    } while (accept(","));
    finish(n);
    return n;
  }

  SyntaxNode parse_from_import() {
    const std::size_t start = pos_;
    expect("from");
    bool any = false;
    while (at(".") || at("...")) {
      ++pos_;
      any = true;
    }
    if (at_name()) {
      expect_name();
      while (accept(".")) expect_name();
      any = true;
    }
    if (!any) fail("expected module name");
    expect("import");
    SyntaxNode n = make("ImportFrom", start);
    if (at("*")) {
      SyntaxNode alias = make("alias", pos_);
      ++pos_;
      finish(alias);
      n.children.push_back(std::move(alias));
    } else {
      const bool paren = accept("(");
      do {
        if (paren && at(")")) break;
        n.children.push_back(parse_alias(pos_, false));
      } while (accept(","));
      if (paren) expect(")");
    }
    finish(n);
    return n;
  }

  static bool is_augassign(std::string_view op) {
    return op == "+=" || op == "-=" || op == "*=" || op == "/=" || op == "//=" || op == "%=" ||
           op == "**=" || op == ">>=" || op == "<<=" || op == "&=" || op == "|=" || op == "^=" ||
           op == "@=";
  }

  SyntaxNode parse_expression_statement() {
    const std::size_t start = pos_;
    SyntaxNode first = at("yield") ? parse_yield_expr() : parse_testlist_star_expr();
    if (at(":")) {
      ++pos_;
      SyntaxNode n = make("AnnAssign", start);
      n.children.push_back(std::move(first));
      n.children.push_back(parse_test());
      if (accept("=")) {
        n.children.push_back(at("yield") ? parse_yield_expr() : parse_testlist_star_expr());
      }
      finish(n);
      return n;
    }
    if (peek().kind == Kind::Op && is_augassign(peek().text)) {
      ++pos_;
      SyntaxNode n = make("AugAssign", start);
      n.children.push_back(std::move(first));
      n.children.push_back(at("yield") ? parse_yield_expr() : parse_testlist());
      finish(n);
      return n;
    }
    if (at("=")) {
      SyntaxNode n = make("Assign", start);
      std::vector<SyntaxNode> chain;
      chain.push_back(std::move(first));
      while (accept("=")) {
        chain.push_back(at("yield") ? parse_yield_expr() : parse_testlist_star_expr());
      }
      for (auto& c : chain) n.children.push_back(std::move(c));
      finish(n);
      return n;
    }
    SyntaxNode n = make("Expr", start);
    n.children.push_back(std::move(first));
    finish(n);
    return n;
  }

  SyntaxNode parse_if() {
    const std::size_t start = pos_;
    ++pos_;  // if / elif
    SyntaxNode n = make("If", start);
    n.children.push_back(parse_namedexpr_test());
    append(n.children, parse_suite());
    if (at("elif")) {
      n.children.push_back(parse_if());
    } else if (accept("else")) {
      append(n.children, parse_suite());
    }
    finish(n);
    return n;
  }

  SyntaxNode parse_while() {
    const std::size_t start = pos_;
    expect("while");
    SyntaxNode n = make("While", start);
    n.children.push_back(parse_namedexpr_test());
    append(n.children, parse_suite());
    if (accept("else")) append(n.children, parse_suite());
    finish(n);
    return n;
  }

  SyntaxNode parse_for(std::size_t start, bool is_async) {
    expect("for");
    SyntaxNode n = make(is_async ? "AsyncFor" : "For", start);
    n.children.push_back(parse_exprlist());
    expect("in");
    n.children.push_back(parse_testlist());
    append(n.children, parse_suite());
    if (accept("else")) append(n.children, parse_suite());
    finish(n);
    return n;
  }

  SyntaxNode parse_try() {
    const std::size_t start = pos_;
    expect("try");
    SyntaxNode n = make("Try", start);
    append(n.children, parse_suite());
    std::vector<SyntaxNode> handlers;
    while (at("except")) {
      const std::size_t h_start = pos_;
      ++pos_;
      accept("*");
      SyntaxNode h = make("ExceptHandler", h_start);
      if (!at(":")) {
        h.children.push_back(parse_test());
        if (accept("as") || accept(",")) expect_name();
      }
      append(h.children, parse_suite());
      finish(h);
      handlers.push_back(std::move(h));
    }
    append(n.children, std::move(handlers));
    if (accept("else")) append(n.children, parse_suite());
    if (accept("finally")) append(n.children, parse_suite());
    finish(n);
    return n;
  }

  // `match` is a soft keyword: only a statement when a case block follows.
  std::optional<SyntaxNode> try_parse_match() {
    const std::size_t start = pos_;
    ++pos_;
    std::optional<SyntaxNode> subject;
    try {
      subject = parse_testlist_star_expr();
    } catch (const ParseError&) {
      pos_ = start;
      return std::nullopt;
    }
    if (!at(":") || peek(1).kind != Kind::Newline || peek(2).kind != Kind::Indent || !at("case", 3)) {
      pos_ = start;
      return std::nullopt;
    }
    pos_ += 3;
    SyntaxNode n = make("Match", start);
    n.children.push_back(std::move(*subject));
    while (at("case")) {
      const std::size_t case_start = pos_++;
      SyntaxNode c = make("match_case", case_start);
      c.children.push_back(parse_open_pattern());
      if (accept("if")) c.children.push_back(parse_namedexpr_test());
      append(c.children, parse_suite());
      finish(c);
      n.children.push_back(std::move(c));
      while (peek().kind == Kind::Newline) ++pos_;
    }
    if (peek().kind == Kind::Dedent) ++pos_;
    finish(n);
    return n;
  }

  SyntaxNode parse_open_pattern() {
    const std::size_t start = pos_;
    SyntaxNode first = parse_maybe_star_pattern();
    if (!at(",")) return first;
    SyntaxNode seq = make("MatchSequence", start);
    seq.children.push_back(std::move(first));
    while (accept(",")) {
      if (at(":") || at("if")) break;
      seq.children.push_back(parse_maybe_star_pattern());
    }
    finish(seq);
    return seq;
  }

  SyntaxNode parse_maybe_star_pattern() {
    const std::size_t start = pos_;
    if (accept("*")) {
      expect_name();
      SyntaxNode n = make("MatchStar", start);
      finish(n);
      return n;
    }
    return parse_as_pattern();
  }

  SyntaxNode parse_as_pattern() {
    const std::size_t start = pos_;
    SyntaxNode first = parse_closed_pattern();
    if (at("|")) {
      SyntaxNode alt = make("MatchOr", start);
      alt.children.push_back(std::move(first));
      while (accept("|")) alt.children.push_back(parse_closed_pattern());
      finish(alt);
      first = std::move(alt);
    }
    if (!accept("as")) return first;
    expect_name();
    SyntaxNode n = make("MatchAs", start);
    n.children.push_back(std::move(first));
    finish(n);
    return n;
  }

  SyntaxNode parse_pattern_value() {
    const std::size_t start = pos_;
    SyntaxNode value = parse_factor();
    if (peek().kind == Kind::Op && (at("+") || at("-"))) {
      ++pos_;
      SyntaxNode n = make("BinOp", start);
      n.children.push_back(std::move(value));
      n.children.push_back(parse_factor());
      finish(n);
      return n;
    }
    return value;
  }

  SyntaxNode parse_closed_pattern() {
    const std::size_t start = pos_;
    const Tok& t = peek();
    if (t.kind == Kind::Name && (t.text == "None" || t.text == "True" || t.text == "False")) {
      ++pos_;
      SyntaxNode n = make("MatchSingleton", start);
      finish(n);
      return n;
    }
    if (t.kind == Kind::Number || t.kind == Kind::String || at("-")) {
      SyntaxNode n = make("MatchValue", start);
      n.children.push_back(parse_pattern_value());
      finish(n);
      return n;
    }
    if (at("(") || at("[")) {
      const bool paren = at("(");
      const std::string_view closer = paren ? ")" : "]";
      ++pos_;
      std::vector<SyntaxNode> items;
      bool trailing_comma = false;
      while (!at(closer)) {
        items.push_back(parse_maybe_star_pattern());
        trailing_comma = accept(",");
        if (!trailing_comma) break;
      }
      expect(closer);
      if (paren && items.size() == 1 && !trailing_comma && items[0].type != "MatchStar") return std::move(items[0]);
      SyntaxNode n = make("MatchSequence", start);
      append(n.children, std::move(items));
      finish(n);
      return n;
    }
    if (accept("{")) {
      SyntaxNode n = make("MatchMapping", start);
      std::vector<SyntaxNode> keys;
      std::vector<SyntaxNode> values;
      while (!at("}")) {
        if (accept("**")) {
          expect_name();
        } else {
          keys.push_back(peek().kind == Kind::Name ? parse_dotted_value() : parse_pattern_value());
          expect(":");
          values.push_back(parse_as_pattern());
        }
        if (!accept(",")) break;
      }
      expect("}");
      append(n.children, std::move(keys));
      append(n.children, std::move(values));
      finish(n);
      return n;
    }
    if (at_name()) {
      if (!at(".", 1) && !at("(", 1)) {
        ++pos_;
        SyntaxNode n = make("MatchAs", start);
        finish(n);
        return n;
      }
      SyntaxNode target = parse_dotted_value();
      if (!accept("(")) {
        SyntaxNode n = make("MatchValue", start);
        n.children.push_back(std::move(target));
        finish(n);
        return n;
      }
      SyntaxNode n = make("MatchClass", start);
      n.children.push_back(std::move(target));
      std::vector<SyntaxNode> keyword_patterns;
      while (!at(")")) {
        if (at_name() && at("=", 1)) {
          pos_ += 2;
          keyword_patterns.push_back(parse_as_pattern());
        } else {
          n.children.push_back(parse_as_pattern());
        }
        if (!accept(",")) break;
      }
      expect(")");
      append(n.children, std::move(keyword_patterns));
      finish(n);
      return n;
    }
    fail("expected pattern");
  }

  SyntaxNode parse_dotted_value() {
    const std::size_t start = pos_;
    if (!at_name()) fail("expected name");
    ++pos_;
    SyntaxNode node = make("Name", start);
    finish(node);
    while (at(".") && peek(1).kind == Kind::Name) {
      pos_ += 2;
      SyntaxNode attr = make("Attribute", start);
      attr.children.push_back(std::move(node));
      finish(attr);
      node = std::move(attr);
    }
    return node;
  }

  SyntaxNode parse_with_item() {
    const std::size_t start = pos_;
    SyntaxNode item = make("withitem", start);
    item.children.push_back(parse_test());
    if (accept("as")) item.children.push_back(parse_expr());
    finish(item);
    return item;
  }

  SyntaxNode parse_with(std::size_t start, bool is_async) {
    expect("with");
    SyntaxNode n = make(is_async ? "AsyncWith" : "With", start);
    bool parsed = false;
    if (at("(")) {
      // Parenthesized item list (3.10+) vs. a parenthesized expression.
      const std::size_t save = pos_;
      ++pos_;
      std::vector<SyntaxNode> items;
      try {
        while (!at(")")) {
          items.push_back(parse_with_item());
          if (!accept(",")) break;
        }
        expect(")");
        if (at(":")) {
          append(n.children, std::move(items));
          parsed = true;
        } else {
          pos_ = save;
        }
      } catch (const ParseError&) {
        pos_ = save;
      }
    }
    if (!parsed) {
      do {
        n.children.push_back(parse_with_item());
      } while (accept(","));
    }
    append(n.children, parse_suite());
    finish(n);
    return n;
  }

  SyntaxNode parse_decorated() {
    const std::size_t start = pos_;
    std::vector<SyntaxNode> decorators;
    while (accept("@")) {
      decorators.push_back(parse_namedexpr_test());
      expect_kind(Kind::Newline, "newline after decorator");
    }
    if (at("def")) return parse_funcdef(start, std::move(decorators), false);
    if (at("async") && at("def", 1)) {
      ++pos_;
      return parse_funcdef(start, std::move(decorators), true);
    }
    if (at("class")) return parse_classdef(start, std::move(decorators));
    fail("expected def or class after decorator");
  }

  SyntaxNode parse_funcdef(std::size_t start, std::vector<SyntaxNode> decorators, bool is_async) {
    expect("def");
    SyntaxNode n = make(is_async ? "AsyncFunctionDef" : "FunctionDef", start, expect_name());
    expect("(");
    n.children.push_back(parse_arguments(")", true));
    expect(")");
    std::optional<SyntaxNode> returns;
    if (accept("->")) returns = parse_test();
    append(n.children, parse_suite());
    append(n.children, std::move(decorators));
    if (returns) n.children.push_back(std::move(*returns));
    finish(n);
    return n;
  }

  SyntaxNode parse_classdef(std::size_t start, std::vector<SyntaxNode> decorators) {
    expect("class");
    SyntaxNode n = make("ClassDef", start, expect_name());
    if (accept("(")) {
      auto [args, keywords] = parse_call_arguments();
      append(n.children, std::move(args));
      append(n.children, std::move(keywords));
      expect(")");
    }
    append(n.children, parse_suite());
    append(n.children, std::move(decorators));
    finish(n);
    return n;
  }

  // Parameter list for def (annotations allowed) or lambda.
  SyntaxNode parse_arguments(std::string_view closer, bool annotations) {
    const std::size_t start = pos_;
    SyntaxNode args = make("arguments", start);
    std::vector<SyntaxNode> posonly, plain, kwonly, kw_defaults, defaults;
    std::optional<SyntaxNode> vararg, kwarg;
    bool after_star = false;
    auto parse_arg = [&]() {
      const std::size_t a_start = pos_;
      SyntaxNode a = make("arg", a_start, expect_name());
      if (annotations && accept(":")) a.children.push_back(parse_test());
      finish(a);
      return a;
    };
    while (!at(closer)) {
      if (accept("/")) {
        for (auto& a : plain) posonly.push_back(std::move(a));
        plain.clear();
      } else if (accept("**")) {
        kwarg = parse_arg();
      } else if (accept("*")) {
        after_star = true;
        if (at_name()) vararg = parse_arg();
      } else {
        SyntaxNode a = parse_arg();
        std::optional<SyntaxNode> dflt;
        if (accept("=")) dflt = parse_test();
        if (after_star) {
          kwonly.push_back(std::move(a));
          if (dflt) kw_defaults.push_back(std::move(*dflt));
        } else {
          plain.push_back(std::move(a));
          if (dflt) defaults.push_back(std::move(*dflt));
        }
      }
      if (!accept(",")) break;
    }
    append(args.children, std::move(posonly));
    append(args.children, std::move(plain));
    if (vararg) args.children.push_back(std::move(*vararg));
    append(args.children, std::move(kwonly));
    append(args.children, std::move(kw_defaults));
    if (kwarg) args.children.push_back(std::move(*kwarg));
    append(args.children, std::move(defaults));
    finish(args);
    return args;
  }

  // ---- expressions ---------------------------------------------------------

  SyntaxNode parse_testlist_star_expr() {
    const std::size_t start = pos_;
    SyntaxNode first = at("*") ? parse_star_expr() : parse_namedexpr_or_test();
    if (!at(",")) return first;
    SyntaxNode tuple = make("Tuple", start);
    tuple.children.push_back(std::move(first));
    while (accept(",")) {
      if (!can_start_expression()) break;
      tuple.children.push_back(at("*") ? parse_star_expr() : parse_namedexpr_or_test());
    }
    finish(tuple);
    return tuple;
  }

  SyntaxNode parse_testlist() {
    const std::size_t start = pos_;
    SyntaxNode first = at("*") ? parse_star_expr() : parse_test();
    if (!at(",")) return first;
    SyntaxNode tuple = make("Tuple", start);
    tuple.children.push_back(std::move(first));
    while (accept(",")) {
      if (!can_start_expression()) break;
      tuple.children.push_back(at("*") ? parse_star_expr() : parse_test());
    }
    finish(tuple);
    return tuple;
  }

  SyntaxNode parse_exprlist() {
    const std::size_t start = pos_;
    SyntaxNode first = at("*") ? parse_star_expr() : parse_expr();
    if (!at(",")) return first;
    SyntaxNode tuple = make("Tuple", start);
    tuple.children.push_back(std::move(first));
    while (accept(",")) {
      if (!can_start_expression() || at("in")) break;
      tuple.children.push_back(at("*") ? parse_star_expr() : parse_expr());
    }
    finish(tuple);
    return tuple;
  }

  bool can_start_expression() const {
    const Tok& t = peek();
    switch (t.kind) {
      case Kind::Number:
      case Kind::String: return true;
      case Kind::Name:
        return !is_keyword(t.text) || t.text == "None" || t.text == "True" || t.text == "False" ||
               t.text == "not" || t.text == "lambda" || t.text == "await" || t.text == "yield";
      case Kind::Op:
        return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" || t.text == "+" ||
               t.text == "~" || t.text == "*" || t.text == "..." || t.text == "**";
      default: return false;
    }
  }

  SyntaxNode parse_star_expr() {
    const std::size_t start = pos_;
    expect("*");
    SyntaxNode n = make("Starred", start);
    n.children.push_back(parse_expr());
    finish(n);
    return n;
  }

  SyntaxNode parse_yield_expr() {
    const std::size_t start = pos_;
    expect("yield");
    if (accept("from")) {
      SyntaxNode n = make("YieldFrom", start);
      n.children.push_back(parse_test());
      finish(n);
      return n;
    }
    SyntaxNode n = make("Yield", start);
    if (can_start_expression() && !at("yield")) n.children.push_back(parse_testlist_star_expr());
    finish(n);
    return n;
  }

  SyntaxNode parse_namedexpr_or_test() { return parse_namedexpr_test(); }

  SyntaxNode parse_namedexpr_test() {
    const std::size_t start = pos_;
    SyntaxNode t = parse_test();
    if (!accept(":=")) return t;
    SyntaxNode n = make("NamedExpr", start);
    n.children.push_back(std::move(t));
    n.children.push_back(parse_test());
    finish(n);
    return n;
  }

  SyntaxNode parse_test() {
    if (at("lambda")) return parse_lambda(false);
    const std::size_t start = pos_;
    SyntaxNode body = parse_or_test();
    if (!at("if")) return body;
    // `x if c else y` is an IfExp(test, body, orelse).
    ++pos_;
    SyntaxNode test = parse_or_test();
    expect("else");
    SyntaxNode orelse = parse_test();
    SyntaxNode n = make("IfExp", start);
    n.children.push_back(std::move(test));
    n.children.push_back(std::move(body));
    n.children.push_back(std::move(orelse));
    finish(n);
    return n;
  }

  SyntaxNode parse_test_nocond() {
    if (at("lambda")) return parse_lambda(true);
    return parse_or_test();
  }

  SyntaxNode parse_lambda(bool nocond) {
    const std::size_t start = pos_;
    expect("lambda");
    SyntaxNode n = make("Lambda", start);
    n.children.push_back(parse_arguments(":", false));
    expect(":");
    n.children.push_back(nocond ? parse_test_nocond() : parse_test());
    finish(n);
    return n;
  }

  SyntaxNode parse_bool_chain(const char* op, SyntaxNode (Parser::*next)()) {
    const std::size_t start = pos_;
    SyntaxNode first = (this->*next)();
    if (!at(op)) return first;
    SyntaxNode n = make("BoolOp", start);
    n.children.push_back(std::move(first));
    while (accept(op)) n.children.push_back((this->*next)());
    finish(n);
    return n;
  }

  SyntaxNode parse_or_test() { return parse_bool_chain("or", &Parser::parse_and_test); }
  SyntaxNode parse_and_test() { return parse_bool_chain("and", &Parser::parse_not_test); }

  SyntaxNode parse_not_test() {
    const std::size_t start = pos_;
    if (accept("not")) {
      SyntaxNode n = make("UnaryOp", start);
      n.children.push_back(parse_not_test());
      finish(n);
      return n;
    }
    return parse_comparison();
  }

  bool accept_comp_op() {
    const Tok& t = peek();
    if (t.kind == Kind::Op &&
        (t.text == "<" || t.text == ">" || t.text == "==" || t.text == ">=" || t.text == "<=" ||
         t.text == "!=")) {
      ++pos_;
      return true;
    }
    if (at("in")) {
      ++pos_;
      return true;
    }
    if (at("not") && at("in", 1)) {
      pos_ += 2;
      return true;
    }
    if (at("is")) {
      ++pos_;
      accept("not");
      return true;
    }
    return false;
  }

  SyntaxNode parse_comparison() {
    const std::size_t start = pos_;
    SyntaxNode left = parse_expr();
    if (!accept_comp_op()) return left;
    SyntaxNode n = make("Compare", start);
    n.children.push_back(std::move(left));
    n.children.push_back(parse_expr());
    while (accept_comp_op()) n.children.push_back(parse_expr());
    finish(n);
    return n;
  }

  static int binop_precedence(std::string_view op) {
    if (op == "|") return 1;
    if (op == "^") return 2;
    if (op == "&") return 3;
    if (op == "<<" || op == ">>") return 4;
    if (op == "+" || op == "-") return 5;
    if (op == "*" || op == "/" || op == "//" || op == "%" || op == "@") return 6;
    return 0;
  }

  SyntaxNode parse_expr() { return parse_binop(0); }

  SyntaxNode parse_binop(int min_prec) {
    const std::size_t start = pos_;
    SyntaxNode lhs = parse_factor();
    while (peek().kind == Kind::Op) {
      const int prec = binop_precedence(peek().text);
      if (prec == 0 || prec <= min_prec) break;
      ++pos_;
      SyntaxNode n = make("BinOp", start);
      n.children.push_back(std::move(lhs));
      n.children.push_back(parse_binop(prec));
      finish(n);
      lhs = std::move(n);
    }
    return lhs;
  }

  SyntaxNode parse_factor() {
    const std::size_t start = pos_;
    if (peek().kind == Kind::Op && (at("-") || at("+") || at("~"))) {
      ++pos_;
      SyntaxNode n = make("UnaryOp", start);
      n.children.push_back(parse_factor());
      finish(n);
      return n;
    }
    return parse_power();
  }

  SyntaxNode parse_power() {
    const std::size_t start = pos_;
    SyntaxNode base = parse_await_primary();
    if (!accept("**")) return base;
    SyntaxNode n = make("BinOp", start);
    n.children.push_back(std::move(base));
    n.children.push_back(parse_factor());
    finish(n);
    return n;
  }

  SyntaxNode parse_await_primary() {
    const std::size_t start = pos_;
    if (accept("await")) {
      SyntaxNode n = make("Await", start);
      n.children.push_back(parse_atom_trailers());
      finish(n);
      return n;
    }
    return parse_atom_trailers();
  }

  SyntaxNode parse_atom_trailers() {
    const std::size_t start = pos_;
    SyntaxNode node = parse_atom();
    while (true) {
      if (accept("(")) {
        SyntaxNode call = make("Call", start);
        call.children.push_back(std::move(node));
        auto [args, keywords] = parse_call_arguments();
        append(call.children, std::move(args));
        append(call.children, std::move(keywords));
        expect(")");
        finish(call);
        node = std::move(call);
      } else if (accept("[")) {
        SyntaxNode sub = make("Subscript", start);
        sub.children.push_back(std::move(node));
        sub.children.push_back(parse_subscript_list());
        expect("]");
        finish(sub);
        node = std::move(sub);
      } else if (at(".") && peek(1).kind == Kind::Name) {
        pos_ += 2;
        SyntaxNode attr = make("Attribute", start);
        attr.children.push_back(std::move(node));
        finish(attr);
        node = std::move(attr);
      } else {
        break;
      }
    }
    return node;
  }

  std::pair<std::vector<SyntaxNode>, std::vector<SyntaxNode>> parse_call_arguments() {
    std::vector<SyntaxNode> args;
    std::vector<SyntaxNode> keywords;
    while (!at(")")) {
      const std::size_t start = pos_;
      if (accept("**")) {
        SyntaxNode kw = make("keyword", start);
        kw.children.push_back(parse_test());
        finish(kw);
        keywords.push_back(std::move(kw));
      } else if (at("*")) {
        args.push_back(parse_star_expr());
      } else if (at_name() && at("=", 1)) {
        pos_ += 2;
        SyntaxNode kw = make("keyword", start);
        kw.children.push_back(parse_test());
        finish(kw);
        keywords.push_back(std::move(kw));
      } else {
        SyntaxNode value = parse_namedexpr_test();
        if (at("for") || (at("async") && at("for", 1))) {
          SyntaxNode gen = make("GeneratorExp", start);
          gen.children.push_back(std::move(value));
          append(gen.children, parse_comprehensions());
          finish(gen);
          args.push_back(std::move(gen));
        } else {
          args.push_back(std::move(value));
        }
      }
      if (!accept(",")) break;
    }
    return {std::move(args), std::move(keywords)};
  }

  SyntaxNode parse_subscript() {
    const std::size_t start = pos_;
    std::optional<SyntaxNode> lower;
    if (!at(":")) {
      SyntaxNode e = parse_namedexpr_test();
      if (!at(":")) return e;
      lower = std::move(e);
    }
    expect(":");
    SyntaxNode slice = make("Slice", start);
    if (lower) slice.children.push_back(std::move(*lower));
    if (!at(":") && !at("]") && !at(",")) slice.children.push_back(parse_test());
    if (accept(":")) {
      if (!at("]") && !at(",")) slice.children.push_back(parse_test());
    }
    finish(slice);
    return slice;
  }

  SyntaxNode parse_subscript_list() {
    const std::size_t start = pos_;
    SyntaxNode first = at("*") ? parse_star_expr() : parse_subscript();
    if (!at(",")) return first;
    SyntaxNode tuple = make("Tuple", start);
    tuple.children.push_back(std::move(first));
    while (accept(",")) {
      if (at("]")) break;
      tuple.children.push_back(at("*") ? parse_star_expr() : parse_subscript());
    }
    finish(tuple);
    return tuple;
  }

  std::vector<SyntaxNode> parse_comprehensions() {
    std::vector<SyntaxNode> gens;
    while (at("for") || (at("async") && at("for", 1))) {
      const std::size_t start = pos_;
      accept("async");
      expect("for");
      SyntaxNode comp = make("comprehension", start);
      comp.children.push_back(parse_exprlist());
      expect("in");
      comp.children.push_back(parse_or_test());
      while (accept("if")) comp.children.push_back(parse_test_nocond());
      finish(comp);
      gens.push_back(std::move(comp));
    }
    return gens;
  }

  SyntaxNode parse_atom() {
    const std::size_t start = pos_;
    const Tok& t = peek();
    switch (t.kind) {
      case Kind::Number: {
        ++pos_;
        SyntaxNode n = make("Constant", start);
        finish(n);
        return n;
      }
      case Kind::String: return parse_strings();
      case Kind::Name: {
        if (t.text == "None" || t.text == "True" || t.text == "False") {
          ++pos_;
          SyntaxNode n = make("Constant", start);
          finish(n);
          return n;
        }
        if (is_keyword(t.text)) fail("unexpected keyword");
        ++pos_;
        SyntaxNode n = make("Name", start);
        finish(n);
        return n;
      }
      case Kind::Op: {
        if (t.text == "...") {
          ++pos_;
          SyntaxNode n = make("Constant", start);
          finish(n);
          return n;
        }
        if (t.text == "(") return parse_paren();
        if (t.text == "[") return parse_list();
        if (t.text == "{") return parse_brace();
        break;
      }
      default: break;
    }
    fail("expected expression");
  }

  SyntaxNode parse_paren() {
    const std::size_t start = pos_;
    expect("(");
    if (accept(")")) {
      SyntaxNode n = make("Tuple", start);
      finish(n);
      return n;
    }
    if (at("yield")) {
      SyntaxNode y = parse_yield_expr();
      expect(")");
      return y;
    }
    SyntaxNode first = at("*") ? parse_star_expr() : parse_namedexpr_test();
    if (at("for") || (at("async") && at("for", 1))) {
      SyntaxNode gen = make("GeneratorExp", start);
      gen.children.push_back(std::move(first));
      append(gen.children, parse_comprehensions());
      expect(")");
      finish(gen);
      return gen;
    }
    if (accept(")")) {
      first.span.begin = std::min(first.span.begin, toks_[start].begin);
      return first;
    }
    SyntaxNode tuple = make("Tuple", start);
    tuple.children.push_back(std::move(first));
    while (accept(",")) {
      if (at(")")) break;
      tuple.children.push_back(at("*") ? parse_star_expr() : parse_namedexpr_test());
    }
    expect(")");
    finish(tuple);
    return tuple;
  }

  SyntaxNode parse_list() {
    const std::size_t start = pos_;
    expect("[");
    SyntaxNode n = make("List", start);
    if (accept("]")) {
      finish(n);
      return n;
    }
    SyntaxNode first = at("*") ? parse_star_expr() : parse_namedexpr_test();
    if (at("for") || (at("async") && at("for", 1))) {
      n.type = "ListComp";
      n.children.push_back(std::move(first));
      append(n.children, parse_comprehensions());
      expect("]");
      finish(n);
      return n;
    }
    n.children.push_back(std::move(first));
    while (accept(",")) {
      if (at("]")) break;
      n.children.push_back(at("*") ? parse_star_expr() : parse_namedexpr_test());
    }
    expect("]");
    finish(n);
    return n;
  }

  SyntaxNode parse_brace() {
    const std::size_t start = pos_;
    expect("{");
    if (accept("}")) {
      SyntaxNode n = make("Dict", start);
      finish(n);
      return n;
    }
    // Dict: keys then values; `**m` entries contribute only a value.
    auto parse_dict_rest = [&](std::optional<SyntaxNode> key, SyntaxNode value) {
      std::vector<SyntaxNode> keys, values;
      if (key) keys.push_back(std::move(*key));
      values.push_back(std::move(value));
      while (accept(",")) {
        if (at("}")) break;
        if (accept("**")) {
          values.push_back(parse_expr());
          continue;
        }
        keys.push_back(parse_test());
        expect(":");
        values.push_back(parse_test());
      }
      expect("}");
      SyntaxNode n = make("Dict", start);
      append(n.children, std::move(keys));
      append(n.children, std::move(values));
      finish(n);
      return n;
    };
    if (accept("**")) return parse_dict_rest(std::nullopt, parse_expr());
    SyntaxNode first = at("*") ? parse_star_expr() : parse_namedexpr_test();
    if (accept(":")) {
      SyntaxNode value = parse_test();
      if (at("for") || (at("async") && at("for", 1))) {
        SyntaxNode n = make("DictComp", start);
        n.children.push_back(std::move(first));
        n.children.push_back(std::move(value));
        append(n.children, parse_comprehensions());
        expect("}");
        finish(n);
        return n;
      }
      return parse_dict_rest(std::move(first), std::move(value));
    }
    SyntaxNode n = make("Set", start);
    if (at("for") || (at("async") && at("for", 1))) {
      n.type = "SetComp";
      n.children.push_back(std::move(first));
      append(n.children, parse_comprehensions());
      expect("}");
      finish(n);
      return n;
    }
    n.children.push_back(std::move(first));
    while (accept(",")) {
      if (at("}")) break;
      n.children.push_back(at("*") ? parse_star_expr() : parse_namedexpr_test());
    }
    expect("}");
    finish(n);
    return n;
  }

  // ---- string literals -----------------------------------------------------

  struct StringPiece {
    std::string prefix;  // lower-cased
    std::size_t body_begin;  // absolute offsets of the text between quotes
    std::size_t body_end;
  };

  StringPiece split_string(const Tok& t) const {
    std::size_t p = 0;
    while (p < t.text.size() && t.text[p] != '"' && t.text[p] != '\'') ++p;
    std::string prefix = t.text.substr(0, p);
    for (char& c : prefix) c = static_cast<char>(c | 0x20);
    const char q = t.text[p];
    const bool triple = t.text.compare(p, 3, std::string(3, q)) == 0 && t.text.size() >= p + 6;
    const std::size_t qlen = triple ? 3 : 1;
    return {prefix, t.begin + p + qlen, t.end - qlen};
  }

  // Adjacent literals concatenate; any f-string turns the result into a
  // JoinedStr of Constant and FormattedValue parts.
  SyntaxNode parse_strings() {
    const std::size_t start = pos_;
    std::vector<StringPiece> pieces;
    while (peek().kind == Kind::String) pieces.push_back(split_string(toks_[pos_++]));
    const bool formatted = std::any_of(pieces.begin(), pieces.end(), [](const StringPiece& p) {
      return p.prefix.find('f') != std::string::npos;
    });
    if (!formatted) {
      SyntaxNode n = make("Constant", start);
      finish(n);
      return n;
    }
    SyntaxNode joined = make("JoinedStr", start);
    bool pending_text = false;
    std::size_t text_begin = 0;
    std::function<void(std::size_t)> flush_text = [&](std::size_t end) {
      if (!pending_text) return;
      SyntaxNode c;
      c.type = "Constant";
      c.span = {text_begin, end};
      joined.children.push_back(std::move(c));
      pending_text = false;
    };
    for (const StringPiece& piece : pieces) {
      if (piece.prefix.find('f') == std::string::npos) {
        if (piece.body_end > piece.body_begin && !pending_text) {
          pending_text = true;
          text_begin = piece.body_begin;
        }
        continue;
      }
      parse_fstring_body(piece.body_begin, piece.body_end, joined, pending_text, text_begin, flush_text);
    }
    flush_text(toks_[pos_ - 1].end);
    finish(joined);
    return joined;
  }

  void parse_fstring_body(std::size_t begin, std::size_t end, SyntaxNode& joined, bool& pending_text,
                          std::size_t& text_begin, const std::function<void(std::size_t)>& flush_text) {
    const std::string_view all = src_;
    auto at_abs = [&](std::size_t i) { return all[i - base_]; };
    std::size_t i = begin;
    while (i < end) {
      const char c = at_abs(i);
      if ((c == '{' || c == '}') && i + 1 < end && at_abs(i + 1) == c) {
        if (!pending_text) {
          pending_text = true;
          text_begin = i;
        }
        i += 2;
        continue;
      }
      if (c != '{') {
        if (!pending_text) {
          pending_text = true;
          text_begin = i;
        }
        ++i;
        continue;
      }
      flush_text(i);
      const std::size_t field_begin = i;
      // Find the expression end: top-level '!', ':' or '}'.
      int depth = 0;
      std::size_t j = i + 1;
      std::size_t expr_end = std::string::npos;
      char quote = 0;
      for (; j < end; ++j) {
        const char d = at_abs(j);
        if (quote) {
          if (d == quote) quote = 0;
          continue;
        }
        if (d == '\'' || d == '"') {
          quote = d;
        } else if (d == '(' || d == '[' || d == '{') {
          ++depth;
        } else if ((d == ')' || d == ']' || d == '}') && depth > 0) {
          --depth;
        } else if (depth == 0 && (d == '}' || d == ':' || (d == '!' && j + 1 < end && at_abs(j + 1) != '='))) {
          expr_end = j;
          break;
        }
      }
      if (expr_end == std::string::npos) throw ParseError(field_begin, "unterminated f-string field");
      std::size_t expr_text_end = expr_end;
      // `{x=}` self-documenting form.
      while (expr_text_end > i + 1 && (at_abs(expr_text_end - 1) == ' ')) --expr_text_end;
      if (expr_text_end > i + 1 && at_abs(expr_text_end - 1) == '=' &&
          !(expr_text_end > i + 2 && std::string_view("=!<>").find(at_abs(expr_text_end - 2)) != std::string_view::npos)) {
        --expr_text_end;
      }
      const std::string_view expr_src = all.substr(i + 1 - base_, expr_text_end - (i + 1));
      Parser sub(expr_src, i + 1);
      SyntaxNode value = sub.parse_standalone_expression();
      SyntaxNode fv;
      fv.type = "FormattedValue";
      fv.children.push_back(std::move(value));
      j = expr_end;
      if (at_abs(j) == '!') j += 2;
      if (j < end && at_abs(j) == ':') {
        // Format spec: literal text with nested replacement fields.
        const std::size_t spec_begin = j + 1;
        int nest = 0;
        std::size_t k = spec_begin;
        for (; k < end; ++k) {
          const char d = at_abs(k);
          if (d == '{') ++nest;
          if (d == '}') {
            if (nest == 0) break;
            --nest;
          }
        }
        SyntaxNode spec;
        spec.type = "JoinedStr";
        spec.span = {spec_begin, k};
        bool spec_pending = false;
        std::size_t spec_text_begin = 0;
        std::function<void(std::size_t)> spec_flush = [&](std::size_t e) {
          if (!spec_pending) return;
          SyntaxNode cst;
          cst.type = "Constant";
          cst.span = {spec_text_begin, e};
          spec.children.push_back(std::move(cst));
          spec_pending = false;
        };
        parse_fstring_body(spec_begin, k, spec, spec_pending, spec_text_begin, spec_flush);
        spec_flush(k);
        fv.children.push_back(std::move(spec));
        j = k;
      }
      if (j >= end || at_abs(j) != '}') throw ParseError(field_begin, "unterminated f-string field");
      fv.span = {field_begin, j + 1};
      joined.children.push_back(std::move(fv));
      i = j + 1;
    }
  }
};

}  // namespace python

/// Parses Python 3 source into a Module node. Throws ParseError.
inline SyntaxNode parse_python(std::string_view code) {
  python::Parser parser(code);
  return parser.parse_module();
}

/// Token range of the first `def` header: `def` through the header ':'.
inline std::optional<TokenRange> find_python_signature(std::string_view code) {
  const auto toks = scan_code(code, Language::Python);
  auto text = [&](std::size_t i) { return code.substr(toks[i].begin, toks[i].end - toks[i].begin); };
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].kind != TokenKind::Identifier || text(i) != "def") continue;
    std::size_t j = i + 1;
    while (j < toks.size() && toks[j].kind == TokenKind::Comment) ++j;
    if (j >= toks.size() || toks[j].kind != TokenKind::Identifier || python::is_keyword(text(j))) continue;
    ++j;
    while (j < toks.size() && toks[j].kind == TokenKind::Comment) ++j;
    if (j >= toks.size() || text(j) != "(") continue;
    int depth = 0;
    std::optional<std::size_t> colon;
    for (; j < toks.size(); ++j) {
      if (toks[j].kind == TokenKind::String || toks[j].kind == TokenKind::Comment) continue;
      const std::string_view t = text(j);
      if (t == "(" || t == "[" || t == "{") ++depth;
      if (t == ")" || t == "]" || t == "}") --depth;
      if (depth < 0) break;
      if (depth == 0 && t == ":") {
        colon = j;
        break;
      }
    }
    if (colon) return TokenRange{i, *colon};
  }
  return std::nullopt;
}

}  // namespace codesum
