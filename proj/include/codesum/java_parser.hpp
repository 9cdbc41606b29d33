#pragma once

// Recursive-descent Java parser producing a javalang-shaped tree: node type
// names and child order follow javalang's attribute order so the pre-order
// rendering lines up with what javalang-based pipelines emit.

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "codesum/error.hpp"
#include "codesum/lexer.hpp"
#include "codesum/syntax_tree.hpp"

namespace codesum {

/// Inclusive range of lex_code token indices.
struct TokenRange {
  std::size_t first = 0;
  std::size_t last = 0;

  bool operator==(const TokenRange&) const = default;
};

namespace java {

inline bool is_keyword(std::string_view s) {
  static constexpr std::array<std::string_view, 53> kKeywords = {
      "abstract", "assert",     "boolean",   "break",     "byte",      "case",
      "catch",    "char",       "class",     "const",     "continue",  "default",
      "do",       "double",     "else",      "enum",      "extends",   "final",
      "finally",  "float",      "for",       "goto",      "if",        "implements",
      "import",   "instanceof", "int",       "interface", "long",      "native",
      "new",      "package",    "private",   "protected", "public",    "return",
      "short",    "static",     "strictfp",  "super",     "switch",    "synchronized",
      "this",     "throw",      "throws",    "transient", "try",       "void",
      "volatile", "while",      "true",      "false",     "null"};
  return std::find(kKeywords.begin(), kKeywords.end(), s) != kKeywords.end();
}

inline bool is_basic_type(std::string_view s) {
  return s == "byte" || s == "short" || s == "char" || s == "int" || s == "long" || s == "float" ||
         s == "double" || s == "boolean";
}

inline bool is_modifier(std::string_view s) {
  return s == "public" || s == "protected" || s == "private" || s == "static" || s == "abstract" ||
         s == "final" || s == "native" || s == "synchronized" || s == "transient" ||
         s == "volatile" || s == "strictfp" || s == "default";
}

inline bool is_assignment_op(std::string_view s) {
  return s == "=" || s == "+=" || s == "-=" || s == "*=" || s == "/=" || s == "%=" || s == "&=" ||
         s == "|=" || s == "^=" || s == "<<=" || s == ">>=" || s == ">>>=";
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {
    const auto scanned = scan_code(src, Language::Java);
    for (std::size_t i = 0; i < scanned.size(); ++i) {
      const LexToken& t = scanned[i];
      if (t.kind == TokenKind::Comment) continue;
      toks_.push_back({std::string(src.substr(t.begin, t.end - t.begin)), t.kind, t.begin, t.end, i});
    }
    eof_ = {"", TokenKind::Other, src.size(), src.size(), scanned.size()};
  }

  /// Top level: a compilation unit, or (the common corpus case) a bare
  /// sequence of member declarations.
  std::vector<SyntaxNode> parse_unit() {
    std::vector<SyntaxNode> header;
    const std::size_t start = pos_;
    if (at("package")) header.push_back(parse_package());
    while (at("import")) header.push_back(parse_import());
    std::vector<SyntaxNode> members;
    while (!at_eof()) {
      if (accept(";")) continue;
      members.push_back(parse_member());
    }
    if (header.empty()) return members;
    SyntaxNode unit = make("CompilationUnit", start);
    for (auto& n : header) unit.children.push_back(std::move(n));
    for (auto& n : members) unit.children.push_back(std::move(n));
    finish(unit);
    std::vector<SyntaxNode> out;
    out.push_back(std::move(unit));
    return out;
  }

  /// First method/constructor header in source order, located without
  /// requiring the rest of the code to parse.
  std::optional<TokenRange> find_first_header() {
    for (std::size_t cand = 0; cand < toks_.size(); ++cand) {
      if (cand > 0) {
        const std::string& prev = toks_[cand - 1].text;
        if (prev != ";" && prev != "{" && prev != "}") continue;
      }
      pos_ = cand;
      undo_.clear();
      std::optional<TokenRange> found;
      speculate([&] { found = parse_header_only(); });
      if (found) return found;
    }
    return std::nullopt;
  }

 private:
  struct Tok {
    std::string text;
    TokenKind kind;
    std::size_t begin;
    std::size_t end;
    std::size_t lex;
  };

  std::string_view src_;
  std::vector<Tok> toks_;
  Tok eof_;
  std::size_t pos_ = 0;
  std::vector<std::pair<std::size_t, Tok>> undo_;
  bool no_lambda_ = false;

  // ---- token helpers -------------------------------------------------------

  const Tok& peek(std::size_t k = 0) const {
    return pos_ + k < toks_.size() ? toks_[pos_ + k] : eof_;
  }
  bool at_eof() const { return pos_ >= toks_.size(); }
  bool at(std::string_view text, std::size_t k = 0) const {
    const Tok& t = peek(k);
    return t.text == text && t.kind != TokenKind::String;
  }
  bool accept(std::string_view text) {
    if (!at(text)) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& what) const {
    const Tok& t = peek();
    throw ParseError(t.begin, what + (at_eof() ? " at end of input" : " near '" + t.text + "'"));
  }
  void expect(std::string_view text) {
    if (!accept(text)) fail("expected '" + std::string(text) + "'");
  }
  bool at_ident(std::size_t k = 0) const {
    const Tok& t = peek(k);
    return t.kind == TokenKind::Identifier && !is_keyword(t.text);
  }
  std::string expect_ident() {
    if (!at_ident()) fail("expected identifier");
    return toks_[pos_++].text;
  }
  bool at_literal() const {
    const Tok& t = peek();
    return t.kind == TokenKind::Number || t.kind == TokenKind::String || t.text == "true" ||
           t.text == "false" || t.text == "null";
  }

  // A '>' that closes type arguments may be glued into '>>', '>>>', '>=' etc.
  void expect_close_angle() {
    if (accept(">")) return;
    if (pos_ < toks_.size() && toks_[pos_].kind == TokenKind::Operator &&
        toks_[pos_].text.size() > 1 && toks_[pos_].text[0] == '>') {
      undo_.push_back({pos_, toks_[pos_]});
      toks_[pos_].text.erase(0, 1);
      toks_[pos_].begin += 1;
      return;
    }
    fail("expected '>'");
  }

  template <class F>
  bool speculate(F&& body) {
    const std::size_t saved_pos = pos_;
    const std::size_t saved_undo = undo_.size();
    const bool saved_no_lambda = no_lambda_;
    try {
      body();
      return true;
    } catch (const ParseError&) {
      while (undo_.size() > saved_undo) {
        toks_[undo_.back().first] = undo_.back().second;
        undo_.pop_back();
      }
      pos_ = saved_pos;
      no_lambda_ = saved_no_lambda;
      return false;
    }
  }

  // Runs `body` and then rewinds unconditionally; returns whether it parsed.
  template <class F>
  bool lookahead(F&& body) {
    const std::size_t saved_pos = pos_;
    const std::size_t saved_undo = undo_.size();
    const bool ok = speculate(std::forward<F>(body));
    while (undo_.size() > saved_undo) {
      toks_[undo_.back().first] = undo_.back().second;
      undo_.pop_back();
    }
    pos_ = saved_pos;
    return ok;
  }

  SyntaxNode make(std::string type, std::size_t start_tok, std::string name = {}) const {
    SyntaxNode n;
    n.type = std::move(type);
    n.name = std::move(name);
    const std::size_t b = start_tok < toks_.size() ? toks_[start_tok].begin : src_.size();
    n.span = {b, b};
    return n;
  }
  void finish(SyntaxNode& n) const {
    if (pos_ > 0) n.span.end = std::max(n.span.begin, toks_[pos_ - 1].end);
  }

  static void append(std::vector<SyntaxNode>& into, std::vector<SyntaxNode>&& from) {
    for (auto& n : from) into.push_back(std::move(n));
  }

  // ---- declarations --------------------------------------------------------

  SyntaxNode parse_package() {
    const std::size_t start = pos_;
    expect("package");
    std::string name = parse_qualified_name();
    expect(";");
    SyntaxNode n = make("PackageDeclaration", start);
    (void)name;
    finish(n);
    return n;
  }

  SyntaxNode parse_import() {
    const std::size_t start = pos_;
    expect("import");
    accept("static");
    expect_ident();
    while (accept(".")) {
      if (accept("*")) break;
      expect_ident();
    }
    expect(";");
    SyntaxNode n = make("Import", start);
    finish(n);
    return n;
  }

  std::string parse_qualified_name() {
    std::string name = expect_ident();
    while (at(".") && at_ident(1)) {
      ++pos_;
      name += "." + expect_ident();
    }
    return name;
  }

  struct Modifiers {
    std::vector<SyntaxNode> annotations;
    std::optional<std::size_t> first_keyword;
  };

  Modifiers parse_modifiers() {
    Modifiers mods;
    while (true) {
      if (at("@") && !at("interface", 1)) {
        mods.annotations.push_back(parse_annotation());
        continue;
      }
      if (is_modifier(peek().text) && peek().kind == TokenKind::Identifier) {
        // `default:` in a switch is not a modifier; callers never route it here.
        if (!mods.first_keyword) mods.first_keyword = pos_;
        ++pos_;
        continue;
      }
      if ((peek().text == "sealed" || peek().text == "non") && at_ident(1)) {
        if (peek().text == "non" && !(at("-", 1) && peek(2).text == "sealed")) break;
        if (!mods.first_keyword) mods.first_keyword = pos_;
        pos_ += peek().text == "non" ? 3 : 1;
        continue;
      }
      break;
    }
    return mods;
  }

  SyntaxNode parse_annotation() {
    const std::size_t start = pos_;
    expect("@");
    std::string name = parse_qualified_name();
    SyntaxNode n = make("Annotation", start);
    if (accept("(")) {
      if (!at(")")) {
        if (at_ident() && at("=", 1)) {
          do {
            const std::size_t pair_start = pos_;
            expect_ident();
            expect("=");
            SyntaxNode pair = make("ElementValuePair", pair_start);
            pair.children.push_back(parse_element_value());
            finish(pair);
            n.children.push_back(std::move(pair));
          } while (accept(","));
        } else {
          n.children.push_back(parse_element_value());
        }
      }
      expect(")");
    }
    (void)name;
    finish(n);
    return n;
  }

  SyntaxNode parse_element_value() {
    if (at("@")) return parse_annotation();
    if (at("{")) {
      const std::size_t start = pos_;
      expect("{");
      SyntaxNode arr = make("ElementArrayValue", start);
      while (!at("}")) {
        arr.children.push_back(parse_element_value());
        if (!accept(",")) break;
      }
      expect("}");
      finish(arr);
      return arr;
    }
    return parse_ternary();
  }

  std::vector<SyntaxNode> parse_type_parameters() {
    std::vector<SyntaxNode> params;
    expect("<");
    do {
      const std::size_t start = pos_;
      while (at("@")) parse_annotation();
      SyntaxNode tp = make("TypeParameter", start, expect_ident());
      if (accept("extends")) {
        do {
          tp.children.push_back(parse_type());
        } while (accept("&"));
      }
      finish(tp);
      params.push_back(std::move(tp));
    } while (accept(","));
    expect_close_angle();
    return params;
  }

  std::vector<SyntaxNode> parse_class_body() {
    expect("{");
    std::vector<SyntaxNode> members;
    while (!at("}")) {
      if (at_eof()) fail("unterminated class body");
      if (accept(";")) continue;
      members.push_back(parse_member());
    }
    expect("}");
    return members;
  }

  // Class/interface/enum member or top-level type declaration.
  SyntaxNode parse_member() {
    const std::size_t start = pos_;
    if (at("{") || (at("static") && at("{", 1))) {
      accept("static");
      SyntaxNode block = make("BlockStatement", start);
      block.children = parse_block();
      finish(block);
      return block;
    }
    Modifiers mods = parse_modifiers();
    if (at("class")) return parse_class_decl(start, std::move(mods));
    if (at("interface")) return parse_interface_decl(start, std::move(mods));
    if (at("enum")) return parse_enum_decl(start, std::move(mods));
    if (at("@") && at("interface", 1)) return parse_annotation_decl(start, std::move(mods));
    if (peek().text == "record" && at_ident(1) && (at("(", 2) || at("<", 2))) {
      return parse_record_decl(start, std::move(mods));
    }

    std::vector<SyntaxNode> type_params;
    const std::size_t header_start = mods.first_keyword.value_or(pos_);
    if (at("<")) type_params = parse_type_parameters();

    if (at_ident() && at("(", 1)) {
      SyntaxNode ctor = make("ConstructorDeclaration", header_start, expect_ident());
      append(ctor.children, std::move(mods.annotations));
      append(ctor.children, std::move(type_params));
      append(ctor.children, parse_formal_parameters());
      parse_throws();
      if (!accept(";")) append(ctor.children, parse_block());
      finish(ctor);
      return ctor;
    }
    if (type_params.empty() && at_ident() && at("{", 1)) {
      SyntaxNode ctor = make("ConstructorDeclaration", header_start, expect_ident());
      append(ctor.children, std::move(mods.annotations));
      append(ctor.children, parse_block());
      finish(ctor);
      return ctor;
    }

    std::optional<SyntaxNode> return_type;
    if (!accept("void")) return_type = parse_type();
    const std::size_t name_pos = pos_;
    std::string name = expect_ident();
    if (at("(")) {
      SyntaxNode method = make("MethodDeclaration", header_start, std::move(name));
      append(method.children, std::move(mods.annotations));
      append(method.children, std::move(type_params));
      if (return_type) method.children.push_back(std::move(*return_type));
      append(method.children, parse_formal_parameters());
      while (at("[") && at("]", 1)) pos_ += 2;
      parse_throws();
      if (accept("default")) method.children.push_back(parse_element_value());
      if (!accept(";")) append(method.children, parse_block());
      finish(method);
      return method;
    }
    if (!return_type) fail("field cannot have type void");
    pos_ = name_pos;
    SyntaxNode field = make("FieldDeclaration", start);
    append(field.children, std::move(mods.annotations));
    field.children.push_back(std::move(*return_type));
    append(field.children, parse_variable_declarators());
    expect(";");
    finish(field);
    return field;
  }

  // Header-only grammar used for signature extraction.
  TokenRange parse_header_only() {
    Modifiers mods = parse_modifiers();
    const std::size_t header_start = mods.first_keyword.value_or(pos_);
    if (at("<")) parse_type_parameters();
    bool constructor = false;
    if (at_ident() && at("(", 1)) {
      expect_ident();
      constructor = true;
    } else {
      if (!accept("void")) parse_type();
      expect_ident();
    }
    parse_formal_parameters();
    const std::size_t close = pos_ - 1;
    while (at("[") && at("]", 1)) pos_ += 2;
    if (accept("throws")) {
      do {
        parse_type();
      } while (accept(","));
    }
    if (!(at("{") || (!constructor && at(";")) || (!constructor && at("default")))) {
      fail("not a declaration header");
    }
    return {toks_[header_start].lex, toks_[close].lex};
  }

  void parse_throws() {
    if (!accept("throws")) return;
    do {
      parse_qualified_name();
    } while (accept(","));
  }

  SyntaxNode parse_class_decl(std::size_t start, Modifiers mods) {
    expect("class");
    SyntaxNode n = make("ClassDeclaration", start, expect_ident());
    std::vector<SyntaxNode> type_params;
    std::vector<SyntaxNode> extends;
    std::vector<SyntaxNode> implements;
    if (at("<")) type_params = parse_type_parameters();
    if (accept("extends")) extends.push_back(parse_type());
    if (accept("implements")) {
      do {
        implements.push_back(parse_type());
      } while (accept(","));
    }
    if (accept("permits")) {
      do {
        parse_type();
      } while (accept(","));
    }
    append(n.children, std::move(mods.annotations));
    append(n.children, parse_class_body());
    append(n.children, std::move(type_params));
    append(n.children, std::move(extends));
    append(n.children, std::move(implements));
    finish(n);
    return n;
  }

  SyntaxNode parse_record_decl(std::size_t start, Modifiers mods) {
    ++pos_;  // record
    SyntaxNode n = make("RecordDeclaration", start, expect_ident());
    std::vector<SyntaxNode> type_params;
    if (at("<")) type_params = parse_type_parameters();
    std::vector<SyntaxNode> components = parse_formal_parameters();
    std::vector<SyntaxNode> implements;
    if (accept("implements")) {
      do {
        implements.push_back(parse_type());
      } while (accept(","));
    }
    append(n.children, std::move(mods.annotations));
    append(n.children, std::move(components));
    append(n.children, parse_class_body());
    append(n.children, std::move(type_params));
    append(n.children, std::move(implements));
    finish(n);
    return n;
  }

  SyntaxNode parse_interface_decl(std::size_t start, Modifiers mods) {
    expect("interface");
    SyntaxNode n = make("InterfaceDeclaration", start, expect_ident());
    std::vector<SyntaxNode> type_params;
    std::vector<SyntaxNode> extends;
    if (at("<")) type_params = parse_type_parameters();
    if (accept("extends")) {
      do {
        extends.push_back(parse_type());
      } while (accept(","));
    }
    append(n.children, std::move(mods.annotations));
    append(n.children, parse_class_body());
    append(n.children, std::move(type_params));
    append(n.children, std::move(extends));
    finish(n);
    return n;
  }

  SyntaxNode parse_annotation_decl(std::size_t start, Modifiers mods) {
    expect("@");
    expect("interface");
    SyntaxNode n = make("AnnotationDeclaration", start, expect_ident());
    append(n.children, std::move(mods.annotations));
    append(n.children, parse_class_body());
    finish(n);
    return n;
  }

  SyntaxNode parse_enum_decl(std::size_t start, Modifiers mods) {
    expect("enum");
    SyntaxNode n = make("EnumDeclaration", start, expect_ident());
    std::vector<SyntaxNode> implements;
    if (accept("implements")) {
      do {
        implements.push_back(parse_type());
      } while (accept(","));
    }
    const std::size_t body_start = pos_;
    expect("{");
    SyntaxNode body = make("EnumBody", body_start);
    while (!at(";") && !at("}")) {
      const std::size_t c_start = pos_;
      Modifiers cmods = parse_modifiers();
      SyntaxNode constant = make("EnumConstantDeclaration", c_start, expect_ident());
      append(constant.children, std::move(cmods.annotations));
      if (at("(")) append(constant.children, parse_arguments());
      if (at("{")) append(constant.children, parse_class_body());
      finish(constant);
      body.children.push_back(std::move(constant));
      if (!accept(",")) break;
    }
    if (accept(";")) {
      while (!at("}")) {
        if (at_eof()) fail("unterminated enum body");
        if (accept(";")) continue;
        body.children.push_back(parse_member());
      }
    }
    expect("}");
    finish(body);
    append(n.children, std::move(mods.annotations));
    n.children.push_back(std::move(body));
    append(n.children, std::move(implements));
    finish(n);
    return n;
  }

  std::vector<SyntaxNode> parse_formal_parameters() {
    expect("(");
    std::vector<SyntaxNode> params;
    if (!at(")")) {
      do {
        params.push_back(parse_formal_parameter());
      } while (accept(","));
    }
    expect(")");
    return params;
  }

  SyntaxNode parse_formal_parameter() {
    const std::size_t start = pos_;
    Modifiers mods = parse_modifiers();
    SyntaxNode type = parse_type();
    accept("...");
    std::string name;
    if (at("this")) {
      ++pos_;
      name = "this";
    } else if (at_ident() && at(".", 1) && at("this", 2)) {
      name = expect_ident();
      pos_ += 2;
    } else {
      name = expect_ident();
    }
    while (at("[") && at("]", 1)) pos_ += 2;
    SyntaxNode p = make("FormalParameter", start, std::move(name));
    append(p.children, std::move(mods.annotations));
    p.children.push_back(std::move(type));
    finish(p);
    return p;
  }

  // ---- types ---------------------------------------------------------------

  SyntaxNode parse_type() {
    while (at("@")) parse_annotation();
    const std::size_t start = pos_;
    if (is_basic_type(peek().text)) {
      SyntaxNode t = make("BasicType", start, toks_[pos_++].text);
      parse_dims();
      finish(t);
      return t;
    }
    SyntaxNode t = parse_reference_type();
    parse_dims();
    return t;
  }

  void parse_dims() {
    while (at("[") && at("]", 1)) pos_ += 2;
  }

  SyntaxNode parse_reference_type() {
    const std::size_t start = pos_;
    SyntaxNode t = make("ReferenceType", start, expect_ident());
    if (at("<")) append(t.children, parse_type_arguments());
    if (at(".") && (at_ident(1) || at("@", 1))) {
      ++pos_;
      while (at("@")) parse_annotation();
      t.children.push_back(parse_reference_type());
    }
    finish(t);
    return t;
  }

  std::vector<SyntaxNode> parse_type_arguments() {
    std::vector<SyntaxNode> args;
    expect("<");
    if (at(">")) {
      ++pos_;
      return args;
    }
    do {
      const std::size_t start = pos_;
      SyntaxNode arg = make("TypeArgument", start);
      while (at("@")) parse_annotation();
      if (accept("?")) {
        if (accept("extends") || accept("super")) arg.children.push_back(parse_type());
      } else {
        arg.children.push_back(parse_type());
      }
      finish(arg);
      args.push_back(std::move(arg));
    } while (accept(","));
    expect_close_angle();
    return args;
  }

  // ---- statements ----------------------------------------------------------

  std::vector<SyntaxNode> parse_block() {
    expect("{");
    std::vector<SyntaxNode> stmts;
    while (!at("}")) {
      if (at_eof()) fail("unterminated block");
      stmts.push_back(parse_block_statement());
    }
    expect("}");
    return stmts;
  }

  bool at_local_var_decl() {
    if (is_basic_type(peek().text)) return !(at(".", 1) || (at("[", 1) && !at("]", 2)));
    if (!at_ident()) return false;
    return lookahead([&] {
      parse_type();
      expect_ident();
      const std::string& next = peek().text;
      if (next != "=" && next != ";" && next != "," && next != "[" && next != ":") {
        fail("not a declaration");
      }
    });
  }

  SyntaxNode parse_local_var_decl(std::string type_name, bool expect_semicolon = true) {
    const std::size_t start = pos_;
    Modifiers mods = parse_modifiers();
    SyntaxNode decl = make(std::move(type_name), start);
    append(decl.children, std::move(mods.annotations));
    decl.children.push_back(parse_type());
    append(decl.children, parse_variable_declarators());
    if (expect_semicolon) expect(";");
    finish(decl);
    return decl;
  }

  std::vector<SyntaxNode> parse_variable_declarators() {
    std::vector<SyntaxNode> decls;
    do {
      const std::size_t start = pos_;
      SyntaxNode d = make("VariableDeclarator", start, expect_ident());
      parse_dims();
      if (accept("=")) d.children.push_back(parse_variable_initializer());
      finish(d);
      decls.push_back(std::move(d));
    } while (accept(","));
    return decls;
  }

  SyntaxNode parse_variable_initializer() {
    if (at("{")) return parse_array_initializer();
    return parse_expression();
  }

  SyntaxNode parse_array_initializer() {
    const std::size_t start = pos_;
    expect("{");
    SyntaxNode init = make("ArrayInitializer", start);
    while (!at("}")) {
      init.children.push_back(parse_variable_initializer());
      if (!accept(",")) break;
    }
    expect("}");
    finish(init);
    return init;
  }

  SyntaxNode parse_block_statement() {
    const std::size_t start = pos_;
    if (at("{")) {
      SyntaxNode block = make("BlockStatement", start);
      block.children = parse_block();
      finish(block);
      return block;
    }
    if (at_ident() && at(":", 1)) {
      pos_ += 2;
      return parse_block_statement();
    }
    const std::string& t = peek().text;
    if (t == "class" || t == "interface" || t == "enum" ||
        ((t == "abstract" || t == "static" || t == "strictfp") && !at("{", 1))) {
      return parse_member();
    }
    if (t == "final" || (t == "@" && !at("interface", 1))) {
      const std::size_t save = pos_;
      parse_modifiers();
      const bool type_decl = at("class") || at("interface") || at("enum") || at("record");
      pos_ = save;
      if (type_decl) return parse_member();
      return parse_local_var_decl("LocalVariableDeclaration");
    }
    if (peek().kind == TokenKind::Identifier) {
      if (t == "if") return parse_if();
      if (t == "while") {
        ++pos_;
        SyntaxNode n = make("WhileStatement", start);
        n.children.push_back(parse_par_expression());
        n.children.push_back(parse_block_statement());
        finish(n);
        return n;
      }
      if (t == "do") {
        ++pos_;
        SyntaxNode body = parse_block_statement();
        expect("while");
        SyntaxNode n = make("DoStatement", start);
        n.children.push_back(parse_par_expression());
        n.children.push_back(std::move(body));
        expect(";");
        finish(n);
        return n;
      }
      if (t == "for") return parse_for();
      if (t == "try") return parse_try();
      if (t == "switch") return parse_switch();
      if (t == "synchronized" && at("(", 1)) {
        ++pos_;
        SyntaxNode n = make("SynchronizedStatement", start);
        n.children.push_back(parse_par_expression());
        append(n.children, parse_block());
        finish(n);
        return n;
      }
      if (t == "return" || t == "throw") {
        const bool is_return = t == "return";
        ++pos_;
        SyntaxNode n = make(is_return ? "ReturnStatement" : "ThrowStatement", start);
        if (!at(";")) n.children.push_back(parse_expression());
        expect(";");
        finish(n);
        return n;
      }
      if (t == "break" || t == "continue") {
        const bool is_break = t == "break";
        ++pos_;
        if (at_ident()) ++pos_;
        expect(";");
        SyntaxNode n = make(is_break ? "BreakStatement" : "ContinueStatement", start);
        finish(n);
        return n;
      }
      if (t == "assert") {
        ++pos_;
        SyntaxNode n = make("AssertStatement", start);
        n.children.push_back(parse_expression());
        if (accept(":")) n.children.push_back(parse_expression());
        expect(";");
        finish(n);
        return n;
      }
      if (t == "yield" && !at("=", 1) && !at("(", 1) && !at(".", 1)) {
        ++pos_;
        SyntaxNode n = make("YieldStatement", start);
        n.children.push_back(parse_expression());
        expect(";");
        finish(n);
        return n;
      }
    }
    if (accept(";")) {
      SyntaxNode n = make("Statement", start);
      finish(n);
      return n;
    }
    if (at_local_var_decl()) return parse_local_var_decl("LocalVariableDeclaration");
    SyntaxNode n = make("StatementExpression", start);
    n.children.push_back(parse_expression());
    expect(";");
    finish(n);
    return n;
  }

  SyntaxNode parse_par_expression() {
    expect("(");
    SyntaxNode e = parse_expression();
    expect(")");
    return e;
  }

  SyntaxNode parse_if() {
    const std::size_t start = pos_;
    expect("if");
    SyntaxNode n = make("IfStatement", start);
    n.children.push_back(parse_par_expression());
    n.children.push_back(parse_block_statement());
    if (accept("else")) n.children.push_back(parse_block_statement());
    finish(n);
    return n;
  }

  SyntaxNode parse_for() {
    const std::size_t start = pos_;
    expect("for");
    expect("(");
    SyntaxNode n = make("ForStatement", start);
    const std::size_t control_start = pos_;
    std::optional<SyntaxNode> enhanced;
    speculate([&] {
      SyntaxNode var = make("VariableDeclaration", pos_);
      Modifiers mods = parse_modifiers();
      append(var.children, std::move(mods.annotations));
      var.children.push_back(parse_type());
      const std::size_t d_start = pos_;
      SyntaxNode d = make("VariableDeclarator", d_start, expect_ident());
      finish(d);
      var.children.push_back(std::move(d));
      finish(var);
      expect(":");
      SyntaxNode control = make("EnhancedForControl", control_start);
      control.children.push_back(std::move(var));
      control.children.push_back(parse_expression());
      finish(control);
      enhanced = std::move(control);
    });
    if (enhanced) {
      n.children.push_back(std::move(*enhanced));
    } else {
      SyntaxNode control = make("ForControl", control_start);
      if (!at(";")) {
        if (at("final") || at("@") || at_local_var_decl()) {
          control.children.push_back(parse_local_var_decl("VariableDeclaration", false));
        } else {
          do {
            control.children.push_back(parse_expression());
          } while (accept(","));
        }
      }
      expect(";");
      if (!at(";")) control.children.push_back(parse_expression());
      expect(";");
      if (!at(")")) {
        do {
          control.children.push_back(parse_expression());
        } while (accept(","));
      }
      finish(control);
      n.children.push_back(std::move(control));
    }
    expect(")");
    n.children.push_back(parse_block_statement());
    finish(n);
    return n;
  }

  SyntaxNode parse_try() {
    const std::size_t start = pos_;
    expect("try");
    SyntaxNode n = make("TryStatement", start);
    if (accept("(")) {
      while (!at(")")) {
        const std::size_t r_start = pos_;
        std::optional<SyntaxNode> resource;
        speculate([&] {
          Modifiers mods = parse_modifiers();
          SyntaxNode type = parse_type();
          SyntaxNode r = make("TryResource", r_start, expect_ident());
          expect("=");
          append(r.children, std::move(mods.annotations));
          r.children.push_back(std::move(type));
          r.children.push_back(parse_expression());
          finish(r);
          resource = std::move(r);
        });
        if (!resource) {
          SyntaxNode r = make("TryResource", r_start);
          r.children.push_back(parse_expression());
          finish(r);
          resource = std::move(r);
        }
        n.children.push_back(std::move(*resource));
        if (!accept(";")) break;
      }
      expect(")");
    }
    append(n.children, parse_block());
    while (at("catch")) {
      const std::size_t c_start = pos_;
      ++pos_;
      expect("(");
      SyntaxNode clause = make("CatchClause", c_start);
      const std::size_t p_start = pos_;
      Modifiers mods = parse_modifiers();
      parse_qualified_name();
      while (accept("|")) parse_qualified_name();
      SyntaxNode param = make("CatchClauseParameter", p_start, expect_ident());
      append(param.children, std::move(mods.annotations));
      finish(param);
      expect(")");
      clause.children.push_back(std::move(param));
      append(clause.children, parse_block());
      finish(clause);
      n.children.push_back(std::move(clause));
    }
    if (accept("finally")) append(n.children, parse_block());
    finish(n);
    return n;
  }

  SyntaxNode parse_switch() {
    const std::size_t start = pos_;
    expect("switch");
    SyntaxNode n = make("SwitchStatement", start);
    n.children.push_back(parse_par_expression());
    append(n.children, parse_switch_body());
    finish(n);
    return n;
  }

  std::vector<SyntaxNode> parse_switch_body() {
    expect("{");
    std::vector<SyntaxNode> cases;
    while (!at("}")) {
      if (at_eof()) fail("unterminated switch");
      const std::size_t c_start = pos_;
      SyntaxNode c = make("SwitchStatementCase", c_start);
      bool arrow = false;
      if (accept("default")) {
        if (accept("->")) {
          arrow = true;
        } else {
          expect(":");
        }
      } else {
        expect("case");
        const bool saved = no_lambda_;
        no_lambda_ = true;
        do {
          c.children.push_back(parse_ternary());
        } while (accept(","));
        no_lambda_ = saved;
        if (accept("->")) {
          arrow = true;
        } else {
          expect(":");
        }
      }
      if (arrow) {
        if (at("{")) {
          append(c.children, parse_block());
        } else if (at("throw")) {
          c.children.push_back(parse_block_statement());
        } else {
          const std::size_t e_start = pos_;
          SyntaxNode s = make("StatementExpression", e_start);
          s.children.push_back(parse_expression());
          expect(";");
          finish(s);
          c.children.push_back(std::move(s));
        }
      } else {
        while (!at("case") && !at("default") && !at("}")) {
          if (at_eof()) fail("unterminated switch case");
          c.children.push_back(parse_block_statement());
        }
        // `default` used as a statement label never occurs; a bare `default`
        // followed by ':' or '->' always opens a case.
      }
      finish(c);
      cases.push_back(std::move(c));
    }
    expect("}");
    return cases;
  }

  // ---- expressions ---------------------------------------------------------

  // Index just past the ')' matching the '(' at `pos_`, or npos.
  std::size_t matching_paren_end() const {
    int depth = 0;
    for (std::size_t i = pos_; i < toks_.size(); ++i) {
      const std::string& t = toks_[i].text;
      if (toks_[i].kind == TokenKind::String) continue;
      if (t == "(") ++depth;
      if (t == ")" && --depth == 0) return i + 1;
    }
    return std::string::npos;
  }

  bool at_lambda() const {
    if (no_lambda_) return false;
    if (at_ident() && at("->", 1)) return true;
    if (!at("(")) return false;
    const std::size_t end = matching_paren_end();
    return end != std::string::npos && end < toks_.size() && toks_[end].text == "->";
  }

  SyntaxNode parse_lambda() {
    const std::size_t start = pos_;
    SyntaxNode n = make("LambdaExpression", start);
    if (at_ident()) {
      const std::size_t p = pos_;
      SyntaxNode param = make("InferredFormalParameter", p, expect_ident());
      finish(param);
      n.children.push_back(std::move(param));
    } else {
      const std::size_t end = matching_paren_end();
      bool inferred = true;
      for (std::size_t i = pos_ + 1; i + 1 < end; ++i) {
        const bool ident_slot = (i - pos_) % 2 == 1;
        if (ident_slot ? !(toks_[i].kind == TokenKind::Identifier && !is_keyword(toks_[i].text))
                       : toks_[i].text != ",") {
          inferred = false;
          break;
        }
      }
      if (inferred) {
        expect("(");
        while (!at(")")) {
          const std::size_t p = pos_;
          SyntaxNode param = make("InferredFormalParameter", p, expect_ident());
          finish(param);
          n.children.push_back(std::move(param));
          if (!accept(",")) break;
        }
        expect(")");
      } else {
        append(n.children, parse_formal_parameters());
      }
    }
    expect("->");
    if (at("{")) {
      append(n.children, parse_block());
    } else {
      n.children.push_back(parse_expression());
    }
    finish(n);
    return n;
  }

  SyntaxNode parse_expression() {
    if (at_lambda()) return parse_lambda();
    const std::size_t start = pos_;
    SyntaxNode lhs = parse_ternary();
    if (is_assignment_op(peek().text) && peek().kind == TokenKind::Operator) {
      ++pos_;
      SyntaxNode n = make("Assignment", start);
      n.children.push_back(std::move(lhs));
      n.children.push_back(at("{") ? parse_array_initializer() : parse_expression());
      finish(n);
      return n;
    }
    return lhs;
  }

  SyntaxNode parse_ternary() {
    const std::size_t start = pos_;
    SyntaxNode cond = parse_binary(0);
    if (!accept("?")) return cond;
    SyntaxNode n = make("TernaryExpression", start);
    n.children.push_back(std::move(cond));
    n.children.push_back(at_lambda() ? parse_lambda() : parse_ternary());
    expect(":");
    n.children.push_back(at_lambda() ? parse_lambda() : parse_ternary());
    finish(n);
    return n;
  }

  static int binary_precedence(std::string_view op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "|") return 3;
    if (op == "^") return 4;
    if (op == "&") return 5;
    if (op == "==" || op == "!=") return 6;
    if (op == "<" || op == ">" || op == "<=" || op == ">=" || op == "instanceof") return 7;
    if (op == "<<" || op == ">>" || op == ">>>") return 8;
    if (op == "+" || op == "-") return 9;
    if (op == "*" || op == "/" || op == "%") return 10;
    return 0;
  }

  SyntaxNode parse_binary(int min_prec) {
    const std::size_t start = pos_;
    SyntaxNode lhs = parse_unary();
    while (true) {
      const Tok& op = peek();
      if (op.kind != TokenKind::Operator && op.text != "instanceof") break;
      const int prec = binary_precedence(op.text);
      if (prec == 0 || prec <= min_prec) break;
      const bool is_instanceof = op.text == "instanceof";
      ++pos_;
      SyntaxNode n = make("BinaryOperation", start);
      n.children.push_back(std::move(lhs));
      if (is_instanceof) {
        accept("final");
        n.children.push_back(parse_type());
        if (at_ident() && !at("(", 1)) ++pos_;  // pattern binding
      } else {
        n.children.push_back(parse_binary(prec));
      }
      finish(n);
      lhs = std::move(n);
    }
    return lhs;
  }

  bool can_start_cast_operand() const {
    const Tok& t = peek();
    if (t.kind == TokenKind::Number || t.kind == TokenKind::String) return true;
    if (t.kind == TokenKind::Identifier) {
      return !is_keyword(t.text) || t.text == "this" || t.text == "super" || t.text == "new" ||
             t.text == "true" || t.text == "false" || t.text == "null" ||
             is_basic_type(t.text) || t.text == "void" || t.text == "switch";
    }
    return t.text == "(" || t.text == "!" || t.text == "~";
  }

  SyntaxNode parse_unary() {
    const Tok& t = peek();
    if (t.kind == TokenKind::Operator &&
        (t.text == "++" || t.text == "--" || t.text == "+" || t.text == "-" || t.text == "!" ||
         t.text == "~")) {
      ++pos_;
      return parse_unary();
    }
    if (at("(")) {
      const std::size_t start = pos_;
      std::optional<SyntaxNode> cast_type;
      const bool primitive = is_basic_type(peek(1).text);
      speculate([&] {
        expect("(");
        SyntaxNode type = parse_type();
        while (accept("&")) parse_type();
        expect(")");
        if (!primitive && !can_start_cast_operand()) fail("not a cast");
        if (!primitive && at_lambda()) {
          cast_type = std::move(type);
          return;
        }
        cast_type = std::move(type);
      });
      if (cast_type) {
        SyntaxNode n = make("Cast", start);
        n.children.push_back(std::move(*cast_type));
        n.children.push_back(at_lambda() ? parse_lambda() : parse_unary());
        finish(n);
        return n;
      }
    }
    SyntaxNode e = parse_primary();
    while (at("++") || at("--")) ++pos_;
    return e;
  }

  std::vector<SyntaxNode> parse_arguments() {
    expect("(");
    std::vector<SyntaxNode> args;
    if (!at(")")) {
      do {
        args.push_back(parse_expression());
      } while (accept(","));
    }
    expect(")");
    return args;
  }

  static void prepend(SyntaxNode& node, std::vector<SyntaxNode>&& selectors) {
    node.children.insert(node.children.begin(), std::make_move_iterator(selectors.begin()),
                         std::make_move_iterator(selectors.end()));
  }

  // Wraps `node` in method references while '::' follows.
  SyntaxNode parse_method_reference_tail(SyntaxNode node, std::size_t start) {
    while (at("::")) {
      ++pos_;
      SyntaxNode ref = make("MethodReference", start);
      ref.children.push_back(std::move(node));
      std::vector<SyntaxNode> type_args;
      if (at("<")) type_args = parse_type_arguments();
      const std::size_t m = pos_;
      SyntaxNode method = make("MemberReference", m);
      if (!accept("new")) expect_ident();
      finish(method);
      ref.children.push_back(std::move(method));
      append(ref.children, std::move(type_args));
      finish(ref);
      node = std::move(ref);
    }
    return node;
  }

  SyntaxNode with_selectors(SyntaxNode node, std::size_t start) {
    prepend(node, parse_selectors());
    finish(node);
    return parse_method_reference_tail(std::move(node), start);
  }

  std::vector<SyntaxNode> parse_selectors() {
    std::vector<SyntaxNode> sel;
    while (true) {
      const std::size_t start = pos_;
      if (at("[")) {
        ++pos_;
        SyntaxNode s = make("ArraySelector", start);
        s.children.push_back(parse_expression());
        expect("]");
        finish(s);
        sel.push_back(std::move(s));
        continue;
      }
      if (!at(".")) break;
      if (at("new", 1)) {
        pos_ += 2;
        SyntaxNode s = make("InnerClassCreator", start);
        if (at("<")) parse_type_arguments();
        s.children.push_back(parse_reference_type());
        append(s.children, parse_arguments());
        if (at("{")) append(s.children, parse_class_body());
        finish(s);
        sel.push_back(std::move(s));
        continue;
      }
      if (at("this", 1)) {
        pos_ += 2;
        SyntaxNode s = make("This", start);
        finish(s);
        sel.push_back(std::move(s));
        continue;
      }
      if (at("super", 1) && at("::", 2)) break;
      if (at("super", 1)) {
        pos_ += 2;
        SyntaxNode s = make("SuperMethodInvocation", start);
        if (at("(")) {
          s.type = "SuperConstructorInvocation";
          append(s.children, parse_arguments());
        } else {
          expect(".");
          expect_ident();
          if (at("(")) {
            append(s.children, parse_arguments());
          } else {
            s.type = "SuperMemberReference";
          }
        }
        finish(s);
        sel.push_back(std::move(s));
        continue;
      }
      if (at("class", 1)) {
        pos_ += 2;
        SyntaxNode s = make("ClassReference", start);
        finish(s);
        sel.push_back(std::move(s));
        continue;
      }
      ++pos_;
      std::vector<SyntaxNode> type_args;
      if (at("<")) type_args = parse_type_arguments();
      expect_ident();
      if (at("(")) {
        SyntaxNode s = make("MethodInvocation", start);
        append(s.children, std::move(type_args));
        append(s.children, parse_arguments());
        finish(s);
        sel.push_back(std::move(s));
      } else {
        SyntaxNode s = make("MemberReference", start);
        finish(s);
        sel.push_back(std::move(s));
      }
    }
    return sel;
  }

  SyntaxNode parse_creator(std::size_t start) {
    expect("new");
    std::vector<SyntaxNode> ctor_type_args;
    if (at("<")) ctor_type_args = parse_type_arguments();
    while (at("@")) parse_annotation();
    SyntaxNode type = [&] {
      if (is_basic_type(peek().text)) {
        SyntaxNode t = make("BasicType", pos_, toks_[pos_].text);
        ++pos_;
        finish(t);
        return t;
      }
      return parse_reference_type();
    }();
    if (at("[")) {
      SyntaxNode n = make("ArrayCreator", start);
      n.children.push_back(std::move(type));
      while (at("[")) {
        ++pos_;
        if (!at("]")) n.children.push_back(parse_expression());
        expect("]");
      }
      if (at("{")) n.children.push_back(parse_array_initializer());
      finish(n);
      return n;
    }
    SyntaxNode n = make("ClassCreator", start);
    n.children.push_back(std::move(type));
    append(n.children, std::move(ctor_type_args));
    append(n.children, parse_arguments());
    if (at("{")) append(n.children, parse_class_body());
    finish(n);
    return n;
  }

  SyntaxNode parse_switch_expression(std::size_t start) {
    expect("switch");
    SyntaxNode n = make("SwitchExpression", start);
    n.children.push_back(parse_par_expression());
    append(n.children, parse_switch_body());
    finish(n);
    return n;
  }

  SyntaxNode parse_primary() {
    const std::size_t start = pos_;
    const Tok& t = peek();
    if (at_literal()) {
      ++pos_;
      return with_selectors(make("Literal", start), start);
    }
    if (at("(")) {
      ++pos_;
      SyntaxNode inner = parse_expression();
      expect(")");
      std::vector<SyntaxNode> sel = parse_selectors();
      append(inner.children, std::move(sel));
      return parse_method_reference_tail(std::move(inner), start);
    }
    if (t.kind == TokenKind::Identifier) {
      if (t.text == "this") {
        ++pos_;
        if (at("(")) {
          SyntaxNode n = make("ExplicitConstructorInvocation", start);
          append(n.children, parse_arguments());
          finish(n);
          return n;
        }
        return with_selectors(make("This", start), start);
      }
      if (t.text == "super") {
        ++pos_;
        if (at("(")) {
          SyntaxNode n = make("SuperConstructorInvocation", start);
          append(n.children, parse_arguments());
          finish(n);
          return n;
        }
        if (at("::")) return parse_method_reference_tail(make("SuperMemberReference", start), start);
        expect(".");
        std::vector<SyntaxNode> type_args;
        if (at("<")) type_args = parse_type_arguments();
        expect_ident();
        if (at("(")) {
          SyntaxNode n = make("SuperMethodInvocation", start);
          append(n.children, std::move(type_args));
          append(n.children, parse_arguments());
          return with_selectors(std::move(n), start);
        }
        return with_selectors(make("SuperMemberReference", start), start);
      }
      if (t.text == "new") return with_selectors(parse_creator(start), start);
      if (t.text == "switch") return parse_switch_expression(start);
      if (t.text == "void" && at(".", 1) && at("class", 2)) {
        pos_ += 3;
        SyntaxNode n = make("VoidClassReference", start);
        finish(n);
        return with_selectors(std::move(n), start);
      }
      if (is_basic_type(t.text)) {
        SyntaxNode type = parse_type();
        if (at("::")) return parse_method_reference_tail(std::move(type), start);
        expect(".");
        expect("class");
        SyntaxNode n = make("ClassReference", start);
        n.children.push_back(std::move(type));
        finish(n);
        return with_selectors(std::move(n), start);
      }
      if (!is_keyword(t.text)) return parse_identifier_primary(start);
    }
    if (at("<")) {
      std::vector<SyntaxNode> type_args = parse_type_arguments();
      expect_ident();
      SyntaxNode n = make("MethodInvocation", start);
      append(n.children, std::move(type_args));
      append(n.children, parse_arguments());
      return with_selectors(std::move(n), start);
    }
    fail("expected expression");
  }

  SyntaxNode parse_identifier_primary(std::size_t start) {
    // Generic type before '::' (e.g. `List<String>::size`).
    if (at("<", 1)) {
      std::optional<SyntaxNode> generic;
      speculate([&] {
        SyntaxNode type = parse_type();
        if (!at("::")) fail("not a method reference");
        generic = std::move(type);
      });
      if (generic) return parse_method_reference_tail(std::move(*generic), start);
    }
    std::vector<std::string> parts{expect_ident()};
    while (at(".") && at_ident(1)) {
      ++pos_;
      parts.push_back(expect_ident());
    }
    if (at("(")) {
      SyntaxNode n = make("MethodInvocation", start);
      append(n.children, parse_arguments());
      return with_selectors(std::move(n), start);
    }
    if ((at("[") && at("]", 1)) || (at(".") && at("class", 1))) {
      // Array/class literal: rebuild the qualified name as a type.
      pos_ = start;
      SyntaxNode type = parse_type();
      if (at("::")) return parse_method_reference_tail(std::move(type), start);
      expect(".");
      expect("class");
      SyntaxNode n = make("ClassReference", start);
      n.children.push_back(std::move(type));
      finish(n);
      return with_selectors(std::move(n), start);
    }
    if (at(".") && at("this", 1)) {
      pos_ += 2;
      return with_selectors(make("This", start), start);
    }
    return with_selectors(make("MemberReference", start), start);
  }
};

}  // namespace java

/// Parses Java source (a compilation unit or bare member declarations).
/// Throws ParseError on invalid input.
inline std::vector<SyntaxNode> parse_java(std::string_view code) {
  java::Parser parser(code);
  return parser.parse_unit();
}

/// Token range of the first method/constructor header: first modifier (or
/// type) token through the ')' closing the parameter list. Annotations are
/// not part of the range.
inline std::optional<TokenRange> find_java_signature(std::string_view code) {
  java::Parser parser(code);
  return parser.find_first_header();
}

}  // namespace codesum
