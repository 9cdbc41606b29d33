#include <gtest/gtest.h>

#include "codesum/java_parser.hpp"
#include "codesum/python_parser.hpp"
#include "codesum/reducers.hpp"
#include "support.hpp"

using namespace codesum;

namespace {

using Strings = std::vector<std::string>;

const char* kFormatMethod = R"(public String format(LoggingEvent event) {
    // Reset working stringbuffer
    if(sbuf.capacity() > MAX_CAPACITY) {
      sbuf = new StringBuffer(BUF_SIZE);
    } else {
      sbuf.setLength(0);
    }
    PatternConverter c = head;
    while(c != null) {
      c.format(sbuf, event);
      c = c.next;
    }
    return sbuf.toString();
  })";

const char* kErrIndices = R"(def _get_err_indices(self, coord_name):
    """Get the indices for all possible errors."""
    ind = []
    for i, err in enumerate(self._parsed_error_names):
        if err[1] == coord_name:
            ind.append(i)
    dim = len(self._parsed_error_names)
    err_indices = ind + dim
    return err_indices
)";

Strings java_ast(std::string_view code, bool fuse = true) { return render_preorder(parse_java(code), fuse).tokens; }

Strings python_ast(std::string_view code, bool fuse = false) {
  return render_preorder({parse_python(code)}, fuse).tokens;
}

Strings java_signature(std::string_view code) {
  const auto range = find_java_signature(code);
  if (!range) return {};
  const auto lexed = lex_code(code, Language::Java);
  return Strings(lexed.tokens.begin() + static_cast<std::ptrdiff_t>(range->first),
                 lexed.tokens.begin() + static_cast<std::ptrdiff_t>(range->last + 1));
}

Strings python_signature(std::string_view code) {
  const auto range = find_python_signature(code);
  if (!range) return {};
  const auto lexed = lex_code(code, Language::Python);
  return Strings(lexed.tokens.begin() + static_cast<std::ptrdiff_t>(range->first),
                 lexed.tokens.begin() + static_cast<std::ptrdiff_t>(range->last + 1));
}

}  // namespace

TEST(JavaAst, FormatMethodGolden) {
  const Strings expected = {
      "MethodDeclaration_format", "ReferenceType_String", "FormalParameter_event", "ReferenceType_LoggingEvent",
      "IfStatement", "BinaryOperation", "MethodInvocation", "MemberReference", "BlockStatement",
      "StatementExpression", "Assignment", "MemberReference", "ClassCreator", "ReferenceType_StringBuffer",
      "MemberReference", "BlockStatement", "StatementExpression", "MethodInvocation", "Literal",
      "LocalVariableDeclaration", "ReferenceType_PatternConverter", "VariableDeclarator_c", "MemberReference",
      "WhileStatement", "BinaryOperation", "MemberReference", "Literal", "BlockStatement", "StatementExpression",
      "MethodInvocation", "MemberReference", "MemberReference", "StatementExpression", "Assignment",
      "MemberReference", "MemberReference", "ReturnStatement", "MethodInvocation"};
  EXPECT_EQ(java_ast(kFormatMethod), expected);
}

TEST(JavaAst, FusionOffGivesBareTypes) {
  const Strings tokens = java_ast(kFormatMethod, false);
  EXPECT_EQ(tokens.front(), "MethodDeclaration");
  EXPECT_EQ(tokens[1], "ReferenceType");
}

TEST(JavaAst, CompilationUnitOnlyWithImports) {
  EXPECT_EQ(java_ast("class A {}"), (Strings{"ClassDeclaration_A"}));
  EXPECT_EQ(java_ast("package p; import java.util.List; class A {}"),
            (Strings{"CompilationUnit", "PackageDeclaration", "Import", "ClassDeclaration_A"}));
}

TEST(JavaAst, GenericsAndNestedTypes) {
  const Strings t = java_ast("Map<String, List<Integer>> m() { return null; }");
  const Strings head(t.begin(), t.begin() + 8);
  EXPECT_EQ(head, (Strings{"MethodDeclaration_m", "ReferenceType_Map", "TypeArgument", "ReferenceType_String",
                           "TypeArgument", "ReferenceType_List", "TypeArgument", "ReferenceType_Integer"}));
}

TEST(JavaAst, ParsesBroadGrammar) {
  const char* sources[] = {
      "void f() { for (int i = 0, j = 1; i < n; i++, j--) { a[i] = b[j] >> 2; } }",
      "void f() { for (var x : xs) { if (x instanceof String s) { use(s); } } }",
      "int f(int x) { return switch (x) { case 1, 2 -> 3; default -> { yield 4; } }; }",
      "void f() { switch (k) { case A: g(); break; default: h(); } }",
      "void f() throws IOException { try (var r = open(); Reader q = r) { r.read(); } catch (IOException | "
      "RuntimeException e) { throw e; } finally { close(); } }",
      "void f() { Runnable r = () -> {}; Function<Integer, Integer> g = x -> x + 1; BiFunction<A, B, C> h = (a, "
      "b) -> a; }",
      "void f() { list.stream().map(String::valueOf).forEach(System.out::println); }",
      "void f() { int[][] m = new int[3][]; int[] v = {1, 2}; Object o = (Object) new Foo<>(1) { void g() {} }; }",
      "@Override public <T extends Comparable<T>> T max(T a, T... rest) { return a.compareTo(rest[0]) > 0 ? a : "
      "rest[0]; }",
      "enum Color { RED(1), GREEN(2) { int v() { return 0; } }; Color(int x) {} }",
      "record Point(int x, int y) implements Shape { Point { assert x >= 0 : \"neg\"; } }",
      "@interface Tag { String value() default \"\"; }",
      "interface I { default void f() {} static int g() { return 1; } }",
      "void f() { label: while (true) { do { continue label; } while (x); synchronized (this) { break; } } }",
      "void f() { Class<?> c = int[].class; String s = Outer.this.name; x = (a < b) == (c > d); }",
      "void f() { final int x = 1; int y = x << 2 & 3 | 4 ^ ~5; boolean z = !y && (y >>> 1) != 0; }",
      "public Foo(int a) { super(a); this.a = a; }",
      "class A<T> extends B<T> implements C, D { static { init(); } { inst(); } private final T t; }",
  };
  for (const char* src : sources) {
    EXPECT_NO_THROW(parse_java(src)) << src;
  }
}

TEST(JavaAst, ParseFailure) {
  EXPECT_THROW(parse_java("void f( {"), ParseError);
  EXPECT_THROW(parse_java("int x = ;"), ParseError);
  try {
    parse_java("class A { void f() { return 1 } }");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseFailure);
  }
}

TEST(PythonAst, ErrIndicesGolden) {
  const Strings expected = {
      "Module", "FunctionDef", "arguments", "arg", "arg", "Expr", "Constant", "Assign", "Name", "List", "For",
      "Tuple", "Name", "Name", "Call", "Name", "Attribute", "Name", "If", "Compare", "Subscript", "Name",
      "Constant", "Name", "Expr", "Call", "Attribute", "Name", "Name", "Assign", "Name", "Call", "Name",
      "Attribute", "Name", "Assign", "Name", "BinOp", "Name", "Name", "Return", "Name"};
  EXPECT_EQ(python_ast(kErrIndices), expected);
}

TEST(PythonAst, EmptyModule) { EXPECT_EQ(python_ast(""), (Strings{"Module"})); }

TEST(PythonAst, FusionOnNamesDeclarations) {
  const Strings t = python_ast("def f(a):\n    return a\n", true);
  EXPECT_EQ(t, (Strings{"Module", "FunctionDef_f", "arguments", "arg_a", "Return", "Name"}));
}

TEST(PythonAst, ParsesBroadGrammar) {
  const char* sources[] = {
      "@decorator(1)\nasync def f(a, /, b=2, *args, c, d=3, **kw) -> int:\n    async with x as y, z:\n        "
      "await y\n    async for i in g():\n        pass\n",
      "class A(B, metaclass=M):\n    x: int = 1\n    def f(self):\n        return [i for i in range(3) if i]\n",
      "try:\n    pass\nexcept (A, B) as e:\n    raise C from e\nelse:\n    x = 1\nfinally:\n    y = 2\n",
      "x = {k: v for k, v in d.items()}\ny = {1, 2}\nz = (a for a in b)\nw = lambda p, *q: p\n",
      "a, *b = c\nd[1:2, ::3] += 4\ne = f if g else h\nglobal q\ndel a, b[0]\nassert x, 'msg'\n",
      "match cmd:\n    case [x, y]:\n        pass\n    case {'k': v}:\n        pass\n    case _:\n        pass\n",
      "s = f\"{x!r:>{width}} and {y}\"\nt = 'a' 'b'\nu = not a and b or c is not d\n",
      "with open(p) as fh:\n    for line in fh:\n        if line:\n            continue\n        else:\n"
      "            break\nwhile x:\n    x -= 1\nelse:\n    pass\n",
      "def g():\n    yield from h()\n    x = yield\n    return (yield 1)\n",
      "import os.path as osp, sys\nfrom . import a\nfrom ..b import (c, d as e)\n",
      "x = [\n    1,\n    2,\n]\ny = 1 + \\\n    2\n",
      "    def indented(self):\n        return self\n",
  };
  for (const char* src : sources) {
    EXPECT_NO_THROW(parse_python(src)) << src;
  }
}

TEST(PythonAst, ParseFailure) {
  EXPECT_THROW(parse_python("def f(:\n    pass\n"), ParseError);
  EXPECT_THROW(parse_python("x = (1,\n"), ParseError);
  EXPECT_THROW(parse_python("if x:\npass\n"), ParseError);
  EXPECT_THROW(parse_python("s = 'open\n"), ParseError);
}

TEST(Signature, PaperExamples) {
  EXPECT_EQ(java_signature(kFormatMethod), (Strings{"public", "String", "format", "(", "LoggingEvent", "event", ")"}));
  EXPECT_EQ(python_signature(kErrIndices), (Strings{"def", "_get_err_indices", "(", "self", ",", "coord_name", ")", ":"}));
}

TEST(Signature, JavaRules) {
  EXPECT_EQ(java_signature("@Override\npublic void run() throws Exception { go(); }"),
            (Strings{"public", "void", "run", "(", ")"}));
  EXPECT_EQ(java_signature("static <T> List<T> of(T... xs) { return null; }"),
            (Strings{"static", "<", "T", ">", "List", "<", "T", ">", "of", "(", "T", "...", "xs", ")"}));
  EXPECT_EQ(java_signature("int a() { return 1; }\nint b() { return 2; }"), (Strings{"int", "a", "(", ")"}));
  EXPECT_EQ(java_signature("class A { A(int x) { } }"), (Strings{"A", "(", "int", "x", ")"}));
  EXPECT_EQ(java_signature("abstract int size();"), (Strings{"abstract", "int", "size", "(", ")"}));
  EXPECT_TRUE(java_signature("x = y + 1;").empty());
}

TEST(Signature, PythonRules) {
  EXPECT_EQ(python_signature("@cache\nasync def f(a: int) -> str:\n    return ''\n"),
            (Strings{"def", "f", "(", "a", ":", "int", ")", "->", "str", ":"}));
  EXPECT_EQ(python_signature("def f(x={'a': 1}):\n    pass\ndef g():\n    pass\n"),
            (Strings{"def", "f", "(", "x", "=", "{", "'a'", ":", "1", "}", ")", ":"}));
  EXPECT_TRUE(python_signature("x = 1\nprint(x)\n").empty());
}

TEST(Signature, SubsequenceOfLexStream) {
  codesum::testing::Rng rng(21);
  for (int i = 0; i < 100; ++i) {
    const std::string code = codesum::testing::java_method(rng);
    const auto range = find_java_signature(code);
    ASSERT_TRUE(range.has_value()) << code;
    EXPECT_EQ(range->first, 0u);
    EXPECT_LT(range->last, lex_code(code, Language::Java).size());
  }
}

TEST(GeneratedFixtures, AllParse) {
  codesum::testing::Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    const std::string java = codesum::testing::java_method(rng);
    EXPECT_NO_THROW(parse_java(java)) << java;
    const std::string py = codesum::testing::python_function(rng);
    EXPECT_NO_THROW(parse_python(py)) << py;
  }
}

TEST(PythonAst, MatchStatementGolden) {
  const char* src =
      "match cmd:\n"
      "    case [x, *rest] if x > 0:\n        pass\n"
      "    case {\"k\": 1, **kw}:\n        pass\n"
      "    case Point(1, y=Color.RED) | None as p:\n        pass\n"
      "    case -1 + 2j:\n        pass\n";
  const Strings expected = {
      "Module", "Match", "Name", "match_case", "MatchSequence", "MatchAs", "MatchStar", "Compare", "Name",
      "Constant", "Pass", "match_case", "MatchMapping", "Constant", "MatchValue", "Constant", "Pass",
      "match_case", "MatchAs", "MatchOr", "MatchClass", "Name", "MatchValue", "Constant", "MatchValue",
      "Attribute", "Name", "MatchSingleton", "Pass", "match_case", "MatchValue", "BinOp", "UnaryOp", "Constant",
      "Constant", "Pass"};
  EXPECT_EQ(python_ast(src), expected);
}

TEST(PythonAst, MatchAsPlainName) {
  EXPECT_EQ(python_ast("match = 1\nmatch(x)\n"),
            (Strings{"Module", "Assign", "Name", "Constant", "Expr", "Call", "Name", "Name"}));
}
