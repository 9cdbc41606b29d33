#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "codesum/corpus.hpp"

namespace codesum::testing {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

// camelCase names from a ~70k space so most identifiers are rare.
inline std::string identifier(Rng& rng, bool capital = false) {
  static const char* syl[] = {"al", "ba", "cor", "den", "ex", "fin", "gal", "hor", "in", "jet", "ka", "lum",
                              "mor", "nex", "ob", "pra", "qua", "ros", "sil", "tor", "ul", "ven", "wex", "yar",
                              "zo", "bri", "cla", "dro", "fle", "gru", "plo", "sna", "tri", "vo", "wra", "xen",
                              "mi", "ne", "ra", "to", "su"};
  constexpr std::size_t n = std::size(syl);
  std::string out;
  const std::size_t parts = 2 + pick(rng, 2);
  for (std::size_t i = 0; i < parts; ++i) {
    std::string s = syl[pick(rng, n)];
    if ((i > 0 || capital) && !s.empty()) s[0] = static_cast<char>(s[0] - 'a' + 'A');
    out += s;
  }
  return out;
}

inline std::string java_type(Rng& rng) {
  static const char* basic[] = {"int", "long", "String", "boolean", "double", "List<String>", "Map<String, Integer>"};
  if (coin(rng, 0.4)) return identifier(rng, true);
  return basic[pick(rng, std::size(basic))];
}

// A verbose Java method: typed locals, calls, loops, branches, try/catch.
inline std::string java_method(Rng& rng, std::string* name_out = nullptr) {
  std::ostringstream s;
  const std::string name = identifier(rng);
  if (name_out) *name_out = name;
  const std::string ret = java_type(rng);
  const std::size_t nparams = 1 + pick(rng, 3);
  std::vector<std::string> params;
  s << (coin(rng, 0.7) ? "public " : "private ") << (coin(rng, 0.3) ? "static " : "") << ret << " " << name << "(";
  for (std::size_t i = 0; i < nparams; ++i) {
    params.push_back(identifier(rng));
    s << (i ? ", " : "") << java_type(rng) << " " << params.back();
  }
  s << ") {\n";
  std::vector<std::string> locals = params;
  auto any = [&]() -> const std::string& { return locals[pick(rng, locals.size())]; };
  const std::size_t stmts = 4 + pick(rng, 6);
  for (std::size_t k = 0; k < stmts; ++k) {
    switch (pick(rng, 6)) {
      case 0: {
        const std::string v = identifier(rng);
        s << "    " << java_type(rng) << " " << v << " = " << any() << "." << identifier(rng) << "(" << any()
          << ", " << pick(rng, 100) << ");\n";
        locals.push_back(v);
        break;
      }
      case 1:
        s << "    if (" << any() << " != null && " << any() << ".size() > " << pick(rng, 50) << ") {\n"
          << "      " << identifier(rng) << "(" << any() << ");\n    }\n";
        break;
      case 2: {
        const std::string acc = any();
        s << "    for (int i = 0; i < " << any() << ".size(); i++) {\n"
          << "      " << acc << " += " << any() << ".get(i);\n    }\n";
        break;
      }
      case 3:
        s << "    while (" << any() << ".hasNext()) {\n"
          << "      " << identifier(rng, true) << " " << identifier(rng) << " = " << any() << ".next();\n    }\n";
        break;
      case 4:
        s << "    try {\n      " << any() << "." << identifier(rng) << "();\n"
          << "    } catch (IOException e) {\n      log.warn(\"" << identifier(rng) << " failed\", e);\n    }\n";
        break;
      default:
        s << "    this." << identifier(rng) << " = " << any() << ";\n";
        break;
    }
  }
  s << "    return " << any() << ";\n  }";
  return s.str();
}

inline std::string python_function(Rng& rng, std::string* name_out = nullptr) {
  std::ostringstream s;
  const std::string name = identifier(rng);
  if (name_out) *name_out = name;
  std::vector<std::string> locals{identifier(rng), identifier(rng)};
  s << "def " << name << "(self, " << locals[0] << ", " << locals[1] << "):\n";
  s << "    \"\"\"" << identifier(rng) << " helper.\"\"\"\n";
  auto any = [&]() -> const std::string& { return locals[pick(rng, locals.size())]; };
  const std::size_t stmts = 3 + pick(rng, 4);
  for (std::size_t k = 0; k < stmts; ++k) {
    switch (pick(rng, 4)) {
      case 0: {
        const std::string v = identifier(rng);
        s << "    " << v << " = self." << identifier(rng) << "(" << any() << ", " << pick(rng, 9) << ")\n";
        locals.push_back(v);
        break;
      }
      case 1:
        s << "    for i, item in enumerate(" << any() << "):\n        if item[1] == " << any()
          << ":\n            " << any() << ".append(i)\n";
        break;
      case 2:
        s << "    if " << any() << " is None:\n        return []\n";
        break;
      default:
        s << "    " << any() << " = " << any() << " + len(" << any() << ")\n";
        break;
    }
  }
  s << "    return " << any() << "\n";
  return s.str();
}

inline std::string summary_for(Rng& rng, const std::string& name) {
  static const char* verbs[] = {"Returns", "Computes", "Builds", "Updates", "Checks", "Loads", "Formats"};
  static const char* nouns[] = {"the value", "a list of entries", "the current state", "all pending items",
                                "the configured limit", "a formatted string"};
  return std::string(verbs[pick(rng, std::size(verbs))]) + " " + nouns[pick(rng, std::size(nouns))] + " for " +
         name + ". Extra detail follows here.";
}

/// Deterministic synthetic corpus; python_share of records are Python.
inline std::vector<CorpusRecord> synthetic_corpus(std::size_t n, std::uint64_t seed, double python_share = 0.0) {
  Rng rng(seed);
  std::vector<CorpusRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    CorpusRecord r;
    r.id = "rec-" + std::to_string(i);
    std::string name;
    if (coin(rng, python_share)) {
      r.language = Language::Python;
      r.code = python_function(rng, &name);
    } else {
      r.language = Language::Java;
      r.code = java_method(rng, &name);
    }
    r.summary = summary_for(rng, name);
    r.side_score = static_cast<double>(pick(rng, 1001)) / 1000.0;
    out.push_back(std::move(r));
  }
  return out;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("codesum-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace codesum::testing
