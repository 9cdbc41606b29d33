#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "codesum/corpus.hpp"
#include "codesum/error.hpp"
#include "codesum/java_parser.hpp"
#include "codesum/lexer.hpp"
#include "codesum/python_parser.hpp"
#include "codesum/syntax_tree.hpp"

namespace codesum {

using Ngram = std::vector<std::string>;

inline constexpr int kMaxNgramOrder = 4;
inline constexpr std::size_t kDefaultBanBudget = 500;

/// Trivially shared n-grams mined from a training split: at most `k` of the
/// most frequent n-grams for every order 1..max_n.
struct NgramBanList {
  int max_n = kMaxNgramOrder;
  std::size_t k = kDefaultBanBudget;
  std::map<Ngram, std::uint64_t> entries;
  std::string source_fingerprint;

  bool contains(const Ngram& gram) const { return entries.count(gram) > 0; }
  bool operator==(const NgramBanList&) const = default;
};

struct ReductionOutcome {
  std::string record_id;
  Strategy strategy = Strategy::Original;
  TokenSequence reduced_tokens;
  double token_retention = 0.0;
  std::size_t input_token_count = 0;
  std::size_t output_token_count = 0;
  /// CrystalBLEU removed every token; callers decide whether to keep it.
  bool empty_after_reduction = false;
  /// AST output longer than the lexical baseline (legal, but worth a look).
  bool retention_above_one = false;
};

namespace detail {

// Tokens joined with the ASCII unit separator; used only as a hash key.
inline std::string ngram_key(const std::vector<std::string>& tokens, std::size_t begin, std::size_t n) {
  std::string key;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) key += '\x1f';
    key += tokens[begin + i];
  }
  return key;
}

inline Ngram split_key(std::string_view key) {
  Ngram out;
  std::size_t start = 0;
  while (true) {
    const std::size_t sep = key.find('\x1f', start);
    out.emplace_back(key.substr(start, sep == std::string_view::npos ? key.npos : sep - start));
    if (sep == std::string_view::npos) break;
    start = sep + 1;
  }
  return out;
}

inline void fnv1a(std::uint64_t& h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
}

}  // namespace detail

/// Mergeable n-gram frequency counts (a commutative monoid under merge), so
/// shards can be counted independently and combined in any order.
class NgramCounter {
 public:
  explicit NgramCounter(int max_n = kMaxNgramOrder) : counts_(static_cast<std::size_t>(max_n)) {
    if (max_n < 1 || max_n > kMaxNgramOrder) {
      throw Error(ErrorKind::InvalidArgument, "max_n must be in [1,4]");
    }
  }

  void add(const TokenSequence& seq) {
    const auto& t = seq.tokens;
    for (std::size_t n = 1; n <= counts_.size(); ++n) {
      if (t.size() < n) break;
      auto& table = counts_[n - 1];
      for (std::size_t i = 0; i + n <= t.size(); ++i) ++table[detail::ngram_key(t, i, n)];
    }
  }

  void merge(const NgramCounter& other) {
    if (other.counts_.size() != counts_.size()) {
      throw Error(ErrorKind::InvalidArgument, "cannot merge counters with different max_n");
    }
    for (std::size_t n = 0; n < counts_.size(); ++n) {
      for (const auto& [key, c] : other.counts_[n]) counts_[n][key] += c;
    }
  }

  int max_n() const noexcept { return static_cast<int>(counts_.size()); }

  std::uint64_t count(const Ngram& gram) const {
    if (gram.empty() || gram.size() > counts_.size()) return 0;
    auto it = counts_[gram.size() - 1].find(detail::ngram_key(gram, 0, gram.size()));
    return it == counts_[gram.size() - 1].end() ? 0 : it->second;
  }

  /// The k most frequent n-grams of order n; ties broken by lexicographic
  /// order of the token tuple.
  std::vector<std::pair<Ngram, std::uint64_t>> top_k(std::size_t n, std::size_t k) const {
    std::vector<std::pair<Ngram, std::uint64_t>> all;
    all.reserve(counts_[n - 1].size());
    for (const auto& [key, c] : counts_[n - 1]) all.emplace_back(detail::split_key(key), c);
    auto better = [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    };
    const std::size_t take = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(), better);
    all.resize(take);
    return all;
  }

 private:
  std::vector<std::unordered_map<std::string, std::uint64_t>> counts_;
};

/// Order-sensitive fingerprint of a training split.
class CorpusFingerprint {
 public:
  void add(const CorpusRecord& r) {
    detail::fnv1a(hash_, r.id);
    detail::fnv1a(hash_, std::string_view("\x1e", 1));
    detail::fnv1a(hash_, to_string(r.language));
    detail::fnv1a(hash_, std::string_view("\x1e", 1));
    detail::fnv1a(hash_, r.code);
    detail::fnv1a(hash_, std::string_view("\x1d", 1));
  }

  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
    return buf;
  }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

inline NgramBanList ban_list_from_counts(const NgramCounter& counter, std::size_t k, std::string fingerprint) {
  NgramBanList ban;
  ban.max_n = counter.max_n();
  ban.k = k;
  ban.source_fingerprint = std::move(fingerprint);
  for (int n = 1; n <= counter.max_n(); ++n) {
    for (auto& [gram, c] : counter.top_k(static_cast<std::size_t>(n), k)) ban.entries.emplace(std::move(gram), c);
  }
  return ban;
}

/// Mines the ban list from a training split (never validation/test).
inline NgramBanList build_ban_list(const std::vector<CorpusRecord>& training, std::size_t k = kDefaultBanBudget,
                                   int max_n = kMaxNgramOrder) {
  if (training.empty()) throw Error(ErrorKind::EmptyCorpus, "training corpus has no records");
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  NgramCounter counter(max_n);
  CorpusFingerprint fingerprint;
  for (const CorpusRecord& r : training) {
    counter.add(lex_code(r.code, r.language));
    fingerprint.add(r);
  }
  return ban_list_from_counts(counter, k, fingerprint.hex());
}

// ---- persistence ------------------------------------------------------------

namespace detail {

inline std::string escape_token(std::string_view t) {
  std::string out;
  for (char c : t) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\x1f': out += "\\u"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string unescape_token(std::string_view t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] != '\\' || i + 1 == t.size()) {
      out += t[i];
      continue;
    }
    switch (t[++i]) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case 'u': out += '\x1f'; break;
      default: throw Error(ErrorKind::MalformedRecord, "bad escape in ban-list token");
    }
  }
  return out;
}

}  // namespace detail

inline constexpr std::string_view kBanListMagic = "#codesum-banlist";

/// Header line, then one entry per line: tokens joined by U+001F, a tab, and
/// the frequency. Entries are written in (order, tuple) order.
inline void save_ban_list(const NgramBanList& ban, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  out << kBanListMagic << "\tmax_n=" << ban.max_n << "\tk=" << ban.k
      << "\tfingerprint=" << ban.source_fingerprint << '\n';
  for (int n = 1; n <= ban.max_n; ++n) {
    for (const auto& [gram, freq] : ban.entries) {
      if (static_cast<int>(gram.size()) != n) continue;
      for (std::size_t i = 0; i < gram.size(); ++i) {
        if (i) out << '\x1f';
        out << detail::escape_token(gram[i]);
      }
      out << '\t' << freq << '\n';
    }
  }
  if (!out) throw Error(ErrorKind::IoFailure, "write failed on " + path.string());
}

inline NgramBanList load_ban_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileNotFound, path.string());
  NgramBanList ban;
  std::string line;
  if (!std::getline(in, line) || !line.starts_with(kBanListMagic)) {
    throw Error(ErrorKind::MalformedRecord, path.string() + ": missing ban-list header");
  }
  std::size_t pos = kBanListMagic.size();
  while (pos < line.size()) {
    const std::size_t next = line.find('\t', pos + 1);
    const std::string field = line.substr(pos + 1, next == std::string::npos ? std::string::npos : next - pos - 1);
    const std::size_t eq = field.find('=');
    if (eq != std::string::npos) {
      const std::string key = field.substr(0, eq);
      const std::string value = field.substr(eq + 1);
      try {
        if (key == "max_n") ban.max_n = std::stoi(value);
        if (key == "k") ban.k = std::stoull(value);
      } catch (const std::exception&) {
        throw Error(ErrorKind::MalformedRecord, path.string() + ": bad header value for " + key);
      }
      if (key == "fingerprint") ban.source_fingerprint = value;
    }
    if (next == std::string::npos) break;
    pos = next;
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorKind::MalformedRecord, path.string() + ":" + std::to_string(line_no) + ": missing frequency");
    }
    Ngram gram;
    for (const std::string& part : detail::split_key(std::string_view(line).substr(0, tab))) {
      gram.push_back(detail::unescape_token(part));
    }
    std::uint64_t freq = 0;
    try {
      freq = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw Error(ErrorKind::MalformedRecord, path.string() + ":" + std::to_string(line_no) + ": bad frequency");
    }
    if (gram.size() > static_cast<std::size_t>(ban.max_n) || freq < 1) {
      throw Error(ErrorKind::MalformedRecord, path.string() + ":" + std::to_string(line_no) + ": entry violates header");
    }
    ban.entries.emplace(std::move(gram), freq);
  }
  return ban;
}

// ---- reducers ---------------------------------------------------------------

namespace detail {

inline ReductionOutcome make_outcome(const CorpusRecord& record, Strategy strategy, TokenSequence reduced,
                                     std::size_t input_count) {
  ReductionOutcome o;
  o.record_id = record.id;
  o.strategy = strategy;
  o.input_token_count = input_count;
  o.output_token_count = reduced.size();
  o.token_retention = input_count > 0 ? static_cast<double>(reduced.size()) / static_cast<double>(input_count) : 0.0;
  o.reduced_tokens = std::move(reduced);
  return o;
}

}  // namespace detail

/// Deletes every token occurrence covered by an occurrence of a banned
/// n-gram (any order) in the input stream; survivors keep their order.
inline ReductionOutcome reduce_crystalbleu(const CorpusRecord& record, const NgramBanList& ban) {
  const TokenSequence input = lex_code(record.code, record.language);
  if (input.empty()) throw Error(ErrorKind::ZeroInputTokens, "record '" + record.id + "' has no code tokens");
  std::vector<std::unordered_set<std::string>> banned(static_cast<std::size_t>(std::max(ban.max_n, 1)));
  for (const auto& [gram, freq] : ban.entries) {
    if (gram.empty() || gram.size() > banned.size()) continue;
    banned[gram.size() - 1].insert(detail::ngram_key(gram, 0, gram.size()));
  }
  std::vector<bool> covered(input.size(), false);
  for (std::size_t n = 1; n <= banned.size(); ++n) {
    if (banned[n - 1].empty() || input.size() < n) continue;
    for (std::size_t i = 0; i + n <= input.size(); ++i) {
      if (banned[n - 1].count(detail::ngram_key(input.tokens, i, n))) {
        std::fill(covered.begin() + static_cast<std::ptrdiff_t>(i),
                  covered.begin() + static_cast<std::ptrdiff_t>(i + n), true);
      }
    }
  }
  TokenSequence out;
  out.origin = TokenOrigin::Code;
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (!covered[i]) out.push(input.tokens[i], input.spans[i]);
  }
  ReductionOutcome o = detail::make_outcome(record, Strategy::CrystalBleu, std::move(out), input.size());
  o.empty_after_reduction = o.output_token_count == 0;
  return o;
}

/// Contiguous header of the first declaration: Java from the first
/// modifier/return-type token through the parameter list's ')'; Python from
/// `def` through the header ':'.
inline ReductionOutcome reduce_signature(const CorpusRecord& record) {
  const TokenSequence input = lex_code(record.code, record.language);
  const std::optional<TokenRange> range = record.language == Language::Java ? find_java_signature(record.code)
                                                                            : find_python_signature(record.code);
  if (!range) throw Error(ErrorKind::NoDeclarationFound, "record '" + record.id + "'");
  TokenSequence out;
  out.origin = TokenOrigin::Code;
  for (std::size_t i = range->first; i <= range->last; ++i) out.push(input.tokens[i], input.spans[i]);
  return detail::make_outcome(record, Strategy::Signature, std::move(out), input.size());
}

struct AstOptions {
  /// Render declarations and type references as `NodeType_identifier`.
  /// Unset means the per-language default: on for Java, off for Python.
  std::optional<bool> fuse_identifiers;
};

inline TokenSequence serialize_ast(std::string_view code, Language language, AstOptions options = {}) {
  const bool fuse = options.fuse_identifiers.value_or(language == Language::Java);
  if (language == Language::Java) return render_preorder(parse_java(code), fuse);
  std::vector<SyntaxNode> roots;
  roots.push_back(parse_python(code));
  return render_preorder(roots, fuse);
}

/// Pre-order node types of the parse tree. Retention is measured against the
/// lexical token count, so values above 1.0 are possible and flagged.
inline ReductionOutcome reduce_ast(const CorpusRecord& record, AstOptions options = {}) {
  const std::size_t input_count = lex_code(record.code, record.language).size();
  TokenSequence out = serialize_ast(record.code, record.language, options);
  ReductionOutcome o = detail::make_outcome(record, Strategy::Ast, std::move(out), input_count);
  o.retention_above_one = o.token_retention > 1.0;
  return o;
}

}  // namespace codesum
