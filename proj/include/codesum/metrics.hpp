#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "codesum/error.hpp"
#include "codesum/porter.hpp"
#include "codesum/utf8.hpp"

namespace codesum {

enum class Metric { Bleu, RougeL, Meteor, ChrF, CCoeff };

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::Bleu: return "bleu";
    case Metric::RougeL: return "rouge-l";
    case Metric::Meteor: return "meteor";
    case Metric::ChrF: return "chrf";
    case Metric::CCoeff: return "c-coeff";
  }
  return "?";
}

inline std::optional<Metric> parse_metric(std::string_view s) {
  for (Metric m : {Metric::Bleu, Metric::RougeL, Metric::Meteor, Metric::ChrF, Metric::CCoeff}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

struct MetricScore {
  Metric metric = Metric::Bleu;
  double value = 0.0;
  std::map<std::string, double> components;
};

using Tokens = std::vector<std::string>;

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline Tokens lowercase(const Tokens& tokens) {
  Tokens out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) out.push_back(ascii_lower(t));
  return out;
}

// ---- BLEU -------------------------------------------------------------------

enum class Smoothing { None, Epsilon, AddOne };

inline constexpr double kBleuEpsilon = 1e-9;

/// Clipped n-gram counts for one or more segments. Corpus BLEU pools these
/// by merge before taking the geometric mean.
struct BleuStats {
  int max_n = 4;
  std::vector<std::uint64_t> matches;
  std::vector<std::uint64_t> totals;
  std::uint64_t candidate_length = 0;
  std::uint64_t reference_length = 0;

  explicit BleuStats(int n = 4)
      : max_n(n), matches(static_cast<std::size_t>(n), 0), totals(static_cast<std::size_t>(n), 0) {}

  void merge(const BleuStats& o) {
    for (std::size_t i = 0; i < matches.size(); ++i) {
      matches[i] += o.matches[i];
      totals[i] += o.totals[i];
    }
    candidate_length += o.candidate_length;
    reference_length += o.reference_length;
  }
};

namespace detail {

inline std::map<Tokens, std::uint64_t> ngram_counts(const Tokens& t, std::size_t n) {
  std::map<Tokens, std::uint64_t> out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) ++out[Tokens(t.begin() + static_cast<std::ptrdiff_t>(i),
                                                              t.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return out;
}

}  // namespace detail

inline BleuStats bleu_stats(const Tokens& candidate, const std::vector<Tokens>& references, int max_n = 4) {
  if (candidate.empty()) throw Error(ErrorKind::EmptyCandidate, "candidate has no tokens");
  if (references.empty()) throw Error(ErrorKind::EmptyReferences, "no references");
  if (max_n < 1) throw Error(ErrorKind::InvalidArgument, "max_n must be >= 1");
  const Tokens cand = lowercase(candidate);
  std::vector<Tokens> refs;
  for (const Tokens& r : references) refs.push_back(lowercase(r));

  BleuStats s(max_n);
  for (int n = 1; n <= max_n; ++n) {
    const auto counts = detail::ngram_counts(cand, static_cast<std::size_t>(n));
    std::map<Tokens, std::uint64_t> max_ref;
    for (const Tokens& r : refs) {
      for (const auto& [gram, c] : detail::ngram_counts(r, static_cast<std::size_t>(n))) {
        auto& slot = max_ref[gram];
        slot = std::max(slot, c);
      }
    }
    std::uint64_t matched = 0;
    std::uint64_t total = 0;
    for (const auto& [gram, c] : counts) {
      total += c;
      auto it = max_ref.find(gram);
      if (it != max_ref.end()) matched += std::min(c, it->second);
    }
    s.matches[static_cast<std::size_t>(n - 1)] = matched;
    s.totals[static_cast<std::size_t>(n - 1)] = total;
  }
  // Closest reference length; ties go to the shorter reference.
  std::size_t best = refs.front().size();
  for (const Tokens& r : refs) {
    const auto d = [&](std::size_t len) {
      return len > cand.size() ? len - cand.size() : cand.size() - len;
    };
    if (d(r.size()) < d(best) || (d(r.size()) == d(best) && r.size() < best)) best = r.size();
  }
  s.candidate_length = cand.size();
  s.reference_length = best;
  return s;
}

inline MetricScore bleu_from_stats(const BleuStats& s, Smoothing smoothing = Smoothing::None) {
  MetricScore out{Metric::Bleu, 0.0, {}};
  double log_sum = 0.0;
  bool zero = false;
  for (int n = 1; n <= s.max_n; ++n) {
    double num = static_cast<double>(s.matches[static_cast<std::size_t>(n - 1)]);
    double den = static_cast<double>(s.totals[static_cast<std::size_t>(n - 1)]);
    if (smoothing == Smoothing::AddOne && n >= 2) {
      num += 1.0;
      den += 1.0;
    } else if (smoothing == Smoothing::Epsilon && num == 0.0) {
      num = kBleuEpsilon;
    }
    const double p = den > 0.0 ? num / den : (smoothing == Smoothing::None ? 0.0 : kBleuEpsilon);
    out.components["p" + std::to_string(n)] = p;
    if (p <= 0.0) {
      zero = true;
    } else {
      log_sum += std::log(p);
    }
  }
  const double c = static_cast<double>(s.candidate_length);
  const double r = static_cast<double>(s.reference_length);
  const double bp = c == 0.0 ? 0.0 : (c > r ? 1.0 : std::exp(1.0 - r / c));
  out.components["bp"] = bp;
  out.components["candidate_length"] = c;
  out.components["reference_length"] = r;
  out.value = zero ? 0.0 : std::min(1.0, bp * std::exp(log_sum / s.max_n));
  return out;
}

inline MetricScore bleu(const Tokens& candidate, const std::vector<Tokens>& references, int max_n = 4,
                        Smoothing smoothing = Smoothing::None) {
  return bleu_from_stats(bleu_stats(candidate, references, max_n), smoothing);
}

// ---- ROUGE-L ----------------------------------------------------------------

inline std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline MetricScore rouge_l(const Tokens& candidate, const Tokens& reference) {
  if (candidate.empty() || reference.empty()) throw Error(ErrorKind::EmptyInput, "rouge-l needs non-empty inputs");
  const std::size_t lcs = lcs_length(lowercase(candidate), lowercase(reference));
  const double p = static_cast<double>(lcs) / static_cast<double>(candidate.size());
  const double r = static_cast<double>(lcs) / static_cast<double>(reference.size());
  MetricScore out{Metric::RougeL, p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0, {}};
  out.components = {{"lcs", static_cast<double>(lcs)}, {"precision", p}, {"recall", r}};
  return out;
}

// ---- METEOR -----------------------------------------------------------------

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
};

/// Exact then Porter-stem unigram alignment, each stage matching every
/// unaligned candidate token to the leftmost unaligned equal reference token.
inline MetricScore meteor(const Tokens& candidate, const Tokens& reference, MeteorParams params = {}) {
  if (candidate.empty() || reference.empty()) throw Error(ErrorKind::EmptyInput, "meteor needs non-empty inputs");
  const Tokens cand = lowercase(candidate);
  const Tokens ref = lowercase(reference);
  std::vector<long> align(cand.size(), -1);
  std::vector<bool> used(ref.size(), false);
  auto stage = [&](const Tokens& c, const Tokens& r) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (align[i] >= 0) continue;
      for (std::size_t j = 0; j < r.size(); ++j) {
        if (!used[j] && c[i] == r[j]) {
          align[i] = static_cast<long>(j);
          used[j] = true;
          break;
        }
      }
    }
  };
  stage(cand, ref);
  PorterStemmer stemmer;
  Tokens cand_stems;
  Tokens ref_stems;
  for (const std::string& t : cand) cand_stems.push_back(stemmer.stem(t));
  for (const std::string& t : ref) ref_stems.push_back(stemmer.stem(t));
  stage(cand_stems, ref_stems);

  std::size_t matches = 0;
  std::size_t chunks = 0;
  long prev = -2;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (align[i] < 0) {
      prev = -2;
      continue;
    }
    ++matches;
    if (prev < 0 || align[i] != prev + 1) ++chunks;
    prev = align[i];
  }
  MetricScore out{Metric::Meteor, 0.0, {}};
  out.components["matches"] = static_cast<double>(matches);
  out.components["chunks"] = static_cast<double>(chunks);
  if (matches == 0) return out;
  const double p = static_cast<double>(matches) / static_cast<double>(cand.size());
  const double r = static_cast<double>(matches) / static_cast<double>(ref.size());
  const double fmean = p * r / (params.alpha * p + (1.0 - params.alpha) * r);
  const double penalty =
      params.gamma * std::pow(static_cast<double>(chunks) / static_cast<double>(matches), params.beta);
  out.components["precision"] = p;
  out.components["recall"] = r;
  out.components["penalty"] = penalty;
  out.value = fmean * (1.0 - penalty);
  return out;
}

// ---- chrF -------------------------------------------------------------------

/// Character n-gram F-score on raw text with whitespace removed. P and R are
/// averaged over the orders both sides have n-grams for, then combined.
inline MetricScore chrf(std::string_view candidate, std::string_view reference, int max_char_n = 6,
                        double beta = 2.0) {
  auto strip = [](std::string_view s) {
    std::u32string out;
    for (char32_t c : utf8::decode(s)) {
      if (c != U' ' && c != U'\t' && c != U'\n' && c != U'\r' && c != U'\f' && c != U'\v') out += c;
    }
    return out;
  };
  const std::u32string cand = strip(candidate);
  const std::u32string ref = strip(reference);
  if (cand.empty() || ref.empty()) throw Error(ErrorKind::EmptyInput, "chrf needs non-empty inputs");
  double sum_p = 0.0;
  double sum_r = 0.0;
  int effective = 0;
  for (int n = 1; n <= max_char_n; ++n) {
    const std::size_t un = static_cast<std::size_t>(n);
    if (cand.size() < un || ref.size() < un) continue;
    std::unordered_map<std::u32string, std::uint64_t> ref_counts;
    for (std::size_t i = 0; i + un <= ref.size(); ++i) ++ref_counts[ref.substr(i, un)];
    std::unordered_map<std::u32string, std::uint64_t> cand_counts;
    for (std::size_t i = 0; i + un <= cand.size(); ++i) ++cand_counts[cand.substr(i, un)];
    std::uint64_t match = 0;
    for (const auto& [gram, c] : cand_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) match += std::min(c, it->second);
    }
    sum_p += static_cast<double>(match) / static_cast<double>(cand.size() - un + 1);
    sum_r += static_cast<double>(match) / static_cast<double>(ref.size() - un + 1);
    ++effective;
  }
  MetricScore out{Metric::ChrF, 0.0, {}};
  const double p = sum_p / effective;
  const double r = sum_r / effective;
  const double b2 = beta * beta;
  out.components = {{"precision", p}, {"recall", r}, {"effective_order", static_cast<double>(effective)}};
  if (p + r > 0.0) out.value = (1.0 + b2) * p * r / (b2 * p + r);
  return out;
}

// ---- Levenshtein / c_coeff --------------------------------------------------

template <typename Seq>
std::size_t edit_distance(const Seq& a, const Seq& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

/// Unit-cost edit distance over code points.
inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  return edit_distance(utf8::decode(a), utf8::decode(b));
}

/// camelCase / snake_case / digit-boundary parts of an identifier, lowercased.
inline Tokens split_identifier(std::string_view token) {
  Tokens parts;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) parts.push_back(ascii_lower(cur));
    cur.clear();
  };
  auto upper = [](char c) { return c >= 'A' && c <= 'Z'; };
  auto lower = [](char c) { return c >= 'a' && c <= 'z'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  for (std::size_t i = 0; i < token.size(); ++i) {
    const char c = token[i];
    if (c == '_' || c == '$') {
      flush();
      continue;
    }
    if (!cur.empty()) {
      const char p = cur.back();
      const bool boundary = (upper(c) && (lower(p) || digit(p))) ||
                            (upper(c) && upper(p) && i + 1 < token.size() && lower(token[i + 1])) ||
                            (digit(c) != digit(p) && (digit(c) || digit(p)) && (lower(p) || upper(p) || digit(p)) &&
                             (lower(c) || upper(c) || digit(c)));
      if (boundary) flush();
    }
    cur += c;
  }
  flush();
  return parts;
}

/// Fraction of summary tokens within edit distance < 2 of some code token or
/// identifier part.
inline MetricScore c_coeff(const Tokens& summary, const Tokens& code_tokens) {
  if (summary.empty()) throw Error(ErrorKind::EmptySummary, "c_coeff needs a non-empty summary");
  std::vector<std::u32string> vocab;
  {
    std::vector<std::string> words;
    for (const std::string& t : code_tokens) {
      words.push_back(ascii_lower(t));
      for (std::string& part : split_identifier(t)) words.push_back(std::move(part));
    }
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    for (const std::string& w : words) {
      const auto cps = utf8::decode(w);
      vocab.emplace_back(cps.begin(), cps.end());
    }
  }
  std::size_t hits = 0;
  for (const std::string& t : summary) {
    const auto cps = utf8::decode(ascii_lower(t));
    const std::u32string word(cps.begin(), cps.end());
    for (const std::u32string& v : vocab) {
      const std::size_t gap = v.size() > word.size() ? v.size() - word.size() : word.size() - v.size();
      if (gap < 2 && edit_distance(word, v) < 2) {
        ++hits;
        break;
      }
    }
  }
  MetricScore out{Metric::CCoeff, static_cast<double>(hits) / static_cast<double>(summary.size()), {}};
  out.components["matched"] = static_cast<double>(hits);
  return out;
}

}  // namespace codesum
