#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "codesum/error.hpp"
#include "codesum/lexer.hpp"
#include "codesum/reducers.hpp"

namespace codesum {

/// Token occurrence counts; a commutative monoid under merge.
struct TokenDistribution {
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;

  void add(const std::string& token, std::uint64_t n = 1) {
    if (n == 0) return;
    counts[token] += n;
    total += n;
  }

  void add(const TokenSequence& seq) {
    for (const std::string& t : seq.tokens) add(t);
  }

  void merge(const TokenDistribution& other) {
    for (const auto& [token, c] : other.counts) add(token, c);
  }

  std::size_t distinct() const noexcept { return counts.size(); }
  bool operator==(const TokenDistribution&) const = default;
};

struct EntropyReport {
  double entropy_bits = 0.0;
  std::size_t distinct_tokens = 0;
  std::optional<double> baseline_entropy_bits;
  std::optional<double> entropy_reduction_pct;
};

template <typename Range>
TokenDistribution accumulate_distribution(const Range& sequences) {
  TokenDistribution d;
  for (const TokenSequence& s : sequences) d.add(s);
  return d;
}

namespace detail {

inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

}  // namespace detail

inline double percent_reduction(double baseline, double optimized) {
  if (!(baseline > 0.0)) throw Error(ErrorKind::ZeroBaseline, "baseline entropy must be positive");
  return 100.0 * (baseline - optimized) / baseline;
}

/// H = -sum p log2 p in bits per token.
inline EntropyReport shannon_entropy(const TokenDistribution& dist) {
  if (dist.total == 0) throw Error(ErrorKind::EmptyDistribution, "distribution has no tokens");
  std::vector<double> terms;
  terms.reserve(dist.counts.size());
  const double total = static_cast<double>(dist.total);
  for (const auto& [token, c] : dist.counts) {
    const double p = static_cast<double>(c) / total;
    terms.push_back(-p * std::log2(p));
  }
  EntropyReport r;
  r.entropy_bits = std::max(0.0, detail::pairwise_sum(terms.data(), terms.size()));
  r.distinct_tokens = dist.counts.size();
  return r;
}

inline double entropy_reduction(const EntropyReport& optimized, const EntropyReport& baseline) {
  return percent_reduction(baseline.entropy_bits, optimized.entropy_bits);
}

/// Attaches the baseline and reduction percentage to an optimized report.
inline EntropyReport with_baseline(EntropyReport optimized, const EntropyReport& baseline) {
  optimized.baseline_entropy_bits = baseline.entropy_bits;
  optimized.entropy_reduction_pct = entropy_reduction(optimized, baseline);
  return optimized;
}

/// Running pooled retention: sum(out) / sum(in).
struct RetentionAccumulator {
  std::uint64_t outcomes = 0;
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;

  void add(std::size_t in, std::size_t out) {
    ++outcomes;
    input_tokens += in;
    output_tokens += out;
  }

  void add(const ReductionOutcome& o) { add(o.input_token_count, o.output_token_count); }

  double ratio() const {
    if (outcomes == 0) throw Error(ErrorKind::EmptyStream, "no reduction outcomes");
    if (input_tokens == 0) throw Error(ErrorKind::ZeroInputTokens, "outcomes have no input tokens");
    return static_cast<double>(output_tokens) / static_cast<double>(input_tokens);
  }
};

template <typename Range>
double aggregate_retention(const Range& outcomes) {
  RetentionAccumulator acc;
  for (const ReductionOutcome& o : outcomes) acc.add(o);
  return acc.ratio();
}

}  // namespace codesum
