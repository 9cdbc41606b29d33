#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "codesum/corpus.hpp"
#include "codesum/error.hpp"
#include "codesum/lexer.hpp"

namespace codesum {

struct FilterConfig {
  double side_threshold = 0.9;
  std::size_t min_code_tokens = 20;
  std::size_t max_code_tokens = 200;
  std::size_t min_summary_tokens = 3;  // strict: summaries must be longer
  bool apply_first_sentence = true;

  bool operator==(const FilterConfig&) const = default;

  void check() const {
    if (!(side_threshold >= 0.0 && side_threshold <= 1.0)) {
      throw Error(ErrorKind::ConfigError, "side threshold must be in [0,1]");
    }
    if (min_code_tokens > max_code_tokens) {
      throw Error(ErrorKind::ConfigError, "min code tokens exceeds max code tokens");
    }
  }
};

/// Single-record form of filter_by_side.
inline bool passes_side(const CorpusRecord& r, double threshold) {
  if (!r.side_score) throw Error(ErrorKind::MissingScore, "record '" + r.id + "' has no side_score");
  return *r.side_score >= threshold;
}

inline std::vector<CorpusRecord> filter_by_side(const std::vector<CorpusRecord>& records, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error(ErrorKind::ConfigError, "side threshold must be in [0,1]");
  std::vector<CorpusRecord> out;
  for (const CorpusRecord& r : records) {
    if (passes_side(r, threshold)) out.push_back(r);
  }
  return out;
}

/// Single-record form of filter_benchmark. May rewrite the summary to its
/// first sentence; returns false when the record is dropped.
inline bool apply_benchmark(CorpusRecord& r, const FilterConfig& cfg) {
  const std::size_t code_tokens = lex_code(r.code, r.language).size();
  if (code_tokens < cfg.min_code_tokens || code_tokens > cfg.max_code_tokens) return false;
  std::string summary = cfg.apply_first_sentence ? first_sentence(r.summary) : r.summary;
  if (lex_summary(summary).size() <= cfg.min_summary_tokens) return false;
  r.summary = std::move(summary);
  return true;
}

inline std::vector<CorpusRecord> filter_benchmark(const std::vector<CorpusRecord>& records, const FilterConfig& cfg) {
  cfg.check();
  std::vector<CorpusRecord> out;
  for (CorpusRecord r : records) {
    if (apply_benchmark(r, cfg)) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace codesum
