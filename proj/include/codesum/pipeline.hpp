#pragma once

#include <cctype>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "codesum/corpus.hpp"
#include "codesum/error.hpp"
#include "codesum/filter.hpp"
#include "codesum/info_stats.hpp"
#include "codesum/lexer.hpp"
#include "codesum/metrics.hpp"
#include "codesum/parallel.hpp"
#include "codesum/reducers.hpp"
#include "codesum/stats.hpp"
#include "codesum/types.hpp"

namespace codesum {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum class ExitCode : int { Ok = 0, ConfigError = 1, IoError = 2, TooManyFailures = 3 };

/// Everything a run depends on. `threads` only affects speed, so it is
/// reported under "runtime" instead of the config echo.
struct PipelineConfig {
  std::string command;
  std::string input_path;
  std::string output_path;
  std::string report_path;
  std::optional<Language> language;
  std::optional<Strategy> strategy;  // unset = none
  std::string ban_list_path;
  std::string train_path;
  std::size_t k = kDefaultBanBudget;
  int max_n = kMaxNgramOrder;
  std::optional<double> side_threshold;
  bool benchmark_filter = false;
  FilterConfig filter;
  std::vector<Metric> metrics{Metric::Bleu, Metric::RougeL, Metric::Meteor, Metric::ChrF, Metric::CCoeff};
  double alpha = 0.05;
  Correction correction = Correction::Holm;
  std::string baseline_path;
  std::string candidates_path;
  std::string references_path;
  std::vector<std::pair<std::string, std::string>> systems;
  std::optional<std::uint64_t> max_failures;
  bool keep_empty = false;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  bool operator==(const PipelineConfig&) const = default;
};

inline Json config_to_json(const PipelineConfig& c) {
  Json j = Json::object();
  j["command"] = c.command;
  j["input"] = c.input_path;
  j["output"] = c.output_path;
  j["report"] = c.report_path;
  j["language"] = c.language ? Json(std::string(to_string(*c.language))) : Json(nullptr);
  j["strategy"] = c.strategy ? std::string(to_string(*c.strategy)) : std::string("none");
  j["ban_list"] = c.ban_list_path;
  j["train"] = c.train_path;
  j["k"] = c.k;
  j["max_n"] = c.max_n;
  j["side_threshold"] = c.side_threshold ? Json(*c.side_threshold) : Json(nullptr);
  j["benchmark_filter"] = c.benchmark_filter;
  j["min_code_tokens"] = c.filter.min_code_tokens;
  j["max_code_tokens"] = c.filter.max_code_tokens;
  j["min_summary_tokens"] = c.filter.min_summary_tokens;
  j["first_sentence"] = c.filter.apply_first_sentence;
  Json metrics = Json::array();
  for (Metric m : c.metrics) metrics.push_back(std::string(to_string(m)));
  j["metrics"] = metrics;
  j["alpha"] = c.alpha;
  j["correction"] = c.correction == Correction::Holm ? "holm" : "none";
  j["baseline"] = c.baseline_path;
  j["candidates"] = c.candidates_path;
  j["references"] = c.references_path;
  Json systems = Json::array();
  for (const auto& [name, path] : c.systems) systems.push_back(Json::array({name, path}));
  j["systems"] = systems;
  j["max_failures"] = c.max_failures ? Json(*c.max_failures) : Json(nullptr);
  j["keep_empty"] = c.keep_empty;
  j["seed"] = c.seed;
  return j;
}

inline PipelineConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::ConfigError, "config must be a JSON object");
  PipelineConfig c;
  try {
    auto str = [&](const char* key, std::string& into) {
      if (j.contains(key)) into = j.at(key).get<std::string>();
    };
    str("command", c.command);
    str("input", c.input_path);
    str("output", c.output_path);
    str("report", c.report_path);
    if (j.contains("language") && !j.at("language").is_null()) {
      const std::string s = j.at("language").get<std::string>();
      c.language = parse_language(s);
      if (!c.language) throw Error(ErrorKind::ConfigError, "unknown language '" + s + "'");
    }
    if (j.contains("strategy")) {
      const std::string s = j.at("strategy").get<std::string>();
      if (s != "none") {
        c.strategy = parse_strategy(s);
        if (!c.strategy || *c.strategy == Strategy::Original) {
          throw Error(ErrorKind::ConfigError, "unknown strategy '" + s + "'");
        }
      }
    }
    str("ban_list", c.ban_list_path);
    str("train", c.train_path);
    if (j.contains("k")) c.k = j.at("k").get<std::size_t>();
    if (j.contains("max_n")) c.max_n = j.at("max_n").get<int>();
    if (j.contains("side_threshold") && !j.at("side_threshold").is_null()) {
      c.side_threshold = j.at("side_threshold").get<double>();
    }
    if (j.contains("benchmark_filter")) c.benchmark_filter = j.at("benchmark_filter").get<bool>();
    if (j.contains("min_code_tokens")) c.filter.min_code_tokens = j.at("min_code_tokens").get<std::size_t>();
    if (j.contains("max_code_tokens")) c.filter.max_code_tokens = j.at("max_code_tokens").get<std::size_t>();
    if (j.contains("min_summary_tokens")) c.filter.min_summary_tokens = j.at("min_summary_tokens").get<std::size_t>();
    if (j.contains("first_sentence")) c.filter.apply_first_sentence = j.at("first_sentence").get<bool>();
    if (j.contains("metrics")) {
      c.metrics.clear();
      for (const Json& m : j.at("metrics")) {
        auto parsed = parse_metric(m.get<std::string>());
        if (!parsed) throw Error(ErrorKind::ConfigError, "unknown metric '" + m.get<std::string>() + "'");
        c.metrics.push_back(*parsed);
      }
    }
    if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
    if (j.contains("correction")) {
      const std::string s = j.at("correction").get<std::string>();
      if (s != "holm" && s != "none") throw Error(ErrorKind::ConfigError, "unknown correction '" + s + "'");
      c.correction = s == "holm" ? Correction::Holm : Correction::None;
    }
    str("baseline", c.baseline_path);
    str("candidates", c.candidates_path);
    str("references", c.references_path);
    if (j.contains("systems")) {
      for (const Json& s : j.at("systems")) c.systems.emplace_back(s.at(0).get<std::string>(), s.at(1).get<std::string>());
    }
    if (j.contains("max_failures") && !j.at("max_failures").is_null()) {
      c.max_failures = j.at("max_failures").get<std::uint64_t>();
    }
    if (j.contains("keep_empty")) c.keep_empty = j.at("keep_empty").get<bool>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("bad config: ") + e.what());
  }
  return c;
}

/// Result of one subcommand: the report document plus the process exit code.
struct RunResult {
  Json report;
  ExitCode exit_code = ExitCode::Ok;
  std::uint64_t failures = 0;
};

namespace detail {

inline ExitCode exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::FileNotFound:
    case ErrorKind::IoFailure:
    case ErrorKind::SerializationFailure:
      return ExitCode::IoError;
    default:
      return ExitCode::ConfigError;
  }
}

inline void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::ConfigError, message);
}

inline bool same_path(const std::string& a, const std::string& b) {
  if (a.empty() || b.empty()) return false;
  std::error_code ec;
  const auto ca = std::filesystem::weakly_canonical(a, ec);
  const auto cb = std::filesystem::weakly_canonical(b, ec);
  return ca == cb;
}

inline void check_distinct(const std::vector<std::string>& reads, const std::vector<std::string>& writes) {
  for (std::size_t i = 0; i < writes.size(); ++i) {
    for (const std::string& r : reads) {
      require(!same_path(writes[i], r), "output path '" + writes[i] + "' would overwrite an input");
    }
    for (std::size_t j = i + 1; j < writes.size(); ++j) {
      require(!same_path(writes[i], writes[j]), "two outputs share the path '" + writes[i] + "'");
    }
  }
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct Failure {
  std::size_t line_no = 0;
  std::string record_id;
  ErrorKind kind = ErrorKind::MalformedRecord;
  std::string message;
};

inline Json failures_json(const std::vector<Failure>& failures) {
  Json arr = Json::array();
  for (const Failure& f : failures) {
    Json e = Json::object();
    e["line"] = f.line_no;
    e["id"] = f.record_id;
    e["kind"] = std::string(to_string(f.kind));
    e["message"] = f.message;
    arr.push_back(e);
  }
  return arr;
}

inline Json stats_json(const CorpusStats& s) {
  Json j = Json::object();
  j["records"] = s.record_count;
  j["code_tokens"] = s.total_code_tokens;
  j["summary_tokens"] = s.total_summary_tokens;
  return j;
}

inline Json entropy_json(const TokenDistribution& d) {
  Json j = Json::object();
  j["total_tokens"] = d.total;
  j["distinct_tokens"] = d.distinct();
  j["entropy_bits"] = d.total > 0 ? Json(shannon_entropy(d).entropy_bits) : Json(nullptr);
  return j;
}

inline Json report_header(const PipelineConfig& cfg) {
  Json j = Json::object();
  j["tool"] = "codesum";
  j["version"] = std::string(kToolVersion);
  j["command"] = cfg.command;
  j["config"] = config_to_json(cfg);
  return j;
}

inline void finish(RunResult& result, const PipelineConfig& cfg, const std::vector<Failure>& failures,
                   const Stopwatch& clock, Json timing) {
  result.failures = failures.size();
  result.report["failed"] = failures.size();
  result.report["failures"] = failures_json(failures);
  timing["total_ms"] = clock.ms();
  Json runtime = Json::object();
  runtime["threads"] = cfg.threads;
  runtime["timing"] = timing;
  result.report["runtime"] = runtime;
  if (cfg.max_failures && failures.size() > *cfg.max_failures) result.exit_code = ExitCode::TooManyFailures;
}

inline constexpr std::size_t kBatchSize = 2048;

/// Streams a corpus in batches; fn sees each batch of parsed items in order
/// together with the source line of each item.
inline void for_each_batch(
    const std::string& path,
    const std::function<void(std::vector<CorpusReader::Item>&, const std::vector<std::size_t>&)>& fn) {
  CorpusReader reader(path);
  std::vector<CorpusReader::Item> batch;
  std::vector<std::size_t> lines;
  while (true) {
    batch.clear();
    lines.clear();
    while (batch.size() < kBatchSize) {
      auto item = reader.next();
      if (!item) break;
      batch.push_back(std::move(*item));
      lines.push_back(reader.line_no());
    }
    if (batch.empty()) return;
    fn(batch, lines);
  }
}

inline Failure failure_from(const RecordError& e) {
  return Failure{e.line_no, "", e.kind, e.message()};
}

inline std::string reduced_text(const TokenSequence& seq, Language lang) {
  if (seq.origin == TokenOrigin::AstSerialized) {
    std::string out;
    for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
      if (i) out += ' ';
      out += seq.tokens[i];
    }
    return out;
  }
  return join_code_tokens(seq.tokens, lang);
}

}  // namespace detail

// ---- mine-ngrams ------------------------------------------------------------

inline RunResult cmd_mine_ngrams(const PipelineConfig& cfg) {
  detail::Stopwatch clock;
  const std::string source = !cfg.train_path.empty() ? cfg.train_path : cfg.input_path;
  const std::string target = !cfg.output_path.empty() ? cfg.output_path : cfg.ban_list_path;
  detail::require(!source.empty(), "mine-ngrams needs --train or --input");
  detail::require(!target.empty(), "mine-ngrams needs --output or --ban-list");
  detail::require(cfg.k >= 1, "--k must be >= 1");
  detail::require(cfg.max_n >= 1 && cfg.max_n <= kMaxNgramOrder, "--max-n must be in [1,4]");
  detail::check_distinct({source}, {target, cfg.report_path});

  RunResult result;
  result.report = detail::report_header(cfg);
  std::vector<detail::Failure> failures;
  NgramCounter counter(cfg.max_n);
  CorpusFingerprint fingerprint;
  std::uint64_t records = 0;
  detail::for_each_batch(source, [&](std::vector<CorpusReader::Item>& batch, const std::vector<std::size_t>& lines) {
    auto lexed = parallel_map(batch.size(), cfg.threads, [&](std::size_t i) -> std::optional<TokenSequence> {
      if (auto* r = std::get_if<CorpusRecord>(&batch[i])) return lex_code(r->code, r->language);
      return std::nullopt;
    });
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (auto* r = std::get_if<CorpusRecord>(&batch[i])) {
        if (cfg.language && r->language != *cfg.language) {
          failures.push_back({lines[i], r->id, ErrorKind::InvalidFieldValue, "language does not match --language"});
          continue;
        }
        counter.add(*lexed[i]);
        fingerprint.add(*r);
        ++records;
      } else {
        failures.push_back(detail::failure_from(std::get<RecordError>(batch[i])));
      }
    }
  });
  if (records == 0) throw Error(ErrorKind::EmptyCorpus, "training corpus has no records");
  const NgramBanList ban = ban_list_from_counts(counter, cfg.k, fingerprint.hex());
  save_ban_list(ban, target);

  Json per_order = Json::object();
  for (int n = 1; n <= ban.max_n; ++n) {
    std::size_t count = 0;
    for (const auto& [gram, freq] : ban.entries) count += gram.size() == static_cast<std::size_t>(n);
    per_order[std::to_string(n)] = count;
  }
  result.report["training_records"] = records;
  result.report["ban_list_fingerprint"] = ban.source_fingerprint;
  result.report["ban_list_entries"] = per_order;
  detail::finish(result, cfg, failures, clock, Json::object());
  return result;
}

// ---- reduce -----------------------------------------------------------------

inline NgramBanList resolve_ban_list(const PipelineConfig& cfg) {
  if (!cfg.ban_list_path.empty()) return load_ban_list(cfg.ban_list_path);
  NgramCounter counter(cfg.max_n);
  CorpusFingerprint fingerprint;
  std::uint64_t records = 0;
  CorpusReader reader(cfg.train_path);
  while (auto item = reader.next()) {
    if (auto* r = std::get_if<CorpusRecord>(&*item)) {
      counter.add(lex_code(r->code, r->language));
      fingerprint.add(*r);
      ++records;
    }
  }
  if (records == 0) throw Error(ErrorKind::EmptyCorpus, "training corpus has no records");
  return ban_list_from_counts(counter, cfg.k, fingerprint.hex());
}

inline RunResult cmd_reduce(const PipelineConfig& cfg) {
  detail::Stopwatch clock;
  detail::require(!cfg.input_path.empty(), "reduce needs --input");
  detail::require(!cfg.output_path.empty(), "reduce needs --output");
  if (cfg.strategy == Strategy::CrystalBleu) {
    detail::require(!cfg.ban_list_path.empty() || !cfg.train_path.empty(),
                    "strategy crystalbleu needs --ban-list or --train");
  }
  detail::require(cfg.strategy != Strategy::Original, "strategy must be ast, signature, crystalbleu or none");
  detail::check_distinct({cfg.input_path, cfg.ban_list_path, cfg.train_path}, {cfg.output_path, cfg.report_path});

  RunResult result;
  result.report = detail::report_header(cfg);
  Json timing = Json::object();

  std::optional<NgramBanList> ban;
  if (cfg.strategy == Strategy::CrystalBleu) {
    detail::Stopwatch t;
    ban = resolve_ban_list(cfg);
    timing["ban_list_ms"] = t.ms();
  }

  struct Reduced {
    std::optional<CorpusRecord> record;
    std::vector<std::string> input_tokens;
    TokenSequence output_tokens;
    bool empty = false;
    std::optional<detail::Failure> failure;
  };

  std::vector<detail::Failure> failures;
  CorpusStats before;
  TokenDistribution dist_before;
  TokenDistribution dist_after;
  RetentionAccumulator retention;
  std::uint64_t input_count = 0;
  std::uint64_t dropped_empty = 0;
  std::uint64_t retention_above_one = 0;
  CorpusWriter writer(cfg.output_path);
  detail::Stopwatch reduce_clock;

  detail::for_each_batch(cfg.input_path, [&](std::vector<CorpusReader::Item>& batch, const std::vector<std::size_t>& lines) {
    auto reduced = parallel_map(batch.size(), cfg.threads, [&](std::size_t i) {
      Reduced out;
      auto* r = std::get_if<CorpusRecord>(&batch[i]);
      if (!r) {
        out.failure = detail::failure_from(std::get<RecordError>(batch[i]));
        return out;
      }
      if (cfg.language && r->language != *cfg.language) {
        out.failure = detail::Failure{lines[i], r->id, ErrorKind::InvalidFieldValue, "language does not match --language"};
        return out;
      }
      try {
        TokenSequence input = lex_code(r->code, r->language);
        out.input_tokens = std::move(input.tokens);
        CorpusRecord rec = *r;
        if (!cfg.strategy) {
          out.output_tokens.tokens = out.input_tokens;
          out.record = std::move(rec);
          return out;
        }
        ReductionOutcome o;
        switch (*cfg.strategy) {
          case Strategy::Ast: o = reduce_ast(rec); break;
          case Strategy::Signature: o = reduce_signature(rec); break;
          case Strategy::CrystalBleu: o = reduce_crystalbleu(rec, *ban); break;
          case Strategy::Original: break;
        }
        out.empty = o.empty_after_reduction;
        rec.reduced_code = detail::reduced_text(o.reduced_tokens, rec.language);
        rec.strategy = *cfg.strategy;
        out.output_tokens = std::move(o.reduced_tokens);
        out.record = std::move(rec);
      } catch (const Error& e) {
        out.failure = detail::Failure{lines[i], r->id, e.kind(), e.what()};
      }
      return out;
    });
    for (Reduced& item : reduced) {
      ++input_count;
      if (item.failure) {
        failures.push_back(std::move(*item.failure));
        continue;
      }
      for (const std::string& t : item.input_tokens) dist_before.add(t);
      dist_after.add(item.output_tokens);
      retention.add(item.input_tokens.size(), item.output_tokens.size());
      retention_above_one += item.output_tokens.size() > item.input_tokens.size();
      before.add(*item.record);
      if (item.empty && !cfg.keep_empty) {
        ++dropped_empty;
        continue;
      }
      writer.write(*item.record);
    }
  });
  const CorpusStats after = writer.close();
  timing["reduce_ms"] = reduce_clock.ms();

  Json counts = Json::object();
  counts["input"] = input_count;
  counts["output"] = after.record_count;
  counts["filtered"] = dropped_empty;
  counts["failed"] = failures.size();
  result.report["counts"] = counts;
  result.report["corpus_before"] = detail::stats_json(before);
  result.report["corpus_after"] = detail::stats_json(after);
  result.report["tokens_before"] = detail::entropy_json(dist_before);
  result.report["tokens_after"] = detail::entropy_json(dist_after);
  if (dist_before.total > 0 && dist_after.total > 0) {
    const EntropyReport b = shannon_entropy(dist_before);
    const EntropyReport a = shannon_entropy(dist_after);
    result.report["entropy_reduction_pct"] = b.entropy_bits > 0.0 ? Json(entropy_reduction(a, b)) : Json(nullptr);
  } else {
    result.report["entropy_reduction_pct"] = nullptr;
  }
  result.report["retention"] = retention.input_tokens > 0 ? Json(retention.ratio()) : Json(nullptr);
  result.report["retention_above_one"] = retention_above_one;
  result.report["ban_list_fingerprint"] = ban ? Json(ban->source_fingerprint) : Json(nullptr);
  detail::finish(result, cfg, failures, clock, timing);
  return result;
}

// ---- filter -----------------------------------------------------------------

inline RunResult cmd_filter(const PipelineConfig& cfg) {
  detail::Stopwatch clock;
  detail::require(!cfg.input_path.empty(), "filter needs --input");
  detail::require(!cfg.output_path.empty(), "filter needs --output");
  if (cfg.side_threshold) {
    detail::require(*cfg.side_threshold >= 0.0 && *cfg.side_threshold <= 1.0, "--side-threshold must be in [0,1]");
  }
  if (cfg.benchmark_filter) cfg.filter.check();
  detail::check_distinct({cfg.input_path}, {cfg.output_path, cfg.report_path});

  RunResult result;
  result.report = detail::report_header(cfg);
  std::vector<detail::Failure> failures;
  CorpusStats before;
  std::uint64_t input_count = 0;
  std::uint64_t dropped_side = 0;
  std::uint64_t dropped_benchmark = 0;
  CorpusWriter writer(cfg.output_path);

  enum class Verdict { Keep, DropSide, DropBenchmark, Fail };
  struct Filtered {
    Verdict verdict = Verdict::Keep;
    std::optional<CorpusRecord> record;
    std::optional<detail::Failure> failure;
  };

  detail::for_each_batch(cfg.input_path, [&](std::vector<CorpusReader::Item>& batch, const std::vector<std::size_t>& lines) {
    auto verdicts = parallel_map(batch.size(), cfg.threads, [&](std::size_t i) {
      Filtered out;
      auto* r = std::get_if<CorpusRecord>(&batch[i]);
      if (!r) {
        out.verdict = Verdict::Fail;
        out.failure = detail::failure_from(std::get<RecordError>(batch[i]));
        return out;
      }
      out.record = *r;
      if (cfg.language && r->language != *cfg.language) {
        out.verdict = Verdict::Fail;
        out.failure = detail::Failure{lines[i], r->id, ErrorKind::InvalidFieldValue, "language does not match --language"};
        return out;
      }
      try {
        if (cfg.side_threshold && !passes_side(*r, *cfg.side_threshold)) {
          out.verdict = Verdict::DropSide;
        } else if (cfg.benchmark_filter && !apply_benchmark(*out.record, cfg.filter)) {
          out.verdict = Verdict::DropBenchmark;
        }
      } catch (const Error& e) {
        out.verdict = Verdict::Fail;
        out.failure = detail::Failure{lines[i], r->id, e.kind(), e.what()};
      }
      return out;
    });
    for (std::size_t i = 0; i < batch.size(); ++i) {
      Filtered& f = verdicts[i];
      ++input_count;
      if (f.verdict == Verdict::Fail) {
        failures.push_back(std::move(*f.failure));
        continue;
      }
      before.add(std::get<CorpusRecord>(batch[i]));
      if (f.verdict == Verdict::DropSide) {
        ++dropped_side;
      } else if (f.verdict == Verdict::DropBenchmark) {
        ++dropped_benchmark;
      } else {
        writer.write(*f.record);
      }
    }
  });
  const CorpusStats after = writer.close();

  Json filters = Json::array();
  if (cfg.side_threshold) filters.push_back("side");
  if (cfg.benchmark_filter) filters.push_back("benchmark");
  result.report["filters"] = filters;
  result.report["identity"] = filters.empty();
  Json counts = Json::object();
  counts["input"] = input_count;
  counts["output"] = after.record_count;
  counts["filtered"] = dropped_side + dropped_benchmark;
  counts["filtered_side"] = dropped_side;
  counts["filtered_benchmark"] = dropped_benchmark;
  counts["failed"] = failures.size();
  result.report["counts"] = counts;
  result.report["corpus_before"] = detail::stats_json(before);
  result.report["corpus_after"] = detail::stats_json(after);
  detail::finish(result, cfg, failures, clock, Json::object());
  return result;
}

// ---- stats ------------------------------------------------------------------

inline constexpr std::string_view kDistributionMagic = "#codesum-distribution";

/// Token counts as text: a header line, then `token<TAB>count` per line in
/// token order, tokens escaped like ban-list tokens.
inline void save_distribution(const TokenDistribution& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  out << kDistributionMagic << "\ttotal=" << d.total << '\n';
  for (const auto& [token, c] : d.counts) out << detail::escape_token(token) << '\t' << c << '\n';
  if (!out) throw Error(ErrorKind::IoFailure, "write failed on " + path.string());
}

inline bool is_distribution_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string line;
  return in && std::getline(in, line) && line.starts_with(kDistributionMagic);
}

inline TokenDistribution load_distribution(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileNotFound, path.string());
  std::string line;
  if (!std::getline(in, line) || !line.starts_with(kDistributionMagic)) {
    throw Error(ErrorKind::MalformedRecord, path.string() + ": missing distribution header");
  }
  TokenDistribution d;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t tab = line.rfind('\t');
    std::uint64_t c = 0;
    try {
      if (tab == std::string::npos) throw std::invalid_argument("tab");
      c = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw Error(ErrorKind::MalformedRecord, path.string() + ":" + std::to_string(line_no) + ": bad count");
    }
    d.add(detail::unescape_token(std::string_view(line).substr(0, tab)), c);
  }
  return d;
}

/// Tokens a record contributes to stats: its reduced form when present.
inline TokenSequence stats_tokens(const CorpusRecord& r) {
  return lex_code(r.reduced_code ? *r.reduced_code : r.code, r.language);
}

struct CorpusTokens {
  TokenDistribution distribution;
  std::map<std::string, std::uint64_t> per_record;  // id -> token count
  std::uint64_t records = 0;
};

inline CorpusTokens collect_tokens(const std::string& path, const PipelineConfig& cfg,
                                   std::vector<detail::Failure>& failures, bool use_original_code) {
  CorpusTokens out;
  if (is_distribution_file(path)) {
    out.distribution = load_distribution(path);
    return out;
  }
  detail::for_each_batch(path, [&](std::vector<CorpusReader::Item>& batch, const std::vector<std::size_t>&) {
    auto lexed = parallel_map(batch.size(), cfg.threads, [&](std::size_t i) -> std::optional<TokenSequence> {
      auto* r = std::get_if<CorpusRecord>(&batch[i]);
      if (!r) return std::nullopt;
      return use_original_code ? lex_code(r->code, r->language) : stats_tokens(*r);
    });
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (auto* r = std::get_if<CorpusRecord>(&batch[i])) {
        out.distribution.add(*lexed[i]);
        out.per_record[r->id] += lexed[i]->size();
        ++out.records;
      } else {
        failures.push_back(detail::failure_from(std::get<RecordError>(batch[i])));
      }
    }
  });
  return out;
}

inline RunResult cmd_stats(const PipelineConfig& cfg) {
  detail::Stopwatch clock;
  detail::require(!cfg.input_path.empty(), "stats needs --input");
  detail::check_distinct({cfg.input_path, cfg.baseline_path}, {cfg.output_path, cfg.report_path});

  RunResult result;
  result.report = detail::report_header(cfg);
  std::vector<detail::Failure> failures;
  const CorpusTokens current = collect_tokens(cfg.input_path, cfg, failures, false);
  if (current.distribution.total == 0) throw Error(ErrorKind::EmptyDistribution, "input has no tokens");
  const EntropyReport entropy = shannon_entropy(current.distribution);
  if (!cfg.output_path.empty()) save_distribution(current.distribution, cfg.output_path);

  result.report["records"] = current.records;
  result.report["tokens"] = detail::entropy_json(current.distribution);
  if (!cfg.baseline_path.empty()) {
    std::vector<detail::Failure> baseline_failures;
    const CorpusTokens baseline = collect_tokens(cfg.baseline_path, cfg, baseline_failures, true);
    if (baseline.distribution.total == 0) throw Error(ErrorKind::EmptyDistribution, "baseline has no tokens");
    const EntropyReport base = shannon_entropy(baseline.distribution);
    result.report["baseline_tokens"] = detail::entropy_json(baseline.distribution);
    result.report["entropy_reduction_pct"] = entropy_reduction(entropy, base);
    // Pooled over records present in both corpora, matched by id.
    RetentionAccumulator retention;
    for (const auto& [id, count] : current.per_record) {
      auto it = baseline.per_record.find(id);
      if (it != baseline.per_record.end()) retention.add(it->second, count);
    }
    result.report["retention"] = retention.input_tokens > 0 ? Json(retention.ratio()) : Json(nullptr);
    result.report["retention_pairs"] = retention.outcomes;
    result.report["baseline_failed"] = baseline_failures.size();
  }
  detail::finish(result, cfg, failures, clock, Json::object());
  return result;
}

// ---- eval -------------------------------------------------------------------

struct Candidate {
  std::string id;
  std::string summary;
  std::size_t line_no = 0;
};

inline std::vector<Candidate> read_candidates(const std::string& path, std::vector<detail::Failure>& failures) {
  std::ifstream in(path, std::ios::binary);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec) || !in) throw Error(ErrorKind::FileNotFound, path);
  std::vector<Candidate> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::blank(line)) continue;
    try {
      const Json j = Json::parse(line);
      out.push_back({j.at("id").get<std::string>(), j.at("summary").get<std::string>(), line_no});
    } catch (const nlohmann::json::exception& e) {
      failures.push_back({line_no, "", ErrorKind::MalformedRecord, e.what()});
    }
  }
  return out;
}

/// Summary tokens that carry a word (drop pure punctuation) for c_coeff.
inline Tokens word_tokens(const Tokens& tokens) {
  Tokens out;
  for (const std::string& t : tokens) {
    for (unsigned char c : t) {
      if (std::isalnum(c) || c >= 0x80) {
        out.push_back(t);
        break;
      }
    }
  }
  return out;
}

inline RunResult cmd_eval(const PipelineConfig& cfg) {
  detail::Stopwatch clock;
  const std::string candidates_path = !cfg.candidates_path.empty() ? cfg.candidates_path : cfg.input_path;
  detail::require(!candidates_path.empty(), "eval needs --candidates");
  detail::require(!cfg.references_path.empty(), "eval needs --references");
  detail::require(!cfg.metrics.empty(), "eval needs at least one metric");
  detail::check_distinct({candidates_path, cfg.references_path}, {cfg.output_path, cfg.report_path});

  RunResult result;
  result.report = detail::report_header(cfg);
  std::vector<detail::Failure> failures;
  const std::vector<Candidate> candidates = read_candidates(candidates_path, failures);
  CorpusContents refs = read_corpus(cfg.references_path);
  for (const RecordError& e : refs.errors) failures.push_back(detail::failure_from(e));
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < refs.records.size(); ++i) by_id.emplace(refs.records[i].id, i);
  std::vector<std::string> missing;
  for (const Candidate& c : candidates) {
    if (!by_id.count(c.id)) missing.push_back(c.id);
  }
  if (!missing.empty()) {
    std::string ids;
    for (const std::string& id : missing) ids += (ids.empty() ? "" : ", ") + id;
    throw Error(ErrorKind::MissingPair, "no reference for candidate id(s): " + ids);
  }

  struct Scored {
    std::map<Metric, double> values;
    std::optional<BleuStats> bleu;
    std::optional<detail::Failure> failure;
  };
  auto scored = parallel_map(candidates.size(), cfg.threads, [&](std::size_t i) {
    Scored out;
    const Candidate& c = candidates[i];
    const CorpusRecord& ref = refs.records[by_id.at(c.id)];
    try {
      const Tokens cand = lex_summary(c.summary).tokens;
      const Tokens reference = lex_summary(ref.summary).tokens;
      for (Metric m : cfg.metrics) {
        switch (m) {
          case Metric::Bleu:
            out.bleu = bleu_stats(cand, {reference});
            out.values[m] = bleu_from_stats(*out.bleu, Smoothing::Epsilon).value;
            break;
          case Metric::RougeL: out.values[m] = rouge_l(cand, reference).value; break;
          case Metric::Meteor: out.values[m] = meteor(cand, reference).value; break;
          case Metric::ChrF: out.values[m] = chrf(c.summary, ref.summary).value; break;
          case Metric::CCoeff:
            out.values[m] = c_coeff(word_tokens(cand), lex_code(ref.code, ref.language).tokens).value;
            break;
        }
      }
    } catch (const Error& e) {
      out.failure = detail::Failure{c.line_no, c.id, e.kind(), e.what()};
    }
    return out;
  });

  std::optional<std::ofstream> rows;
  if (!cfg.output_path.empty()) {
    rows.emplace(cfg.output_path, std::ios::binary | std::ios::trunc);
    if (!*rows) throw Error(ErrorKind::IoFailure, "cannot open " + cfg.output_path + " for writing");
  }
  BleuStats pooled;
  std::map<Metric, std::vector<double>> columns;
  std::uint64_t scored_count = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    Scored& s = scored[i];
    if (s.failure) {
      failures.push_back(std::move(*s.failure));
      continue;
    }
    ++scored_count;
    if (s.bleu) pooled.merge(*s.bleu);
    Json row = Json::object();
    row["id"] = candidates[i].id;
    for (Metric m : cfg.metrics) {
      row[std::string(to_string(m))] = s.values.at(m);
      columns[m].push_back(s.values.at(m));
    }
    if (rows) *rows << row.dump() << '\n';
  }
  if (rows) {
    rows->flush();
    if (!*rows) throw Error(ErrorKind::IoFailure, "write failed on " + cfg.output_path);
  }

  Json corpus = Json::object();
  Json means = Json::object();
  for (Metric m : cfg.metrics) {
    const std::string key(to_string(m));
    const auto& col = columns[m];
    if (col.empty()) {
      means[key] = nullptr;
      corpus[key] = nullptr;
      continue;
    }
    std::vector<double> sorted = col;
    const double mean = detail::pairwise_sum(sorted.data(), sorted.size()) / static_cast<double>(sorted.size());
    means[key] = mean;
    corpus[key] = m == Metric::Bleu ? bleu_from_stats(pooled).value : mean;
  }
  result.report["candidates"] = candidates.size();
  result.report["scored"] = scored_count;
  result.report["corpus"] = corpus;
  result.report["sentence_mean"] = means;
  detail::finish(result, cfg, failures, clock, Json::object());
  return result;
}

// ---- compare ----------------------------------------------------------------

struct ScoreTable {
  std::vector<std::string> ids;
  std::vector<std::string> columns;
  std::unordered_map<std::string, std::map<std::string, double>> rows;
};

inline ScoreTable read_scores(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec) || !in) throw Error(ErrorKind::FileNotFound, path);
  ScoreTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::blank(line)) continue;
    try {
      const Json j = Json::parse(line);
      const std::string id = j.at("id").get<std::string>();
      if (t.rows.count(id)) throw Error(ErrorKind::MalformedRecord, path + ": duplicate id '" + id + "'");
      std::map<std::string, double> row;
      for (const auto& [key, value] : j.items()) {
        if (key == "id" || !value.is_number()) continue;
        row[key] = value.get<double>();
        if (t.ids.empty() && std::find(t.columns.begin(), t.columns.end(), key) == t.columns.end()) {
          t.columns.push_back(key);
        }
      }
      t.ids.push_back(id);
      t.rows.emplace(id, std::move(row));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::MalformedRecord, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return t;
}

inline RunResult cmd_compare(const PipelineConfig& cfg) {
  detail::Stopwatch clock;
  detail::require(!cfg.baseline_path.empty(), "compare needs --baseline");
  detail::require(!cfg.systems.empty(), "compare needs at least one --system NAME=PATH");
  detail::require(cfg.alpha > 0.0 && cfg.alpha < 1.0, "--alpha must be in (0,1)");
  std::vector<std::string> reads{cfg.baseline_path};
  for (const auto& [name, path] : cfg.systems) reads.push_back(path);
  detail::check_distinct(reads, {cfg.output_path, cfg.report_path});

  RunResult result;
  result.report = detail::report_header(cfg);
  const ScoreTable baseline = read_scores(cfg.baseline_path);
  std::vector<PairedMetricSamples> family;
  for (const auto& [name, path] : cfg.systems) {
    const ScoreTable system = read_scores(path);
    std::vector<std::string> missing;
    for (const std::string& id : baseline.ids) {
      if (!system.rows.count(id)) missing.push_back(id);
    }
    for (const std::string& id : system.ids) {
      if (!baseline.rows.count(id)) missing.push_back(id);
    }
    if (!missing.empty()) {
      std::string ids;
      for (const std::string& id : missing) ids += (ids.empty() ? "" : ", ") + id;
      throw Error(ErrorKind::MissingPair, "system '" + name + "' and baseline disagree on id(s): " + ids);
    }
    for (Metric m : cfg.metrics) {
      const std::string key(to_string(m));
      if (std::find(baseline.columns.begin(), baseline.columns.end(), key) == baseline.columns.end()) continue;
      PairedMetricSamples s;
      s.comparison_id = name;
      s.metric = key;
      for (const std::string& id : baseline.ids) {
        const auto& brow = baseline.rows.at(id);
        const auto& srow = system.rows.at(id);
        auto bi = brow.find(key);
        auto si = srow.find(key);
        if (bi == brow.end() || si == srow.end()) {
          throw Error(ErrorKind::MissingPair, "record '" + id + "' has no " + key + " score");
        }
        s.baseline.push_back(bi->second);
        s.system.push_back(si->second);
      }
      family.push_back(std::move(s));
    }
  }
  detail::require(!family.empty(), "no metric shared by --metrics and the score files");
  const std::vector<TestReport> reports = compare_systems(family, cfg.alpha, cfg.correction);
  const std::string table = render_comparison_table(reports);
  if (!cfg.output_path.empty()) {
    std::ofstream out(cfg.output_path, std::ios::binary | std::ios::trunc);
    out << table;
    if (!out) throw Error(ErrorKind::IoFailure, "write failed on " + cfg.output_path);
  }
  Json rows = Json::array();
  for (const TestReport& r : reports) {
    Json row = Json::object();
    row["comparison_id"] = r.comparison_id;
    row["metric"] = r.metric;
    row["raw_p"] = r.raw_p;
    row["adjusted_p"] = r.adjusted_p;
    row["display_p"] = r.significant ? format_p(r.adjusted_p) : std::string("x");
    row["delta"] = r.effect.delta;
    row["magnitude"] = std::string(to_string(r.effect.magnitude));
    row["n_pairs"] = r.n_pairs;
    row["significant"] = r.significant;
    rows.push_back(row);
  }
  result.report["family_size"] = reports.size();
  result.report["comparisons"] = rows;
  detail::finish(result, cfg, {}, clock, Json::object());
  return result;
}

// ---- dispatch ---------------------------------------------------------------

/// Runs one subcommand. Fatal errors become a report with an "error" entry
/// and the matching exit code, so callers always get a report.
inline RunResult run_command(const PipelineConfig& cfg) {
  try {
    if (cfg.command == "reduce") return cmd_reduce(cfg);
    if (cfg.command == "filter") return cmd_filter(cfg);
    if (cfg.command == "stats") return cmd_stats(cfg);
    if (cfg.command == "eval") return cmd_eval(cfg);
    if (cfg.command == "compare") return cmd_compare(cfg);
    if (cfg.command == "mine-ngrams") return cmd_mine_ngrams(cfg);
    throw Error(ErrorKind::ConfigError, "unknown command '" + cfg.command + "'");
  } catch (const Error& e) {
    RunResult r;
    r.report = detail::report_header(cfg);
    Json err = Json::object();
    err["kind"] = std::string(to_string(e.kind()));
    err["message"] = e.what();
    r.report["error"] = err;
    r.exit_code = detail::exit_code_for(e.kind());
    return r;
  }
}

/// Report text with a trailing newline; key order is fixed by construction.
inline std::string render_report(const Json& report) { return report.dump(2) + "\n"; }

/// The report minus its "runtime" block, for byte-level determinism checks.
inline std::string deterministic_report(Json report) {
  report.erase("runtime");
  return report.dump();
}

}  // namespace codesum
