#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "codesum/error.hpp"
#include "codesum/lexer.hpp"
#include "codesum/types.hpp"
#include "codesum/utf8.hpp"

namespace codesum {

using Json = nlohmann::ordered_json;

/// One <code, summary> instance. Fields outside the known schema are kept in
/// `extra` (in file order) and written back verbatim.
struct CorpusRecord {
  std::string id;
  Language language = Language::Java;
  std::string code;
  std::string summary;
  std::optional<double> side_score;
  std::optional<std::string> reduced_code;
  std::optional<Strategy> strategy;
  Json extra = Json::object();

  bool operator==(const CorpusRecord&) const = default;
};

struct CorpusStats {
  std::uint64_t record_count = 0;
  std::uint64_t total_code_tokens = 0;
  std::uint64_t total_summary_tokens = 0;

  void add(const CorpusRecord& r) {
    ++record_count;
    total_code_tokens += lex_code(r.code, r.language).size();
    total_summary_tokens += lex_summary(r.summary).size();
  }

  bool operator==(const CorpusStats&) const = default;
};

/// Per-line failure from read_corpus. The stream continues past it.
struct RecordError {
  ErrorKind kind = ErrorKind::MalformedRecord;
  std::size_t line_no = 0;  // 1-based
  std::string field;        // set for InvalidFieldValue
  std::string reason;

  std::string message() const {
    std::string m = std::string(to_string(kind)) + " at line " + std::to_string(line_no);
    if (!field.empty()) m += " (field '" + field + "')";
    return m + ": " + reason;
  }
};

namespace detail {

inline bool blank(std::string_view s) {
  for (char c : s) {
    if (!is_space(c)) return false;
  }
  return true;
}

}  // namespace detail

/// Checks the record invariants; returns the offending field and reason.
inline std::optional<std::pair<std::string, std::string>> validate(const CorpusRecord& r) {
  if (detail::blank(r.code)) return std::pair<std::string, std::string>{"code", "code is empty"};
  if (r.side_score && !(*r.side_score >= 0.0 && *r.side_score <= 1.0)) {
    return std::pair<std::string, std::string>{"side_score", "side_score outside [0,1]"};
  }
  if (r.reduced_code.has_value() != r.strategy.has_value()) {
    return std::pair<std::string, std::string>{
        r.strategy ? "reduced_code" : "strategy", "strategy and reduced_code must appear together"};
  }
  return std::nullopt;
}

inline Json to_json(const CorpusRecord& r) {
  Json j = Json::object();
  j["id"] = r.id;
  j["language"] = std::string(to_string(r.language));
  j["code"] = r.code;
  j["summary"] = r.summary;
  if (r.side_score) j["side_score"] = *r.side_score;
  if (r.reduced_code) j["reduced_code"] = *r.reduced_code;
  if (r.strategy) j["strategy"] = std::string(to_string(*r.strategy));
  for (const auto& [key, value] : r.extra.items()) j[key] = value;
  return j;
}

/// One serialized line without the trailing LF. Newlines inside fields are
/// escaped by the JSON encoding.
inline std::string serialize_record(const CorpusRecord& r) {
  if (auto bad = validate(r)) {
    throw Error(ErrorKind::SerializationFailure, "record '" + r.id + "': " + bad->second);
  }
  try {
    return to_json(r).dump();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SerializationFailure, "record '" + r.id + "': " + e.what());
  }
}

inline std::variant<CorpusRecord, RecordError> parse_record(std::string_view line, std::size_t line_no) {
  auto malformed = [&](std::string reason) {
    return RecordError{ErrorKind::MalformedRecord, line_no, {}, std::move(reason)};
  };
  auto invalid = [&](std::string field, std::string reason) {
    return RecordError{ErrorKind::InvalidFieldValue, line_no, std::move(field), std::move(reason)};
  };
  if (const std::size_t bad = utf8::first_invalid(line); bad != std::string_view::npos) {
    return malformed("invalid UTF-8 at byte " + std::to_string(bad));
  }
  Json j;
  try {
    j = Json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    return malformed(e.what());
  }
  if (!j.is_object()) return malformed("line is not a JSON object");

  CorpusRecord r;
  auto required_string = [&](const char* key, std::string& into) -> std::optional<RecordError> {
    auto it = j.find(key);
    if (it == j.end()) return malformed(std::string("missing field '") + key + "'");
    if (!it->is_string()) return invalid(key, "expected a string");
    into = it->get<std::string>();
    return std::nullopt;
  };
  if (auto e = required_string("id", r.id)) return *e;
  std::string language;
  if (auto e = required_string("language", language)) return *e;
  auto lang = parse_language(language);
  if (!lang) return invalid("language", "expected \"java\" or \"python\", got \"" + language + "\"");
  r.language = *lang;
  if (auto e = required_string("code", r.code)) return *e;
  if (auto e = required_string("summary", r.summary)) return *e;

  if (auto it = j.find("side_score"); it != j.end() && !it->is_null()) {
    if (!it->is_number()) return invalid("side_score", "expected a number");
    r.side_score = it->get<double>();
  }
  if (auto it = j.find("reduced_code"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) return invalid("reduced_code", "expected a string");
    r.reduced_code = it->get<std::string>();
  }
  if (auto it = j.find("strategy"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) return invalid("strategy", "expected a string");
    auto s = parse_strategy(it->get<std::string>());
    if (!s) return invalid("strategy", "unknown strategy \"" + it->get<std::string>() + "\"");
    r.strategy = *s;
  }
  static constexpr std::string_view kKnown[] = {"id", "language", "code", "summary",
                                                "side_score", "reduced_code", "strategy"};
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (std::string_view k : kKnown) known = known || key == k;
    if (!known) r.extra[key] = value;
  }
  if (auto bad = validate(r)) return invalid(bad->first, bad->second);
  return r;
}

/// Streaming reader: one record (or per-line error) per call, in file order.
/// Blank lines are skipped. Memory use is bounded by the longest line.
class CorpusReader {
 public:
  using Item = std::variant<CorpusRecord, RecordError>;

  explicit CorpusReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
      throw Error(ErrorKind::FileNotFound, path.string());
    }
    if (!in_) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  }

  std::optional<Item> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (detail::blank(line)) continue;
      return parse_record(line, line_no_);
    }
    if (in_.bad()) throw Error(ErrorKind::IoFailure, "read failed on " + path_.string());
    return std::nullopt;
  }

  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

/// Reads a whole file, splitting records from per-line errors.
struct CorpusContents {
  std::vector<CorpusRecord> records;
  std::vector<RecordError> errors;
};

inline CorpusContents read_corpus(const std::filesystem::path& path) {
  CorpusContents out;
  CorpusReader reader(path);
  while (auto item = reader.next()) {
    if (auto* r = std::get_if<CorpusRecord>(&*item)) {
      out.records.push_back(std::move(*r));
    } else {
      out.errors.push_back(std::get<RecordError>(std::move(*item)));
    }
  }
  return out;
}

/// Line-at-a-time writer; stats accumulate over written records.
class CorpusWriter {
 public:
  explicit CorpusWriter(const std::filesystem::path& path) : path_(path) {
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  }

  void write(const CorpusRecord& r) {
    const std::string line = serialize_record(r);
    out_ << line << '\n';
    if (!out_) throw Error(ErrorKind::IoFailure, "write failed on " + path_.string());
    stats_.add(r);
  }

  CorpusStats close() {
    out_.flush();
    if (!out_) throw Error(ErrorKind::IoFailure, "flush failed on " + path_.string());
    out_.close();
    return stats_;
  }

  const CorpusStats& stats() const noexcept { return stats_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  CorpusStats stats_;
};

inline CorpusStats write_corpus(const std::vector<CorpusRecord>& records, const std::filesystem::path& path) {
  CorpusWriter writer(path);
  for (const CorpusRecord& r : records) writer.write(r);
  return writer.close();
}

}  // namespace codesum
