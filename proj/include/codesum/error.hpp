#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace codesum {

enum class ErrorKind {
  FileNotFound,
  MalformedRecord,
  InvalidFieldValue,
  IoFailure,
  SerializationFailure,
  EmptyCorpus,
  NoDeclarationFound,
  ParseFailure,
  MissingScore,
  EmptyDistribution,
  ZeroBaseline,
  EmptyStream,
  ZeroInputTokens,
  EmptyCandidate,
  EmptyReferences,
  EmptyInput,
  EmptySummary,
  LengthMismatch,
  OutOfRangeP,
  MissingPair,
  InvalidArgument,
  ConfigError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::InvalidFieldValue: return "InvalidFieldValue";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::SerializationFailure: return "SerializationFailure";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::NoDeclarationFound: return "NoDeclarationFound";
    case ErrorKind::ParseFailure: return "ParseFailure";
    case ErrorKind::MissingScore: return "MissingScore";
    case ErrorKind::EmptyDistribution: return "EmptyDistribution";
    case ErrorKind::ZeroBaseline: return "ZeroBaseline";
    case ErrorKind::EmptyStream: return "EmptyStream";
    case ErrorKind::ZeroInputTokens: return "ZeroInputTokens";
    case ErrorKind::EmptyCandidate: return "EmptyCandidate";
    case ErrorKind::EmptyReferences: return "EmptyReferences";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EmptySummary: return "EmptySummary";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::OutOfRangeP: return "OutOfRangeP";
    case ErrorKind::MissingPair: return "MissingPair";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a kind so callers (and the
/// CLI's exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Syntax error from one of the language parsers; `position` is a byte offset
/// into the parsed source.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error(ErrorKind::ParseFailure,
              "at byte " + std::to_string(position) + ": " + message),
        position_(position),
        detail_(message) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t position_;
  std::string detail_;
};

}  // namespace codesum
