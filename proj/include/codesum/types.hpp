#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace codesum {

enum class Language { Java, Python };

enum class Strategy { Original, Ast, Signature, CrystalBleu };

inline std::string_view to_string(Language language) {
  return language == Language::Java ? "java" : "python";
}

inline std::optional<Language> parse_language(std::string_view text) {
  if (text == "java") return Language::Java;
  if (text == "python") return Language::Python;
  return std::nullopt;
}

inline std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::Original: return "original";
    case Strategy::Ast: return "ast";
    case Strategy::Signature: return "signature";
    case Strategy::CrystalBleu: return "crystalbleu";
  }
  return "original";
}

inline std::optional<Strategy> parse_strategy(std::string_view text) {
  if (text == "original") return Strategy::Original;
  if (text == "ast") return Strategy::Ast;
  if (text == "signature") return Strategy::Signature;
  if (text == "crystalbleu") return Strategy::CrystalBleu;
  return std::nullopt;
}

}  // namespace codesum
