#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "codesum/pipeline.hpp"

namespace {

using codesum::Error;
using codesum::ErrorKind;
using codesum::Json;
using codesum::PipelineConfig;

struct Flags {
  std::string config_path;
  std::string input, output, report, language, strategy, ban_list, train;
  std::size_t k = 0;
  int max_n = 0;
  double side_threshold = 0.0;
  bool benchmark_filter = false;
  std::size_t min_code = 0, max_code = 0, min_summary = 0;
  bool no_first_sentence = false;
  std::string metrics;
  double alpha = 0.0;
  std::string correction;
  std::string baseline, candidates, references;
  std::vector<std::string> systems;
  std::uint64_t max_failures = 0;
  bool keep_empty = false;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// Each registered flag knows how to copy itself into a config when given.
struct Binding {
  CLI::Option* option;
  std::function<void(PipelineConfig&)> apply;
};

void add_flags(CLI::App* sub, Flags& f, std::vector<Binding>& bindings) {
  auto bind = [&](CLI::Option* opt, std::function<void(PipelineConfig&)> apply) {
    bindings.push_back({opt, std::move(apply)});
  };
  sub->add_option("--config", f.config_path, "JSON config, or a previous run report to replay");
  bind(sub->add_option("--input", f.input, "input corpus (JSONL)"), [&](auto& c) { c.input_path = f.input; });
  bind(sub->add_option("--output", f.output, "output path"), [&](auto& c) { c.output_path = f.output; });
  bind(sub->add_option("--report", f.report, "report path (default: stdout)"),
       [&](auto& c) { c.report_path = f.report; });
  bind(sub->add_option("--language", f.language, "java|python")->check(CLI::IsMember({"java", "python"})),
       [&](auto& c) { c.language = codesum::parse_language(f.language); });
  bind(sub->add_option("--strategy", f.strategy, "ast|signature|crystalbleu|none")
           ->check(CLI::IsMember({"ast", "signature", "crystalbleu", "none"})),
       [&](auto& c) {
         c.strategy = f.strategy == "none" ? std::nullopt : codesum::parse_strategy(f.strategy);
       });
  bind(sub->add_option("--ban-list", f.ban_list, "n-gram ban list file"),
       [&](auto& c) { c.ban_list_path = f.ban_list; });
  bind(sub->add_option("--train", f.train, "training corpus to mine a ban list from"),
       [&](auto& c) { c.train_path = f.train; });
  bind(sub->add_option("--k", f.k, "ban-list budget per n-gram order (500)")->check(CLI::PositiveNumber),
       [&](auto& c) { c.k = f.k; });
  bind(sub->add_option("--max-n", f.max_n, "largest n-gram order (4)")->check(CLI::Range(1, 4)),
       [&](auto& c) { c.max_n = f.max_n; });
  bind(sub->add_option("--side-threshold", f.side_threshold, "keep records with side_score >= T")
           ->check(CLI::Range(0.0, 1.0)),
       [&](auto& c) { c.side_threshold = f.side_threshold; });
  bind(sub->add_flag("--benchmark-filter", f.benchmark_filter, "apply the benchmark length filter"),
       [&](auto& c) { c.benchmark_filter = f.benchmark_filter; });
  bind(sub->add_option("--min-code-tokens", f.min_code, "(20)"),
       [&](auto& c) { c.filter.min_code_tokens = f.min_code; });
  bind(sub->add_option("--max-code-tokens", f.max_code, "(200)"),
       [&](auto& c) { c.filter.max_code_tokens = f.max_code; });
  bind(sub->add_option("--min-summary-tokens", f.min_summary, "summaries must be longer than this (3)"),
       [&](auto& c) { c.filter.min_summary_tokens = f.min_summary; });
  bind(sub->add_flag("--no-first-sentence", f.no_first_sentence, "keep whole summaries in the benchmark filter"),
       [&](auto& c) { c.filter.apply_first_sentence = !f.no_first_sentence; });
  bind(sub->add_option("--metrics", f.metrics, "CSV of bleu,rouge-l,meteor,chrf,c-coeff"), [&](auto& c) {
    c.metrics.clear();
    std::stringstream ss(f.metrics);
    std::string name;
    while (std::getline(ss, name, ',')) {
      auto m = codesum::parse_metric(name);
      if (!m) throw Error(ErrorKind::ConfigError, "unknown metric '" + name + "'");
      c.metrics.push_back(*m);
    }
  });
  bind(sub->add_option("--alpha", f.alpha, "significance level (0.05)"), [&](auto& c) { c.alpha = f.alpha; });
  bind(sub->add_option("--correction", f.correction, "holm|none")->check(CLI::IsMember({"holm", "none"})),
       [&](auto& c) {
         c.correction = f.correction == "holm" ? codesum::Correction::Holm : codesum::Correction::None;
       });
  bind(sub->add_option("--baseline", f.baseline, "baseline corpus (stats) or score file (compare)"),
       [&](auto& c) { c.baseline_path = f.baseline; });
  bind(sub->add_option("--candidates", f.candidates, "JSONL of {id, summary}"),
       [&](auto& c) { c.candidates_path = f.candidates; });
  bind(sub->add_option("--references", f.references, "reference corpus"),
       [&](auto& c) { c.references_path = f.references; });
  bind(sub->add_option("--system", f.systems, "NAME=PATH score file; repeatable"), [&](auto& c) {
    c.systems.clear();
    for (const std::string& s : f.systems) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::ConfigError, "--system expects NAME=PATH");
      c.systems.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
  });
  bind(sub->add_option("--max-failures", f.max_failures, "exit 3 when more records than this fail"),
       [&](auto& c) { c.max_failures = f.max_failures; });
  bind(sub->add_flag("--keep-empty", f.keep_empty, "keep records that crystalbleu reduces to nothing"),
       [&](auto& c) { c.keep_empty = f.keep_empty; });
  bind(sub->add_option("--seed", f.seed, "reserved"), [&](auto& c) { c.seed = f.seed; });
  sub->add_option("--threads", f.threads, "worker threads (1)")->check(CLI::Range(1u, 256u));
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileNotFound, path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, path + ": " + e.what());
  }
  if (j.is_object() && j.contains("config") && j.at("config").is_object()) j = j.at("config");
  return codesum::config_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Token-reduction and evaluation pipeline for code summarization corpora"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(codesum::kToolVersion));

  Flags flags;
  std::vector<std::pair<CLI::App*, std::vector<Binding>>> subs;
  const std::pair<const char*, const char*> commands[] = {
      {"reduce", "apply a token-reduction strategy to every record"},
      {"filter", "drop records by side score and/or benchmark length bounds"},
      {"stats", "token distribution, entropy and retention"},
      {"eval", "score candidate summaries against references"},
      {"compare", "paired significance tests between score files"},
      {"mine-ngrams", "mine the n-gram ban list from a training corpus"},
  };
  subs.reserve(std::size(commands));
  for (const auto& [name, help] : commands) {
    subs.emplace_back(app.add_subcommand(name, help), std::vector<Binding>{});
    add_flags(subs.back().first, flags, subs.back().second);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(codesum::ExitCode::ConfigError);
  }

  PipelineConfig cfg;
  try {
    for (auto& [sub, bindings] : subs) {
      if (!sub->parsed()) continue;
      if (!flags.config_path.empty()) cfg = load_config(flags.config_path);
      cfg.command = sub->get_name();
      for (const Binding& b : bindings) {
        if (b.option->count() > 0) b.apply(cfg);
      }
    }
    cfg.threads = flags.threads;
  } catch (const Error& e) {
    std::cerr << "codesum: " << e.what() << '\n';
    return static_cast<int>(e.kind() == ErrorKind::FileNotFound ? codesum::ExitCode::IoError
                                                                  : codesum::ExitCode::ConfigError);
  }

  const codesum::RunResult result = codesum::run_command(cfg);
  const std::string text = codesum::render_report(result.report);
  if (cfg.report_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.report_path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) {
      std::cerr << "codesum: cannot write report " << cfg.report_path << '\n';
      return static_cast<int>(codesum::ExitCode::IoError);
    }
  }
  if (result.report.contains("error")) {
    std::cerr << "codesum: " << result.report["error"]["message"].get<std::string>() << '\n';
  } else if (result.failures > 0) {
    std::cerr << "codesum: " << result.failures << " record(s) failed; see report\n";
  }
  return static_cast<int>(result.exit_code);
}
