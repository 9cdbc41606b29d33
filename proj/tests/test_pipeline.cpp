#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "codesum/pipeline.hpp"
#include "support.hpp"

using namespace codesum;
namespace ct = codesum::testing;

namespace {

CorpusRecord rec(const std::string& id, const std::string& code, const std::string& summary,
                 Language lang = Language::Java, std::optional<double> score = std::nullopt) {
  CorpusRecord r;
  r.id = id;
  r.language = lang;
  r.code = code;
  r.summary = summary;
  r.side_score = score;
  return r;
}

PipelineConfig command(const std::string& name) {
  PipelineConfig c;
  c.command = name;
  return c;
}

std::vector<CorpusRecord> load(const std::string& path) {
  CorpusContents c = read_corpus(path);
  EXPECT_TRUE(c.errors.empty());
  return c.records;
}

std::string tokens(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += "v" + std::to_string(i) + " ";
  return s;
}

void write_scores(const std::string& path, const std::vector<double>& bleu) {
  std::string text;
  for (std::size_t i = 0; i < bleu.size(); ++i) {
    Json row = Json::object();
    row["id"] = "r" + std::to_string(i);
    row["bleu"] = bleu[i];
    text += row.dump() + "\n";
  }
  ct::write_text(path, text);
}

double naive_entropy(const std::map<std::string, std::uint64_t>& counts) {
  double total = 0;
  for (const auto& [t, c] : counts) total += static_cast<double>(c);
  double h = 0;
  for (const auto& [t, c] : counts) {
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

void write_distribution(const std::string& path, const std::map<std::string, std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (const auto& [t, c] : counts) total += c;
  std::string text = "#codesum-distribution\ttotal=" + std::to_string(total) + "\n";
  for (const auto& [t, c] : counts) text += t + "\t" + std::to_string(c) + "\n";
  ct::write_text(path, text);
}

}  // namespace

TEST(Reduce, NoneIsIdentity) {
  ct::TempDir dir("none");
  const auto corpus = ct::synthetic_corpus(40, 3, 0.3);
  write_corpus(corpus, dir.file("in.jsonl"));
  PipelineConfig c = command("reduce");
  c.input_path = dir.file("in.jsonl");
  c.output_path = dir.file("out.jsonl");
  const RunResult r = run_command(c);
  ASSERT_EQ(r.exit_code, ExitCode::Ok) << r.report.dump();
  EXPECT_EQ(r.report["retention"].get<double>(), 1.0);
  EXPECT_EQ(r.report["entropy_reduction_pct"].get<double>(), 0.0);
  EXPECT_EQ(r.report["counts"]["output"], 40);
  EXPECT_EQ(load(dir.file("out.jsonl")), corpus);
}

TEST(Reduce, SignatureWritesHeaders) {
  ct::TempDir dir("sig");
  write_corpus({rec("a", "public int size() { return n; }", "Returns the size."),
                rec("b", "static <T> List<T> wrap(T x, int... rest) { return List.of(x); }", "Wraps it."),
                rec("c", "def area(self, w, h):\n    return w * h\n", "Computes area.", Language::Python)},
               dir.file("in.jsonl"));
  PipelineConfig c = command("reduce");
  c.input_path = dir.file("in.jsonl");
  c.output_path = dir.file("out.jsonl");
  c.strategy = Strategy::Signature;
  const RunResult r = run_command(c);
  ASSERT_EQ(r.exit_code, ExitCode::Ok) << r.report.dump();
  const auto out = load(dir.file("out.jsonl"));
  ASSERT_EQ(out.size(), 3u);
  const std::vector<std::vector<std::string>> headers = {
      {"public", "int", "size", "(", ")"},
      {"static", "<", "T", ">", "List", "<", "T", ">", "wrap", "(", "T", "x", ",", "int", "...", "rest", ")"},
      {"def", "area", "(", "self", ",", "w", ",", "h", ")", ":"}};
  for (std::size_t i = 0; i < 3; ++i) {
    ASSERT_TRUE(out[i].reduced_code.has_value());
    EXPECT_EQ(*out[i].reduced_code, join_code_tokens(headers[i], out[i].language)) << out[i].id;
    EXPECT_EQ(lex_code(*out[i].reduced_code, out[i].language).tokens, headers[i]);
    EXPECT_EQ(out[i].strategy, Strategy::Signature);
  }
  EXPECT_EQ(r.report["tokens_after"]["total_tokens"], 5 + 17 + 10);
}

TEST(Reduce, CascadeAfterSideFilter) {
  ct::TempDir dir("cascade");
  const auto corpus = ct::synthetic_corpus(120, 17);
  write_corpus(corpus, dir.file("in.jsonl"));
  PipelineConfig f = command("filter");
  f.input_path = dir.file("in.jsonl");
  f.output_path = dir.file("kept.jsonl");
  f.side_threshold = 0.9;
  const RunResult fr = run_command(f);
  ASSERT_EQ(fr.exit_code, ExitCode::Ok) << fr.report.dump();
  const auto expected = static_cast<std::size_t>(
      std::count_if(corpus.begin(), corpus.end(), [](const CorpusRecord& r) { return *r.side_score >= 0.9; }));
  EXPECT_EQ(fr.report["counts"]["output"], expected);

  PipelineConfig c = command("reduce");
  c.input_path = dir.file("kept.jsonl");
  c.output_path = dir.file("out.jsonl");
  c.strategy = Strategy::Ast;
  const RunResult rr = run_command(c);
  ASSERT_EQ(rr.exit_code, ExitCode::Ok) << rr.report.dump();
  EXPECT_EQ(rr.report["counts"]["input"], expected);
  for (const auto& r : load(dir.file("out.jsonl"))) {
    EXPECT_GE(*r.side_score, 0.9);
    EXPECT_EQ(r.strategy, Strategy::Ast);
  }
}

TEST(Reduce, CrystalBleuEmptyRecordsDroppedUnlessKept) {
  ct::TempDir dir("empty");
  write_corpus({rec("a", "return x ;", "Returns x now."), rec("b", "return y ; z", "Returns y now.")},
               dir.file("in.jsonl"));
  NgramBanList ban;
  ban.max_n = 1;
  ban.k = 3;
  ban.entries = {{{"return"}, 2}, {{";"}, 2}, {{"x"}, 1}};
  ban.source_fingerprint = "0000000000000000";
  save_ban_list(ban, dir.file("ban.txt"));
  PipelineConfig c = command("reduce");
  c.input_path = dir.file("in.jsonl");
  c.output_path = dir.file("out.jsonl");
  c.strategy = Strategy::CrystalBleu;
  c.ban_list_path = dir.file("ban.txt");
  RunResult r = run_command(c);
  ASSERT_EQ(r.exit_code, ExitCode::Ok) << r.report.dump();
  EXPECT_EQ(r.report["counts"]["filtered"], 1);
  EXPECT_EQ(r.report["counts"]["output"], 1);
  c.keep_empty = true;
  r = run_command(c);
  EXPECT_EQ(r.report["counts"]["output"], 2);
  const auto out = load(dir.file("out.jsonl"));
  EXPECT_EQ(*out[0].reduced_code, "");
}

TEST(Reduce, CrashIsolation) {
  ct::TempDir dir("crash");
  std::string text;
  text += serialize_record(rec("good1", "int f() { return 1; }", "One.")) + "\n";
  text += "{not json\n";
  text += serialize_record(rec("broken", "int f( {", "Broken.")) + "\n";
  text += serialize_record(rec("good2", "int g() { return 2; }", "Two.")) + "\n";
  ct::write_text(dir.file("in.jsonl"), text);
  PipelineConfig c = command("reduce");
  c.input_path = dir.file("in.jsonl");
  c.output_path = dir.file("out.jsonl");
  c.strategy = Strategy::Ast;
  RunResult r = run_command(c);
  ASSERT_EQ(r.exit_code, ExitCode::Ok) << r.report.dump();
  const Json& counts = r.report["counts"];
  EXPECT_EQ(counts["input"], 4);
  EXPECT_EQ(counts["output"], 2);
  EXPECT_EQ(counts["failed"], 2);
  EXPECT_EQ(counts["input"].get<int>(),
            counts["output"].get<int>() + counts["filtered"].get<int>() + counts["failed"].get<int>());
  const Json& failures = r.report["failures"];
  ASSERT_EQ(failures.size(), 2u);
  EXPECT_EQ(failures[0]["line"], 2);
  EXPECT_EQ(failures[0]["kind"], "MalformedRecord");
  EXPECT_EQ(failures[1]["line"], 3);
  EXPECT_EQ(failures[1]["id"], "broken");
  EXPECT_EQ(failures[1]["kind"], "ParseFailure");
  EXPECT_EQ(r.failures, 2u);

  c.max_failures = 1;
  EXPECT_EQ(run_command(c).exit_code, ExitCode::TooManyFailures);
  c.max_failures = 2;
  EXPECT_EQ(run_command(c).exit_code, ExitCode::Ok);
  c.max_failures = 0;
  EXPECT_EQ(run_command(c).exit_code, ExitCode::TooManyFailures);
}

TEST(Reduce, LanguageMismatchIsAFailure) {
  ct::TempDir dir("lang");
  write_corpus({rec("j", "int f() { return 1; }", "One."), rec("p", "x = 1\n", "Py.", Language::Python)},
               dir.file("in.jsonl"));
  PipelineConfig c = command("reduce");
  c.input_path = dir.file("in.jsonl");
  c.output_path = dir.file("out.jsonl");
  c.language = Language::Java;
  const RunResult r = run_command(c);
  EXPECT_EQ(r.report["counts"]["output"], 1);
  ASSERT_EQ(r.report["failures"].size(), 1u);
  EXPECT_EQ(r.report["failures"][0]["id"], "p");
  EXPECT_EQ(r.report["failures"][0]["line"], 2);
}

TEST(Reduce, ThreadCountDoesNotChangeOutput) {
  ct::TempDir dir("threads");
  write_corpus(ct::synthetic_corpus(300, 5, 0.4), dir.file("in.jsonl"));
  std::vector<std::string> outputs, reports;
  for (unsigned threads : {1u, 4u}) {
    PipelineConfig c = command("reduce");
    c.input_path = dir.file("in.jsonl");
    c.output_path = dir.file("out" + std::to_string(threads) + ".jsonl");
    c.strategy = Strategy::CrystalBleu;
    c.train_path = dir.file("in.jsonl");
    c.k = 50;
    c.threads = threads;
    const RunResult r = run_command(c);
    ASSERT_EQ(r.exit_code, ExitCode::Ok) << r.report.dump();
    outputs.push_back(ct::slurp(c.output_path));
    Json rep = r.report;
    rep["config"].erase("output");
    reports.push_back(deterministic_report(rep));
  }
  EXPECT_EQ(outputs[0], outputs[1]);
  EXPECT_EQ(reports[0], reports[1]);
}

TEST(Filter, SideThresholdCounts) {
  ct::TempDir dir("side");
  write_corpus({rec("a", "x", "s", Language::Java, 0.95), rec("b", "x", "s", Language::Java, 0.9),
                rec("c", "x", "s", Language::Java, 0.85), rec("d", "x", "s", Language::Java, 0.5)},
               dir.file("in.jsonl"));
  PipelineConfig c = command("filter");
  c.input_path = dir.file("in.jsonl");
  c.output_path = dir.file("out.jsonl");
  c.side_threshold = 0.9;
  const RunResult r = run_command(c);
  ASSERT_EQ(r.exit_code, ExitCode::Ok) << r.report.dump();
  EXPECT_EQ(r.report["counts"]["output"], 2);
  EXPECT_EQ(r.report["counts"]["filtered_side"], 2);
  EXPECT_EQ(r.report["identity"], false);
  const auto out = load(dir.file("out.jsonl"));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].id, "a");
  EXPECT_EQ(out[1].id, "b");
}

TEST(Filter, MissingScoreIsARecordFailure) {
  ct::TempDir dir("noscore");
  write_corpus({rec("a", "x", "s", Language::Java, 0.95), rec("b", "x", "s")}, dir.file("in.jsonl"));
  PipelineConfig c = command("filter");
  c.input_path = dir.file("in.jsonl");
  c.output_path = dir.file("out.jsonl");
  c.side_threshold = 0.5;
  const RunResult r = run_command(c);
  EXPECT_EQ(r.report["counts"]["output"], 1);
  ASSERT_EQ(r.report["failures"].size(), 1u);
  EXPECT_EQ(r.report["failures"][0]["kind"], "MissingScore");
  EXPECT_EQ(r.report["failures"][0]["line"], 2);
}

TEST(Filter, BenchmarkBounds) {
  ct::TempDir dir("bench");
  const std::string summary = "Returns the computed total value.";
  write_corpus({rec("19", tokens(19), summary), rec("20", tokens(20), summary), rec("200", tokens(200), summary),
                rec("201", tokens(201), summary), rec("short", tokens(50), "Short one. More words follow.")},
               dir.file("in.jsonl"));
  PipelineConfig c = command("filter");
  c.input_path = dir.file("in.jsonl");
  c.output_path = dir.file("out.jsonl");
  c.benchmark_filter = true;
  const RunResult r = run_command(c);
  ASSERT_EQ(r.exit_code, ExitCode::Ok) << r.report.dump();
  const auto out = load(dir.file("out.jsonl"));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].id, "20");
  EXPECT_EQ(out[1].id, "200");
  EXPECT_EQ(r.report["counts"]["filtered_benchmark"], 3);
}

TEST(Filter, NoFiltersIsIdentity) {
  ct::TempDir dir("ident");
  const auto corpus = ct::synthetic_corpus(25, 4);
  write_corpus(corpus, dir.file("in.jsonl"));
  PipelineConfig c = command("filter");
  c.input_path = dir.file("in.jsonl");
  c.output_path = dir.file("out.jsonl");
  const RunResult r = run_command(c);
  EXPECT_EQ(r.report["identity"], true);
  EXPECT_EQ(load(dir.file("out.jsonl")), corpus);
}

TEST(Stats, EntropyOfSimpleCorpus) {
  ct::TempDir dir("stats");
  write_corpus({rec("a", "a a", "s"), rec("b", "b c", "s")}, dir.file("in.jsonl"));
  PipelineConfig c = command("stats");
  c.input_path = dir.file("in.jsonl");
  c.output_path = dir.file("dist.txt");
  const RunResult r = run_command(c);
  ASSERT_EQ(r.exit_code, ExitCode::Ok) << r.report.dump();
  EXPECT_NEAR(r.report["tokens"]["entropy_bits"].get<double>(), 1.5, 1e-12);
  EXPECT_EQ(r.report["tokens"]["total_tokens"], 4);
  EXPECT_EQ(ct::slurp(dir.file("dist.txt")), "#codesum-distribution\ttotal=4\na\t2\nb\t1\nc\t1\n");
}

TEST(Stats, BaselineAgainstItself) {
  ct::TempDir dir("self");
  write_corpus(ct::synthetic_corpus(30, 6), dir.file("in.jsonl"));
  PipelineConfig c = command("stats");
  c.input_path = dir.file("in.jsonl");
  c.baseline_path = dir.file("in.jsonl");
  const RunResult r = run_command(c);
  ASSERT_EQ(r.exit_code, ExitCode::Ok) << r.report.dump();
  EXPECT_EQ(r.report["entropy_reduction_pct"].get<double>(), 0.0);
  EXPECT_EQ(r.report["retention"].get<double>(), 1.0);
  EXPECT_EQ(r.report["retention_pairs"], 30);
}

TEST(Stats, ReducedCorpusAgainstOriginal) {
  ct::TempDir dir("reduced");
  write_corpus({rec("a", "public int size() { return n; }", "s"), rec("b", "void f(int x) { g(x); }", "s")},
               dir.file("in.jsonl"));
  PipelineConfig red = command("reduce");
  red.input_path = dir.file("in.jsonl");
  red.output_path = dir.file("sig.jsonl");
  red.strategy = Strategy::Signature;
  ASSERT_EQ(run_command(red).exit_code, ExitCode::Ok);
  PipelineConfig c = command("stats");
  c.input_path = dir.file("sig.jsonl");
  c.baseline_path = dir.file("in.jsonl");
  const RunResult r = run_command(c);
  ASSERT_EQ(r.exit_code, ExitCode::Ok) << r.report.dump();
  // 5 of 10 and 6 of 13 tokens survive.
  EXPECT_DOUBLE_EQ(r.report["retention"].get<double>(), 11.0 / 23.0);
}

TEST(Stats, DistributionFilesGiveReduction) {
  ct::TempDir dir("distfiles");
  const std::map<std::string, std::uint64_t> base = {{"a", 10}, {"b", 7}, {"c", 5}, {"d", 3}, {"e", 1}};
  const std::map<std::string, std::uint64_t> reduced = {{"a", 20}, {"b", 3}, {"c", 1}};
  write_distribution(dir.file("base.txt"), base);
  write_distribution(dir.file("reduced.txt"), reduced);
  PipelineConfig c = command("stats");
  c.input_path = dir.file("reduced.txt");
  c.baseline_path = dir.file("base.txt");
  const RunResult r = run_command(c);
  ASSERT_EQ(r.exit_code, ExitCode::Ok) << r.report.dump();
  const double hb = naive_entropy(base);
  const double hr = naive_entropy(reduced);
  EXPECT_NEAR(r.report["entropy_reduction_pct"].get<double>(), 100.0 * (hb - hr) / hb, 1e-9);
  EXPECT_TRUE(r.report["retention"].is_null());
}

TEST(Eval, IdenticalSummariesScorePerfect) {
  ct::TempDir dir("eval");
  const auto corpus = ct::synthetic_corpus(20, 8);
  write_corpus(corpus, dir.file("refs.jsonl"));
  std::string cands;
  for (const auto& r : corpus) cands += Json({{"id", r.id}, {"summary", r.summary}}).dump() + "\n";
  ct::write_text(dir.file("cands.jsonl"), cands);
  PipelineConfig c = command("eval");
  c.candidates_path = dir.file("cands.jsonl");
  c.references_path = dir.file("refs.jsonl");
  c.output_path = dir.file("scores.jsonl");
  const RunResult r = run_command(c);
  ASSERT_EQ(r.exit_code, ExitCode::Ok) << r.report.dump();
  EXPECT_EQ(r.report["scored"], 20);
  EXPECT_NEAR(r.report["corpus"]["bleu"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(r.report["corpus"]["rouge-l"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(r.report["corpus"]["chrf"].get<double>(), 1.0, 1e-12);
  EXPECT_GT(r.report["corpus"]["meteor"].get<double>(), 0.9);
  const std::string rows = ct::slurp(dir.file("scores.jsonl"));
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 20);
  EXPECT_EQ(rows.find("{\"id\":\"rec-0\",\"bleu\":"), 0u);
}

TEST(Eval, MissingReferenceIsConfigError) {
  ct::TempDir dir("missing");
  write_corpus({rec("a", "x", "Returns a value.")}, dir.file("refs.jsonl"));
  ct::write_text(dir.file("cands.jsonl"), "{\"id\":\"zzz\",\"summary\":\"Returns a value.\"}\n");
  PipelineConfig c = command("eval");
  c.candidates_path = dir.file("cands.jsonl");
  c.references_path = dir.file("refs.jsonl");
  const RunResult r = run_command(c);
  EXPECT_EQ(r.exit_code, ExitCode::ConfigError);
  EXPECT_EQ(r.report["error"]["kind"], "MissingPair");
}

TEST(Compare, IdenticalScoresAreNotSignificant) {
  ct::TempDir dir("cmp-same");
  write_scores(dir.file("base.jsonl"), {0.1, 0.4, 0.3, 0.8, 0.2});
  write_scores(dir.file("sys.jsonl"), {0.1, 0.4, 0.3, 0.8, 0.2});
  PipelineConfig c = command("compare");
  c.baseline_path = dir.file("base.jsonl");
  c.systems = {{"same", dir.file("sys.jsonl")}};
  c.output_path = dir.file("table.tsv");
  const RunResult r = run_command(c);
  ASSERT_EQ(r.exit_code, ExitCode::Ok) << r.report.dump();
  ASSERT_EQ(r.report["family_size"], 1);
  EXPECT_EQ(r.report["comparisons"][0]["display_p"], "x");
  EXPECT_EQ(r.report["comparisons"][0]["raw_p"].get<double>(), 1.0);
  EXPECT_EQ(r.report["comparisons"][0]["magnitude"], "N");
}

TEST(Compare, SixUniformDifferences) {
  ct::TempDir dir("cmp-six");
  write_scores(dir.file("base.jsonl"), {0.5, 0.6, 0.7, 0.8, 0.9, 1.0});
  write_scores(dir.file("sys.jsonl"), {-0.5, -0.4, -0.3, -0.2, -0.1, 0.0});
  PipelineConfig c = command("compare");
  c.baseline_path = dir.file("base.jsonl");
  c.systems = {{"six", dir.file("sys.jsonl")}};
  const RunResult r = run_command(c);
  ASSERT_EQ(r.exit_code, ExitCode::Ok) << r.report.dump();
  const Json& row = r.report["comparisons"][0];
  EXPECT_NEAR(row["raw_p"].get<double>(), 0.03125, 1e-15);
  EXPECT_EQ(row["significant"], true);
  EXPECT_EQ(row["n_pairs"], 6);
}

TEST(Compare, FamilyOfNineWithOneStrongEffect) {
  ct::TempDir dir("cmp-nine");
  std::vector<double> base;
  for (int i = 0; i < 10; ++i) base.push_back(0.05 * i);
  write_scores(dir.file("base.jsonl"), base);
  PipelineConfig c = command("compare");
  c.baseline_path = dir.file("base.jsonl");
  for (int s = 0; s < 9; ++s) {
    std::vector<double> sys = base;
    if (s == 4) {
      for (std::size_t i = 0; i < sys.size(); ++i) sys[i] += 0.5 + 0.01 * static_cast<double>(i);
    }
    const std::string path = dir.file("sys" + std::to_string(s) + ".jsonl");
    write_scores(path, sys);
    c.systems.emplace_back("s" + std::to_string(s), path);
  }
  const RunResult r = run_command(c);
  ASSERT_EQ(r.exit_code, ExitCode::Ok) << r.report.dump();
  ASSERT_EQ(r.report["family_size"], 9);
  for (const Json& row : r.report["comparisons"]) {
    const bool strong = row["comparison_id"] == "s4";
    EXPECT_EQ(row["significant"].get<bool>(), strong) << row.dump();
    if (strong) {
      EXPECT_NEAR(row["raw_p"].get<double>(), 0.001953125, 1e-15);
      EXPECT_NEAR(row["adjusted_p"].get<double>(), 9 * 0.001953125, 1e-15);
      EXPECT_EQ(row["magnitude"], "L");
    }
  }
}

TEST(Compare, MismatchedIdsAreMissingPairs) {
  ct::TempDir dir("cmp-miss");
  write_scores(dir.file("base.jsonl"), {0.1, 0.2, 0.3});
  write_scores(dir.file("sys.jsonl"), {0.1, 0.2});
  PipelineConfig c = command("compare");
  c.baseline_path = dir.file("base.jsonl");
  c.systems = {{"short", dir.file("sys.jsonl")}};
  const RunResult r = run_command(c);
  EXPECT_EQ(r.exit_code, ExitCode::ConfigError);
  EXPECT_EQ(r.report["error"]["kind"], "MissingPair");
}

TEST(MineNgrams, MatchesBruteForceUnigrams) {
  ct::TempDir dir("mine");
  const auto corpus = ct::synthetic_corpus(60, 12);
  write_corpus(corpus, dir.file("train.jsonl"));
  PipelineConfig c = command("mine-ngrams");
  c.train_path = dir.file("train.jsonl");
  c.output_path = dir.file("ban.txt");
  c.k = 4;
  c.max_n = 1;
  const RunResult r = run_command(c);
  ASSERT_EQ(r.exit_code, ExitCode::Ok) << r.report.dump();
  EXPECT_EQ(r.report["training_records"], 60);
  std::map<std::string, std::uint64_t> freq;
  for (const auto& rec : corpus) {
    for (const auto& t : lex_code(rec.code, rec.language).tokens) ++freq[t];
  }
  std::vector<std::pair<std::string, std::uint64_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  const NgramBanList ban = load_ban_list(dir.file("ban.txt"));
  ASSERT_EQ(ban.entries.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(ban.entries.at({ranked[i].first}), ranked[i].second);
  }
  EXPECT_EQ(ban.source_fingerprint, r.report["ban_list_fingerprint"]);
}

TEST(Config, JsonRoundTrip) {
  PipelineConfig c = command("compare");
  c.input_path = "in.jsonl";
  c.output_path = "out.tsv";
  c.report_path = "r.json";
  c.language = Language::Python;
  c.strategy = Strategy::CrystalBleu;
  c.ban_list_path = "ban.txt";
  c.train_path = "train.jsonl";
  c.k = 77;
  c.max_n = 3;
  c.side_threshold = 0.25;
  c.benchmark_filter = true;
  c.filter.min_code_tokens = 5;
  c.filter.max_code_tokens = 50;
  c.filter.min_summary_tokens = 2;
  c.filter.apply_first_sentence = false;
  c.metrics = {Metric::ChrF, Metric::Bleu};
  c.alpha = 0.01;
  c.correction = Correction::None;
  c.baseline_path = "b.jsonl";
  c.candidates_path = "c.jsonl";
  c.references_path = "refs.jsonl";
  c.systems = {{"x", "x.jsonl"}, {"y", "y.jsonl"}};
  c.max_failures = 9;
  c.keep_empty = true;
  c.seed = 42;
  EXPECT_EQ(config_from_json(config_to_json(c)), c);
  EXPECT_EQ(config_from_json(config_to_json(PipelineConfig{})), PipelineConfig{});
  EXPECT_THROW(config_from_json(Json::parse(R"({"k": "many"})")), Error);
}

TEST(ExitCodes, IoAndConfigErrors) {
  ct::TempDir dir("exit");
  PipelineConfig c = command("reduce");
  c.input_path = dir.file("absent.jsonl");
  c.output_path = dir.file("out.jsonl");
  RunResult r = run_command(c);
  EXPECT_EQ(r.exit_code, ExitCode::IoError);
  EXPECT_EQ(r.report["error"]["kind"], "FileNotFound");

  write_corpus({rec("a", "x", "s")}, dir.file("in.jsonl"));
  c.input_path = dir.file("in.jsonl");
  c.strategy = Strategy::CrystalBleu;
  EXPECT_EQ(run_command(c).exit_code, ExitCode::ConfigError);

  c.strategy.reset();
  c.output_path = c.input_path;
  EXPECT_EQ(run_command(c).exit_code, ExitCode::ConfigError);
  EXPECT_EQ(run_command(command("bogus")).exit_code, ExitCode::ConfigError);
  EXPECT_EQ(run_command(command("reduce")).exit_code, ExitCode::ConfigError);
}

TEST(Report, RuntimeIsTheOnlyNondeterministicPart) {
  ct::TempDir dir("report");
  write_corpus(ct::synthetic_corpus(20, 1), dir.file("in.jsonl"));
  PipelineConfig c = command("stats");
  c.input_path = dir.file("in.jsonl");
  const RunResult a = run_command(c);
  const RunResult b = run_command(c);
  EXPECT_TRUE(a.report.contains("runtime"));
  EXPECT_EQ(deterministic_report(a.report), deterministic_report(b.report));
  EXPECT_EQ(deterministic_report(a.report).find("runtime"), std::string::npos);
  EXPECT_EQ(a.report["config"], config_to_json(c));
}
