#include <gtest/gtest.h>

#include <cmath>

#include "codesum/metrics.hpp"
#include "codesum/porter.hpp"
#include "support.hpp"

using namespace codesum;
namespace ct = codesum::testing;

namespace {

Tokens words(const std::string& s) {
  Tokens out;
  std::string cur;
  for (char c : s + " ") {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

bool is_subsequence(const Tokens& sub, const Tokens& full) {
  std::size_t j = 0;
  for (const auto& t : full) {
    if (j < sub.size() && sub[j] == t) ++j;
  }
  return j == sub.size();
}

// Tries every subset of a (2^|a|) and keeps the longest that is a subsequence of b.
std::size_t brute_lcs(const Tokens& a, const Tokens& b) {
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
    Tokens pick;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (mask & (1u << i)) pick.push_back(a[i]);
    }
    if (pick.size() > best && is_subsequence(pick, b)) best = pick.size();
  }
  return best;
}

// Full-matrix Wagner-Fischer over bytes.
std::size_t dp_levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = d[i - 1][j - 1] + (a[i - 1] != b[j - 1]);
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
    }
  }
  return d[a.size()][b.size()];
}

// Naive single-reference BLEU without smoothing.
double naive_bleu(const Tokens& c, const Tokens& r, int max_n) {
  double log_sum = 0;
  for (int n = 1; n <= max_n; ++n) {
    const std::size_t un = static_cast<std::size_t>(n);
    if (c.size() < un) return 0.0;
    std::vector<bool> used(r.size() >= un ? r.size() - un + 1 : 0, false);
    std::size_t match = 0;
    for (std::size_t i = 0; i + un <= c.size(); ++i) {
      for (std::size_t j = 0; j < used.size(); ++j) {
        if (!used[j] && std::equal(c.begin() + static_cast<long>(i), c.begin() + static_cast<long>(i + un),
                                   r.begin() + static_cast<long>(j))) {
          used[j] = true;
          ++match;
          break;
        }
      }
    }
    if (match == 0) return 0.0;
    log_sum += std::log(static_cast<double>(match) / static_cast<double>(c.size() - un + 1));
  }
  const double cl = static_cast<double>(c.size());
  const double rl = static_cast<double>(r.size());
  const double bp = cl > rl ? 1.0 : std::exp(1.0 - rl / cl);
  return bp * std::exp(log_sum / max_n);
}

Tokens random_tokens(ct::Rng& rng, std::size_t max_len, std::size_t alphabet) {
  Tokens out;
  const std::size_t n = 1 + ct::pick(rng, max_len);
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('a' + ct::pick(rng, alphabet))));
  return out;
}

std::string random_string(ct::Rng& rng, std::size_t max_len) {
  std::string s;
  const std::size_t n = ct::pick(rng, max_len + 1);
  for (std::size_t i = 0; i < n; ++i) s += static_cast<char>('a' + ct::pick(rng, 4));
  return s;
}

}  // namespace

TEST(Bleu, HandCase) {
  const MetricScore s = bleu(words("the cat sat"), {words("the cat sat down")}, 2);
  EXPECT_NEAR(s.value, std::exp(-1.0 / 3.0), 1e-9);
  EXPECT_NEAR(s.components.at("bp"), std::exp(-1.0 / 3.0), 1e-12);
}

TEST(Bleu, IdentityZeroAndCase) {
  EXPECT_DOUBLE_EQ(bleu(words("a b c d e"), {words("a b c d e")}).value, 1.0);
  EXPECT_DOUBLE_EQ(bleu(words("The Cat Sat Down"), {words("the cat sat down")}).value, 1.0);
  EXPECT_EQ(bleu(words("x y z"), {words("a b c")}, 4, Smoothing::None).value, 0.0);
}

TEST(Bleu, ClippingRepeatedTokens) {
  const BleuStats s = bleu_stats(words("the the the"), {words("the cat")}, 1);
  EXPECT_EQ(s.matches[0], 1u);
  EXPECT_EQ(s.totals[0], 3u);
  EXPECT_NEAR(bleu_from_stats(s).value, 1.0 / 3.0, 1e-12);
}

TEST(Bleu, Smoothing) {
  const Tokens c = words("a b x y");
  const std::vector<Tokens> r = {words("a b c d")};
  EXPECT_EQ(bleu(c, r, 4, Smoothing::None).value, 0.0);
  const double eps = bleu(c, r, 4, Smoothing::Epsilon).value;
  EXPECT_GT(eps, 0.0);
  EXPECT_LT(eps, 1e-3);
  const double add_one = bleu(c, r, 4, Smoothing::AddOne).value;
  EXPECT_GT(add_one, eps);
  EXPECT_LE(add_one, 1.0);
}

TEST(Bleu, ClosestReferenceLength) {
  const BleuStats s = bleu_stats(words("a b c"), {words("a b c d e f g"), words("a b"), words("a b c d")}, 1);
  EXPECT_EQ(s.reference_length, 2u);
  const BleuStats tie = bleu_stats(words("a b c"), {words("a b c d"), words("a b")}, 1);
  EXPECT_EQ(tie.reference_length, 2u);
}

TEST(Bleu, MultiReferenceClipsByMax) {
  const BleuStats s = bleu_stats(words("a a a"), {words("a b"), words("a a c")}, 1);
  EXPECT_EQ(s.matches[0], 2u);
}

TEST(Bleu, Errors) {
  EXPECT_THROW(bleu({}, {words("a")}), Error);
  EXPECT_THROW(bleu(words("a"), {}), Error);
}

TEST(Bleu, AgreesWithNaiveOracle) {
  ct::Rng rng(10);
  for (int i = 0; i < 500; ++i) {
    const Tokens c = random_tokens(rng, 12, 4);
    const Tokens r = random_tokens(rng, 12, 4);
    const int n = 1 + static_cast<int>(ct::pick(rng, 4));
    EXPECT_NEAR(bleu(c, {r}, n).value, naive_bleu(c, r, n), 1e-12);
  }
}

TEST(Bleu, PooledStatsMergeAdds) {
  BleuStats a = bleu_stats(words("a b c"), {words("a b d")}, 2);
  const BleuStats b = bleu_stats(words("x y"), {words("x y z")}, 2);
  a.merge(b);
  EXPECT_EQ(a.matches, (std::vector<std::uint64_t>{4, 2}));
  EXPECT_EQ(a.totals, (std::vector<std::uint64_t>{5, 3}));
  EXPECT_EQ(a.candidate_length, 5u);
  EXPECT_EQ(a.reference_length, 6u);
}

TEST(RougeL, Examples) {
  const MetricScore s = rouge_l(words("a b c d"), words("a c b d"));
  EXPECT_DOUBLE_EQ(s.value, 0.75);
  EXPECT_EQ(s.components.at("lcs"), 3.0);
  EXPECT_DOUBLE_EQ(rouge_l(words("p q r"), words("p q r")).value, 1.0);
  EXPECT_EQ(rouge_l(words("p q"), words("x y")).value, 0.0);
  EXPECT_THROW(rouge_l({}, words("a")), Error);
}

TEST(RougeL, AgreesWithExponentialLcs) {
  ct::Rng rng(42);
  for (int i = 0; i < 500; ++i) {
    const Tokens a = random_tokens(rng, 10, 4);
    const Tokens b = random_tokens(rng, 10, 4);
    const std::size_t lcs = brute_lcs(a, b);
    EXPECT_EQ(lcs_length(a, b), lcs);
    const double p = static_cast<double>(lcs) / static_cast<double>(a.size());
    const double r = static_cast<double>(lcs) / static_cast<double>(b.size());
    EXPECT_NEAR(rouge_l(a, b).value, lcs ? 2 * p * r / (p + r) : 0.0, 1e-12);
  }
}

TEST(Meteor, ClosedForms) {
  EXPECT_NEAR(meteor(words("the cat"), words("the dog")).value, 0.25, 1e-12);
  for (std::size_t m = 1; m <= 8; ++m) {
    Tokens t;
    for (std::size_t i = 0; i < m; ++i) t.push_back("w" + std::to_string(i));
    const double md = static_cast<double>(m);
    EXPECT_NEAR(meteor(t, t).value, 1.0 - 0.5 / (md * md * md), 1e-12) << m;
  }
  EXPECT_NEAR(meteor(words("a b c d e"), words("a b c d e")).value, 0.996, 1e-12);
  EXPECT_EQ(meteor(words("x y"), words("a b")).value, 0.0);
  EXPECT_THROW(meteor(words("a"), {}), Error);
}

TEST(Meteor, StemStageAndChunks) {
  const MetricScore s = meteor(words("running dogs"), words("run dog"));
  EXPECT_EQ(s.components.at("matches"), 2.0);
  EXPECT_EQ(s.components.at("chunks"), 1.0);
  const MetricScore swapped = meteor(words("b a"), words("a b"));
  EXPECT_EQ(swapped.components.at("chunks"), 2.0);
  // P = R = 1, chunks/matches = 1: F * (1 - 0.5)
  EXPECT_NEAR(swapped.value, 0.5, 1e-12);
}

TEST(Meteor, RecallWeighted) {
  const double short_cand = meteor(words("a"), words("a b c d")).value;
  const double long_cand = meteor(words("a b c d"), words("a")).value;
  EXPECT_LT(short_cand, long_cand);
}

TEST(ChrF, HandCalculation) {
  // n=1: P=R=2/3; n=2: 1/2; n=3: 0. Mean 7/18 for both, so F2 = 7/18.
  EXPECT_NEAR(chrf("abc", "abd").value, 7.0 / 18.0, 1e-12);
  EXPECT_DOUBLE_EQ(chrf("int x = 1", "int x = 1").value, 1.0);
  EXPECT_EQ(chrf("abc", "xyz").value, 0.0);
  EXPECT_DOUBLE_EQ(chrf("a b c", "abc").value, 1.0);
  EXPECT_THROW(chrf("  ", "abc"), Error);
}

TEST(ChrF, RecallWeightedAndBounded) {
  const MetricScore s = chrf("ab", "abcdef");
  EXPECT_DOUBLE_EQ(s.components.at("precision"), 1.0);
  EXPECT_LT(s.components.at("recall"), 1.0);
  ct::Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const std::string a = random_string(rng, 12) + "z";
    const std::string b = random_string(rng, 12) + "y";
    const double v = chrf(a, b).value;
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Levenshtein, Examples) {
  EXPECT_EQ(levenshtein("kitten", "sitting"), 3u);
  EXPECT_EQ(levenshtein("", "abc"), 3u);
  EXPECT_EQ(levenshtein("same", "same"), 0u);
  EXPECT_EQ(levenshtein("größe", "grösse"), 2u);
}

TEST(Levenshtein, MetricAxiomsAndOracle) {
  ct::Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    const std::string a = random_string(rng, 9);
    const std::string b = random_string(rng, 9);
    const std::string c = random_string(rng, 9);
    const std::size_t ab = levenshtein(a, b);
    EXPECT_EQ(ab, dp_levenshtein(a, b));
    EXPECT_EQ(ab, levenshtein(b, a));
    EXPECT_EQ(ab == 0, a == b);
    EXPECT_LE(levenshtein(a, c), ab + levenshtein(b, c));
  }
}

TEST(CCoeff, Examples) {
  EXPECT_DOUBLE_EQ(c_coeff(words("formats event"), words("String formatEvent ( )")).value, 1.0);
  EXPECT_DOUBLE_EQ(c_coeff(words("formats event"), words("format event")).value, 1.0);
  EXPECT_DOUBLE_EQ(c_coeff(words("return x"), words("return x ;")).value, 1.0);
  EXPECT_EQ(c_coeff(words("elephant giraffe"), words("public static void main")).value, 0.0);
  EXPECT_DOUBLE_EQ(c_coeff(words("Returns the Value"), words("getValue ( ) return")).value, 2.0 / 3.0);
  try {
    c_coeff({}, words("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptySummary);
  }
}

TEST(CCoeff, SplitIdentifier) {
  EXPECT_EQ(split_identifier("formatEvent"), (Tokens{"format", "event"}));
  EXPECT_EQ(split_identifier("_get_err_indices"), (Tokens{"get", "err", "indices"}));
  EXPECT_EQ(split_identifier("HTTPServer2Config"), (Tokens{"http", "server", "2", "config"}));
  EXPECT_EQ(split_identifier("$x"), (Tokens{"x"}));
  EXPECT_EQ(split_identifier("("), (Tokens{"("}));
}

TEST(Metrics, Names) {
  for (Metric m : {Metric::Bleu, Metric::RougeL, Metric::Meteor, Metric::ChrF, Metric::CCoeff}) {
    EXPECT_EQ(parse_metric(to_string(m)), m);
  }
  EXPECT_EQ(to_string(Metric::RougeL), "rouge-l");
  EXPECT_FALSE(parse_metric("cider").has_value());
}

TEST(Porter, ClassicVocabulary) {
  const std::pair<const char*, const char*> cases[] = {
      {"caresses", "caress"}, {"ponies", "poni"},       {"running", "run"},     {"generalization", "gener"},
      {"hopping", "hop"},     {"relational", "relat"},  {"formats", "format"},  {"happiness", "happi"},
      {"agreed", "agre"},     {"conditional", "condit"}, {"hopeful", "hope"},    {"sky", "sky"},
      {"at", "at"},           {"x2y", "x2y"},
  };
  for (const auto& [in, out] : cases) EXPECT_EQ(porter_stem(in), out) << in;
}
