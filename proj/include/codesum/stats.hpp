#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "codesum/error.hpp"

namespace codesum {

enum class WilcoxonMode { Auto, ExactSmallN, NormalApprox };

inline constexpr std::size_t kExactWilcoxonLimit = 25;

struct WilcoxonResult {
  double p = 1.0;
  std::size_t n_used = 0;  // pairs left after dropping zero differences
  std::size_t zeros_dropped = 0;
  double w_plus = 0.0;
  double w_minus = 0.0;
  bool exact = false;
  bool empty_after_zero_removal = false;
};

namespace detail {

// Midranks (1-based) of v, ties averaged.
inline std::vector<double> midranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace detail

/// Two-sided paired signed-rank test on d = a - b. Zero differences are
/// dropped; exact null distribution for n <= 25 (Auto), otherwise normal
/// approximation with tie and continuity corrections.
inline WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b,
                                           WilcoxonMode mode = WilcoxonMode::Auto) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::LengthMismatch,
                "paired samples differ in length (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw Error(ErrorKind::EmptyInput, "wilcoxon needs at least one pair");
  WilcoxonResult out;
  std::vector<double> mag;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d == 0.0) {
      ++out.zeros_dropped;
      continue;
    }
    mag.push_back(std::fabs(d));
    positive.push_back(d > 0.0);
  }
  out.n_used = mag.size();
  if (mag.empty()) {
    out.empty_after_zero_removal = true;
    return out;
  }
  const std::vector<double> ranks = detail::midranks(mag);
  for (std::size_t i = 0; i < ranks.size(); ++i) (positive[i] ? out.w_plus : out.w_minus) += ranks[i];
  const double w = std::min(out.w_plus, out.w_minus);
  const std::size_t n = mag.size();
  const bool exact = mode == WilcoxonMode::ExactSmallN || (mode == WilcoxonMode::Auto && n <= kExactWilcoxonLimit);
  out.exact = exact;

  if (exact) {
    // Midranks are multiples of 1/2, so doubled ranks are integers and the
    // null distribution of 2*W+ is a subset-sum count over them.
    std::vector<std::size_t> doubled(n);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      doubled[i] = static_cast<std::size_t>(std::llround(ranks[i] * 2.0));
      total += doubled[i];
    }
    std::vector<double> ways(total + 1, 0.0);
    ways[0] = 1.0;
    std::size_t reach = 0;
    for (std::size_t r : doubled) {
      reach += r;
      for (std::size_t s = reach; s >= r; --s) {
        ways[s] += ways[s - r];
        if (s == r) break;
      }
    }
    const auto limit = static_cast<std::size_t>(std::llround(w * 2.0));
    double tail = 0.0;
    for (std::size_t s = 0; s <= limit && s <= total; ++s) tail += ways[s];
    out.p = std::min(1.0, 2.0 * tail / std::ldexp(1.0, static_cast<int>(n)));
    return out;
  }

  const double nd = static_cast<double>(n);
  const double mean = nd * (nd + 1.0) / 4.0;
  double tie_term = 0.0;
  {
    std::vector<double> sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      tie_term += t * t * t - t;
      i = j;
    }
  }
  const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) return out;
  const double z = std::max(0.0, std::fabs(out.w_plus - mean) - 0.5) / std::sqrt(var);
  out.p = std::min(1.0, 2.0 * detail::normal_sf(z));
  return out;
}

enum class Magnitude { Negligible, Small, Medium, Large };

inline std::string_view to_string(Magnitude m) {
  switch (m) {
    case Magnitude::Negligible: return "N";
    case Magnitude::Small: return "S";
    case Magnitude::Medium: return "M";
    case Magnitude::Large: return "L";
  }
  return "?";
}

inline Magnitude magnitude_of(double delta) {
  const double d = std::fabs(delta);
  if (d < 0.147) return Magnitude::Negligible;
  if (d < 0.33) return Magnitude::Small;
  if (d < 0.474) return Magnitude::Medium;
  return Magnitude::Large;
}

struct EffectSize {
  double delta = 0.0;
  Magnitude magnitude = Magnitude::Negligible;
};

/// Cliff's delta: P(a > b) - P(a < b) over all cross pairs.
inline EffectSize cliffs_delta(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptyInput, "cliffs_delta needs two non-empty samples");
  std::vector<double> sorted = b;
  std::sort(sorted.begin(), sorted.end());
  std::int64_t greater = 0;
  std::int64_t less = 0;
  for (double x : a) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), x);
    const auto hi = std::upper_bound(sorted.begin(), sorted.end(), x);
    greater += lo - sorted.begin();
    less += sorted.end() - hi;
  }
  EffectSize e;
  e.delta = static_cast<double>(greater - less) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
  e.magnitude = magnitude_of(e.delta);
  return e;
}

/// Holm step-down adjustment; results in input order.
inline std::vector<double> holm_bonferroni(const std::vector<double>& raw) {
  for (double p : raw) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::OutOfRangeP, "p-value outside [0,1]: " + std::to_string(p));
  }
  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return raw[x] < raw[y]; });
  std::vector<double> adjusted(raw.size());
  const double m = static_cast<double>(raw.size());
  double running = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    running = std::max(running, (m - static_cast<double>(i)) * raw[order[i]]);
    adjusted[order[i]] = std::min(1.0, running);
  }
  return adjusted;
}

enum class Correction { Holm, None };

/// Paired per-record scores of a system and its baseline on one metric.
struct PairedMetricSamples {
  std::string comparison_id;
  std::string metric;
  std::vector<double> system;
  std::vector<double> baseline;
};

struct TestReport {
  std::string comparison_id;
  std::string metric;
  double raw_p = 1.0;
  double adjusted_p = 1.0;
  EffectSize effect;
  std::size_t n_pairs = 0;
  bool significant = false;
};

/// Wilcoxon and Cliff's delta per comparison, then one correction pass over
/// the whole family.
inline std::vector<TestReport> compare_systems(const std::vector<PairedMetricSamples>& family, double alpha = 0.05,
                                               Correction correction = Correction::Holm) {
  std::vector<TestReport> reports;
  std::vector<double> raw;
  for (const PairedMetricSamples& s : family) {
    const WilcoxonResult w = wilcoxon_signed_rank(s.system, s.baseline);
    TestReport r;
    r.comparison_id = s.comparison_id;
    r.metric = s.metric;
    r.raw_p = w.p;
    r.n_pairs = w.n_used;
    r.effect = cliffs_delta(s.system, s.baseline);
    reports.push_back(r);
    raw.push_back(w.p);
  }
  const std::vector<double> adjusted = correction == Correction::Holm ? holm_bonferroni(raw) : raw;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    reports[i].adjusted_p = adjusted[i];
    reports[i].significant = adjusted[i] < alpha;
  }
  return reports;
}

inline std::string format_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", p);
  return buf;
}

/// Tab-separated table; adjusted p-values that are not significant print "x".
inline std::string render_comparison_table(const std::vector<TestReport>& reports) {
  std::string out = "comparison_id\tmetric\traw_p\tadjusted_p\tdelta\tmagnitude\tn_pairs\n";
  for (const TestReport& r : reports) {
    char delta[32];
    std::snprintf(delta, sizeof delta, "%.3f", r.effect.delta == 0.0 ? 0.0 : r.effect.delta);
    out += r.comparison_id + '\t' + r.metric + '\t' + format_p(r.raw_p) + '\t' +
           (r.significant ? format_p(r.adjusted_p) : std::string("x")) + '\t' + delta + '\t' +
           std::string(to_string(r.effect.magnitude)) + '\t' + std::to_string(r.n_pairs) + '\n';
  }
  return out;
}

}  // namespace codesum
