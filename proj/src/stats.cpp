#include "iecsi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "iecsi/distributions.hpp"
#include "iecsi/errors.hpp"

namespace iecsi {

namespace {

// Values closer than this (relative) are treated as tied or as zero; subscale
// scores are ratios of small integers and differences of them can disagree in
// the last ulp.
constexpr double kTieTolerance = 1e-9;

bool nearly_equal(double a, double b) {
  return std::fabs(a - b) <= kTieTolerance * std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

StatTestResult finish(StatTestResult r, double alpha) {
  r.p_value = std::clamp(r.p_value, 0.0, 1.0);
  r.significant = r.p_value < alpha;
  return r;
}

// Tie-averaged ranks, doubled so they stay integral: a tie group spanning
// 1-based positions [first, last] gets doubled rank first + last.
struct Ranking {
  std::vector<std::int64_t> doubled;  // aligned with the input
  std::vector<std::int64_t> tie_sizes;
  bool has_ties = false;
};

Ranking rank_values(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  Ranking r;
  r.doubled.assign(n, 0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && nearly_equal(values[order[j]], values[order[i]])) ++j;
    const auto first = static_cast<std::int64_t>(i + 1);
    const auto last = static_cast<std::int64_t>(j);
    for (std::size_t k = i; k < j; ++k) r.doubled[order[k]] = first + last;
    if (j - i > 1) {
      r.has_ties = true;
      r.tie_sizes.push_back(static_cast<std::int64_t>(j - i));
    }
    i = j;
  }
  return r;
}

double tie_term(const std::vector<std::int64_t>& sizes) {
  double s = 0.0;
  for (auto t : sizes) s += static_cast<double>(t * t * t - t);
  return s;
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ContractError("alpha must be in (0, 1)");
}

}  // namespace

std::string_view to_string(TestKind k) {
  switch (k) {
    case TestKind::PairedT: return "paired_t_test";
    case TestKind::Wilcoxon: return "wilcoxon_signed_rank";
    case TestKind::OneSampleT: return "one_sample_t_test";
    case TestKind::Welch: return "welch_t_test";
    case TestKind::MannWhitney: return "mann_whitney_u";
  }
  return "?";
}

StatTestResult paired_t_test(std::span<const double> x, std::span<const double> y,
                             double alpha) {
  require_alpha(alpha);
  if (x.size() != y.size()) throw ContractError("paired_t_test: samples differ in length");
  if (x.size() < 2) throw ContractError("paired_t_test: need at least 2 pairs");
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  const double m = mean_of(d);
  const double sd = sd_of(d, m);
  if (!(sd > 0.0)) throw DomainError("zero-variance differences");
  const double n = static_cast<double>(d.size());
  StatTestResult r;
  r.test = std::string(to_string(TestKind::PairedT));
  r.statistic = m / (sd / std::sqrt(n));
  r.df = n - 1.0;
  r.p_value = student_t_two_sided_p(r.statistic, *r.df);
  r.effect_size = EffectSize{"cohen_d", m / sd};
  r.n = static_cast<int>(d.size());
  r.method_note = "two-sided, Student t with n-1 df";
  return finish(r, alpha);
}

StatTestResult one_sample_t_test(std::span<const double> sample, double mu, double alpha) {
  require_alpha(alpha);
  if (sample.size() < 2) throw ContractError("one_sample_t_test: need n >= 2");
  const double m = mean_of(sample);
  const double sd = sd_of(sample, m);
  if (!(sd > 0.0)) throw DomainError("zero-variance sample");
  const double n = static_cast<double>(sample.size());
  StatTestResult r;
  r.test = std::string(to_string(TestKind::OneSampleT));
  r.statistic = (m - mu) / (sd / std::sqrt(n));
  r.df = n - 1.0;
  r.p_value = student_t_two_sided_p(r.statistic, *r.df);
  r.effect_size = EffectSize{"cohen_d", (m - mu) / sd};
  r.n = static_cast<int>(sample.size());
  r.method_note = "two-sided, Student t with n-1 df against a reference mean";
  return finish(r, alpha);
}

StatTestResult welch_t_test(std::span<const double> sample, const ReferenceStats& reference,
                            double alpha) {
  require_alpha(alpha);
  if (sample.size() < 2) throw ContractError("welch_t_test: sample needs n >= 2");
  if (reference.n < 2) throw ContractError("welch_t_test: benchmark needs n >= 2");
  if (reference.sd < 0.0) throw ContractError("welch_t_test: negative benchmark sd");
  const double m1 = mean_of(sample);
  const double s1 = sd_of(sample, m1);
  const double n1 = static_cast<double>(sample.size());
  const double n2 = reference.n;
  const double a = s1 * s1 / n1;
  const double b = reference.sd * reference.sd / n2;
  if (!(a + b > 0.0)) throw DomainError("both variances are zero");
  StatTestResult r;
  r.test = std::string(to_string(TestKind::Welch));
  r.statistic = (m1 - reference.mean) / std::sqrt(a + b);
  r.df = (a + b) * (a + b) / (a * a / (n1 - 1.0) + b * b / (n2 - 1.0));
  r.p_value = student_t_two_sided_p(r.statistic, *r.df);
  const double pooled = std::sqrt((s1 * s1 + reference.sd * reference.sd) / 2.0);
  r.effect_size = EffectSize{"cohen_d", (m1 - reference.mean) / pooled};
  r.n = static_cast<int>(sample.size());
  r.method_note = "two-sided, Welch-Satterthwaite df against benchmark summary statistics";
  return finish(r, alpha);
}

StatTestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                    const AnalysisConfig& config) {
  require_alpha(config.alpha);
  if (x.size() != y.size()) throw ContractError("wilcoxon_signed_rank: samples differ in length");
  std::vector<double> magnitude;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (nearly_equal(x[i], y[i])) continue;
    magnitude.push_back(std::fabs(d));
    positive.push_back(d > 0.0);
  }
  const std::size_t n = magnitude.size();
  if (n == 0) throw DomainError("no nonzero pairs");

  const Ranking ranks = rank_values(magnitude);
  std::int64_t total2 = 0, plus2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total2 += ranks.doubled[i];
    if (positive[i]) plus2 += ranks.doubled[i];
  }
  StatTestResult r;
  r.test = std::string(to_string(TestKind::Wilcoxon));
  r.statistic = static_cast<double>(plus2) / 2.0;
  r.n = static_cast<int>(n);
  const double minus = static_cast<double>(total2 - plus2) / 2.0;
  r.effect_size = EffectSize{"rank_biserial", (r.statistic - minus) / (r.statistic + minus)};

  if (n <= static_cast<std::size_t>(config.exact_test_cutoff)) {
    // counts[s]: sign assignments whose doubled positive-rank sum is s.
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(total2) + 1, 0);
    counts[0] = 1;
    std::int64_t reach = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto step = ranks.doubled[i];
      for (std::int64_t s = reach; s >= 0; --s) {
        if (counts[static_cast<std::size_t>(s)]) {
          counts[static_cast<std::size_t>(s + step)] += counts[static_cast<std::size_t>(s)];
        }
      }
      reach += step;
    }
    const std::int64_t observed = std::llabs(2 * plus2 - total2);
    std::uint64_t extreme = 0;
    for (std::int64_t s = 0; s <= total2; ++s) {
      if (std::llabs(2 * s - total2) >= observed) extreme += counts[static_cast<std::size_t>(s)];
    }
    r.p_value = static_cast<double>(extreme) / std::ldexp(1.0, static_cast<int>(n));
    r.method_note = "exact, enumeration of 2^" + std::to_string(n) +
                    " sign assignments; zero differences dropped";
  } else {
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term(ranks.tie_sizes) / 48.0;
    if (!(var > 0.0)) {
      r.p_value = 1.0;
    } else {
      const double z = std::max(0.0, std::fabs(r.statistic - mean) - 0.5) / std::sqrt(var);
      r.p_value = normal_two_sided_p(z);
    }
    r.method_note =
        "normal approximation with tie-corrected variance and continuity correction; "
        "zero differences dropped";
  }
  return finish(r, config.alpha);
}

StatTestResult mann_whitney_u(std::span<const double> x, std::span<const double> y,
                              const AnalysisConfig& config) {
  require_alpha(config.alpha);
  if (x.empty() || y.empty()) throw ContractError("mann_whitney_u: both samples must be nonempty");
  const std::size_t nx = x.size(), ny = y.size(), n = nx + ny;
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const Ranking ranks = rank_values(pooled);
  std::int64_t rx2 = 0;
  for (std::size_t i = 0; i < nx; ++i) rx2 += ranks.doubled[i];
  // 2U = 2R_x - n_x (n_x + 1)
  const auto nx64 = static_cast<std::int64_t>(nx), ny64 = static_cast<std::int64_t>(ny);
  const std::int64_t u2 = rx2 - nx64 * (nx64 + 1);
  StatTestResult r;
  r.test = std::string(to_string(TestKind::MannWhitney));
  r.statistic = static_cast<double>(u2) / 2.0;
  r.n = static_cast<int>(n);
  const double nxny = static_cast<double>(nx * ny);
  r.effect_size = EffectSize{"rank_biserial", 2.0 * r.statistic / nxny - 1.0};

  if (!ranks.has_ties && n <= static_cast<std::size_t>(config.exact_test_cutoff)) {
    // ways[k][s]: k-subsets of ranks 1..n with rank sum s.
    const std::size_t max_sum = n * (n + 1) / 2;
    std::vector<std::vector<std::uint64_t>> ways(nx + 1,
                                                 std::vector<std::uint64_t>(max_sum + 1, 0));
    ways[0][0] = 1;
    for (std::size_t rank = 1; rank <= n; ++rank) {
      for (std::size_t k = std::min(rank, nx); k >= 1; --k) {
        for (std::size_t s = max_sum; s >= rank; --s) ways[k][s] += ways[k - 1][s - rank];
      }
    }
    const std::int64_t observed = std::llabs(u2 - nx64 * ny64);
    std::uint64_t extreme = 0, total = 0;
    const std::int64_t offset = nx64 * (nx64 + 1) / 2;
    for (std::size_t s = 0; s <= max_sum; ++s) {
      if (!ways[nx][s]) continue;
      total += ways[nx][s];
      const std::int64_t u = static_cast<std::int64_t>(s) - offset;
      if (std::llabs(2 * u - nx64 * ny64) >= observed) extreme += ways[nx][s];
    }
    r.p_value = static_cast<double>(extreme) / static_cast<double>(total);
    r.method_note = "exact, enumeration of all C(" + std::to_string(n) + "," +
                    std::to_string(nx) + ") rank arrangements";
  } else {
    const double nd = static_cast<double>(n);
    const double mean = nxny / 2.0;
    const double var = nxny / 12.0 * ((nd + 1.0) - tie_term(ranks.tie_sizes) / (nd * (nd - 1.0)));
    if (!(var > 0.0)) {
      r.p_value = 1.0;
    } else {
      const double z = std::max(0.0, std::fabs(r.statistic - mean) - 0.5) / std::sqrt(var);
      r.p_value = normal_two_sided_p(z);
    }
    r.method_note = std::string("normal approximation with tie-corrected variance and "
                                "continuity correction") +
                    (ranks.has_ties ? "; ties present" : "");
  }
  return finish(r, config.alpha);
}

TestPlan build_test_plan(const StudyDesign& design, const InstrumentRegistry& registry) {
  TestPlan plan;
  plan.mode = design.mode;
  const BenchmarkSpec* bench = design.benchmark ? &*design.benchmark : nullptr;
  if (design.mode == StudyMode::BenchmarkOnly && !bench) {
    throw ContractError("benchmark-only study " + design.study_id + " has no benchmark");
  }

  const auto plan_for = [&](const std::string& instrument_id, const std::string& subscale_id) {
    PlannedTests p{instrument_id, subscale_id, {}};
    if (design.mode == StudyMode::Comparative) {
      p.tests = {TestKind::PairedT, TestKind::Wilcoxon};
    } else {
      auto it = bench->entries.find(subscale_key(instrument_id, subscale_id));
      if (it == bench->entries.end()) return;
      const BenchmarkEntry& e = it->second;
      if (e.mu || e.stats || e.sample) p.tests.push_back(TestKind::OneSampleT);
      if (e.stats || e.sample) p.tests.push_back(TestKind::Welch);
      if (e.sample) p.tests.push_back(TestKind::MannWhitney);
    }
    if (!p.tests.empty()) plan.entries.push_back(std::move(p));
  };

  for (const auto& id : ordered_instrument_ids(design.instruments)) {
    auto it = registry.find(id);
    if (it == registry.end()) continue;
    const Instrument& in = it->second;
    if (id == instrument_ids::kKnowledgeGain) {
      for (auto sub : {kDeltaDqual, kDeltaDintrp, kDeltaDcrit}) plan_for(id, std::string(sub));
      continue;
    }
    if (!is_scored(in)) continue;
    for (const auto& [sid, members] : in.subscales) {
      const bool any_likert = std::any_of(members.begin(), members.end(), [&](const auto& m) {
        const Item* item = in.find_item(m);
        return item && item->kind == ResponseKind::Likert;
      });
      if (any_likert) plan_for(id, sid);
    }
  }
  return plan;
}

BandResult benchmark_band(double mean, const BandSet& bands) {
  const auto& cuts = bands.cuts;
  if (bands.labels.empty() || cuts.size() != bands.labels.size() + 1) {
    throw ContractError("benchmark_band: need labels.size() + 1 cut-points");
  }
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    if (!(cuts[i - 1] < cuts[i])) throw ContractError("benchmark_band: cuts not increasing");
  }
  BandResult out;
  if (mean < cuts.front()) {
    out.label = bands.labels.front();
    out.clamped = true;
    out.method_note = "below the lowest band; clamped";
    return out;
  }
  if (mean >= cuts.back()) {
    out.label = bands.labels.back();
    out.clamped = true;
    out.method_note = "at or above the highest cut-point; clamped";
    return out;
  }
  // First cut strictly greater than mean closes the containing band.
  auto it = std::upper_bound(cuts.begin(), cuts.end(), mean);
  out.label = bands.labels[static_cast<std::size_t>(it - cuts.begin()) - 1];
  return out;
}

BandResult benchmark_band(const DimensionScore& score, const BandSet& bands) {
  return benchmark_band(score.mean, bands);
}

}  // namespace iecsi
