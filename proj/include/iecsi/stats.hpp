#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iecsi/instruments.hpp"
#include "iecsi/model.hpp"
#include "iecsi/scoring.hpp"

namespace iecsi {

struct EffectSize {
  std::string kind;  // "cohen_d" or "rank_biserial"
  double value = 0.0;
};

struct StatTestResult {
  std::string test;
  double statistic = 0.0;
  double p_value = 1.0;
  std::optional<double> df;
  // Supplementary descriptive effect size; not used for any decision.
  std::optional<EffectSize> effect_size;
  bool significant = false;
  int n = 0;
  std::string method_note;
};

// Differences d = x - y; t = mean(d) / (sd(d) / sqrt(n)), df = n - 1.
// Throws ContractError for n < 2 or unequal lengths and
// DomainError("zero-variance differences") when sd(d) = 0.
StatTestResult paired_t_test(std::span<const double> x, std::span<const double> y,
                             double alpha);

// Wilcoxon signed-rank on x - y with zero differences dropped. Exact
// two-sided p over all 2^n sign assignments when the effective n is at
// most config.exact_test_cutoff, otherwise the tie-corrected normal
// approximation with continuity correction. Statistic is W+.
StatTestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                    const AnalysisConfig& config);

StatTestResult one_sample_t_test(std::span<const double> sample, double mu, double alpha);

// Welch's unequal-variance t test of a sample against reference summary
// statistics, with Welch-Satterthwaite degrees of freedom.
StatTestResult welch_t_test(std::span<const double> sample, const ReferenceStats& reference,
                            double alpha);

// Mann-Whitney U; statistic is U for x (pairs with x > y, ties half).
// Exact when n_x + n_y <= cutoff and there are no ties.
StatTestResult mann_whitney_u(std::span<const double> x, std::span<const double> y,
                              const AnalysisConfig& config);

enum class TestKind { PairedT, Wilcoxon, OneSampleT, Welch, MannWhitney };

std::string_view to_string(TestKind k);

struct PlannedTests {
  std::string instrument_id;
  std::string subscale_id;
  std::vector<TestKind> tests;
};

struct TestPlan {
  StudyMode mode = StudyMode::Comparative;
  std::vector<PlannedTests> entries;
};

// Subscale ids under which knowledge-gain deltas are tested.
inline constexpr std::string_view kDeltaDqual = "delta_dqual";
inline constexpr std::string_view kDeltaDintrp = "delta_dintrp";
inline constexpr std::string_view kDeltaDcrit = "delta_dcrit";

// Comparative designs get the dependent pair (paired t, Wilcoxon) for every
// scored subscale; benchmark-only designs get one-sample / Welch /
// Mann-Whitney tests for subscales the benchmark covers. Throws
// ContractError for a benchmark-only design without a benchmark.
TestPlan build_test_plan(const StudyDesign& design, const InstrumentRegistry& registry);

struct BandResult {
  std::string label;
  bool clamped = false;
  std::string method_note;
};

// Label of the half-open band [cut_i, cut_{i+1}) containing the mean; a mean
// outside all bands is clamped to the nearest end label and noted.
BandResult benchmark_band(double mean, const BandSet& bands);
BandResult benchmark_band(const DimensionScore& score, const BandSet& bands);

}  // namespace iecsi
