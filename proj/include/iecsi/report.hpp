#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iecsi/knowledge_gain.hpp"
#include "iecsi/qualitative.hpp"
#include "iecsi/scoring.hpp"
#include "iecsi/stats.hpp"
#include "iecsi/study.hpp"

namespace iecsi {

inline constexpr std::string_view kReportVersion = "iecsi-report/1";

struct ScoredSubscale {
  DimensionScore score;
  Annotation annotation;
  std::optional<BandResult> band;
};

struct ScoredItem {
  std::string item_id;
  double mean = 0.0;
  Annotation annotation;
};

struct InstrumentScores {
  std::string instrument_id;
  Segment segment = Segment::Exploration;
  std::string section;
  std::vector<ScoredSubscale> subscales;
  std::vector<ScoredItem> items;
};

struct ConditionReport {
  InterfaceCondition condition;
  int sessions = 0;
  std::vector<InstrumentScores> instruments;
  std::vector<SectionTally> sections;
  std::optional<double> docs_viewed_average;
  std::optional<ConditionGain> knowledge_gain;
};

struct TestOutcome {
  std::string instrument_id;
  std::string subscale_id;
  // "<x> - <y>" for paired comparisons, "vs benchmark" otherwise.
  std::string comparison;
  std::vector<StatTestResult> results;
  // Tests from the plan that could not be computed, with the reason.
  std::vector<std::pair<std::string, std::string>> not_computed;
  // Parametric and nonparametric results disagree at alpha.
  bool disagreement = false;
};

struct AnalystAgreement {
  std::vector<std::string> annotators;
  int paired_targets = 0;
  std::optional<double> kappa;
  bool accepted = false;
};

struct AnalysisReport {
  std::string version{kReportVersion};
  std::string study_id;
  StudyMode mode = StudyMode::Comparative;
  AnalysisConfig config;
  std::vector<ConditionReport> conditions;
  std::vector<TestOutcome> tests;
  std::optional<StudyAgreement> summary_agreement;
  bool kappa_gate_waived = false;
  std::optional<AnalystAgreement> analyst_agreement;
  bool incomplete = false;
  std::vector<std::string> excluded_sessions;
};

struct AnalyzeOptions {
  // Exclude sessions whose summaries lack two ratings instead of failing,
  // and flag the report incomplete.
  bool allow_incomplete = false;
};

// Scoring, qualitative annotation, significance tests and knowledge gain
// over every session that reached the post-search questionnaire. Sessions
// still in progress are excluded and the report is flagged incomplete.
// Throws ValidationError for an invalid or empty study, GateError when
// summary agreement is below the threshold (unless waived) and DomainError /
// ContractError for data the pipeline cannot score.
AnalysisReport analyze(const Study& study, const AnalyzeOptions& options = {});

enum class ReportFormat { Structured, Markdown };

std::string render(const AnalysisReport& report, ReportFormat format);

// Number of annotations a report carries (subscales plus items, summed over
// conditions).
std::size_t annotation_count(const AnalysisReport& report);

}  // namespace iecsi
