#pragma once

// Shared domain types for a conversational-search user study.

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iecsi {

enum class StudyMode { Comparative, BenchmarkOnly };
enum class InterfaceKind { Conversational, Conventional };
enum class Phase { Pre, Post };
enum class SessionState { Created, PreDone, TaskDone, PostDone, Closed };

std::string_view to_string(StudyMode m);
std::string_view to_string(InterfaceKind k);
std::string_view to_string(Phase p);
std::string_view to_string(SessionState s);

std::optional<StudyMode> parse_study_mode(std::string_view s);
std::optional<InterfaceKind> parse_interface_kind(std::string_view s);
std::optional<Phase> parse_phase(std::string_view s);
std::optional<SessionState> parse_session_state(std::string_view s);

struct InterfaceCondition {
  std::string condition_id;
  InterfaceKind kind = InterfaceKind::Conversational;
  std::string label;
  bool operator==(const InterfaceCondition&) const = default;
};

struct Participant {
  std::string participant_id;
  std::map<std::string, std::string> demographics;
  bool operator==(const Participant&) const = default;
};

struct ItemResponse {
  std::string instrument_id;
  std::string item_id;
  int value = 0;
  std::string timestamp;
  bool operator==(const ItemResponse&) const = default;
};

// Dqual 0..3, Dintrp 0..2, Dcrit 0..1.
struct SummaryRating {
  std::string annotator_id;
  int dqual = 0;
  int dintrp = 0;
  int dcrit = 0;
  bool operator==(const SummaryRating&) const = default;
};

inline constexpr int kDqualMax = 3;
inline constexpr int kDintrpMax = 2;
inline constexpr int kDcritMax = 1;

struct SummaryDocument {
  std::string summary_id;
  Phase phase = Phase::Pre;
  std::string text;
  std::vector<SummaryRating> ratings;
  bool operator==(const SummaryDocument&) const = default;
};

struct Session {
  std::string session_id;
  std::string participant_id;
  std::string condition_id;
  std::string topic;
  std::vector<ItemResponse> pre_responses;
  std::vector<ItemResponse> post_responses;
  std::optional<SummaryDocument> pre_summary;
  std::optional<SummaryDocument> post_summary;
  int docs_viewed = 0;
  SessionState state = SessionState::Created;
  bool operator==(const Session&) const = default;
};

struct AnalysisConfig {
  double alpha = 0.05;
  double kappa_threshold = 0.85;
  int scale_min = 1;
  int scale_max = 7;
  double neutral_low = 2.0;
  double neutral_high = 4.0;
  int exact_test_cutoff = 12;
  // Skip the inter-rater gate for knowledge gain; the report records it.
  bool waive_kappa_gate = false;

  double midpoint() const { return (scale_min + scale_max) / 2.0; }
  bool operator==(const AnalysisConfig&) const = default;
};

// Returns the violated config invariants; empty when valid.
std::vector<std::string> check_config(const AnalysisConfig& c);

struct ReferenceStats {
  double mean = 0.0;
  double sd = 0.0;
  int n = 0;
  bool operator==(const ReferenceStats&) const = default;
};

// cuts has labels.size() + 1 strictly increasing entries; band i is
// [cuts[i], cuts[i+1]).
struct BandSet {
  std::vector<double> cuts;
  std::vector<std::string> labels;
  bool operator==(const BandSet&) const = default;
};

// Reference data for one subscale. Any combination may be present.
struct BenchmarkEntry {
  std::optional<double> mu;
  std::optional<ReferenceStats> stats;
  std::optional<std::vector<double>> sample;
  std::optional<BandSet> bands;
  bool operator==(const BenchmarkEntry&) const = default;
};

// Keyed by "<instrument_id>/<subscale_id>".
struct BenchmarkSpec {
  std::map<std::string, BenchmarkEntry> entries;
  bool operator==(const BenchmarkSpec&) const = default;
};

std::string subscale_key(std::string_view instrument_id, std::string_view subscale_id);

std::vector<std::string> check_benchmark(const BenchmarkSpec& b);

struct StudyDesign {
  std::string study_id;
  StudyMode mode = StudyMode::Comparative;
  std::vector<InterfaceCondition> conditions;
  std::vector<std::string> instruments;
  AnalysisConfig analysis;
  // File name of the benchmark document inside the study bundle.
  std::optional<std::string> benchmark_ref;
  std::optional<BenchmarkSpec> benchmark;
  bool operator==(const StudyDesign&) const = default;
};

// Free-form qualitative label assigned by an analyst to one target
// (an item or subscale) under one condition.
struct AnalystAnnotation {
  std::string condition_id;
  std::string target_id;
  std::string annotator_id;
  std::string sentiment;
  bool operator==(const AnalystAnnotation&) const = default;
};

}  // namespace iecsi
