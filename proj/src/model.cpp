#include "iecsi/model.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace iecsi {

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::pair<E, std::string_view>, N>& table,
                        std::string_view s) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E e) {
  for (const auto& [value, name] : table) {
    if (value == e) return name;
  }
  return "?";
}

constexpr std::array<std::pair<StudyMode, std::string_view>, 2> kModes{{
    {StudyMode::Comparative, "comparative"},
    {StudyMode::BenchmarkOnly, "benchmark_only"},
}};
constexpr std::array<std::pair<InterfaceKind, std::string_view>, 2> kKinds{{
    {InterfaceKind::Conversational, "conversational"},
    {InterfaceKind::Conventional, "conventional"},
}};
constexpr std::array<std::pair<Phase, std::string_view>, 2> kPhases{{
    {Phase::Pre, "pre"},
    {Phase::Post, "post"},
}};
constexpr std::array<std::pair<SessionState, std::string_view>, 5> kStates{{
    {SessionState::Created, "created"},
    {SessionState::PreDone, "pre_done"},
    {SessionState::TaskDone, "task_done"},
    {SessionState::PostDone, "post_done"},
    {SessionState::Closed, "closed"},
}};

}  // namespace

std::string_view to_string(StudyMode m) { return name_of(kModes, m); }
std::string_view to_string(InterfaceKind k) { return name_of(kKinds, k); }
std::string_view to_string(Phase p) { return name_of(kPhases, p); }
std::string_view to_string(SessionState s) { return name_of(kStates, s); }

std::optional<StudyMode> parse_study_mode(std::string_view s) { return lookup(kModes, s); }
std::optional<InterfaceKind> parse_interface_kind(std::string_view s) {
  return lookup(kKinds, s);
}
std::optional<Phase> parse_phase(std::string_view s) { return lookup(kPhases, s); }
std::optional<SessionState> parse_session_state(std::string_view s) {
  return lookup(kStates, s);
}

std::vector<std::string> check_config(const AnalysisConfig& c) {
  std::vector<std::string> out;
  if (!(c.scale_min < c.scale_max)) out.emplace_back("config: scale_min must be < scale_max");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) out.emplace_back("config: alpha must be in (0, 1)");
  if (!(c.neutral_low <= c.neutral_high) || c.neutral_low < c.scale_min ||
      c.neutral_high > c.scale_max) {
    out.emplace_back("config: neutral band must lie inside the scale");
  }
  if (!(c.kappa_threshold >= -1.0 && c.kappa_threshold <= 1.0)) {
    out.emplace_back("config: kappa_threshold must be in [-1, 1]");
  }
  // 2^cutoff sign assignments are counted in 64-bit integers.
  if (c.exact_test_cutoff < 0 || c.exact_test_cutoff > 60) {
    out.emplace_back("config: exact_test_cutoff must be in [0, 60]");
  }
  return out;
}

std::string subscale_key(std::string_view instrument_id, std::string_view subscale_id) {
  std::string key(instrument_id);
  key += '/';
  key += subscale_id;
  return key;
}

std::vector<std::string> check_benchmark(const BenchmarkSpec& b) {
  std::vector<std::string> out;
  for (const auto& [key, e] : b.entries) {
    if (e.stats) {
      if (e.stats->n < 2) out.push_back("benchmark " + key + ": n must be >= 2 when sd is given");
      if (!(e.stats->sd >= 0.0)) out.push_back("benchmark " + key + ": sd must be >= 0");
    }
    if (e.sample && e.sample->empty()) out.push_back("benchmark " + key + ": empty sample");
    if (e.bands) {
      const auto& cuts = e.bands->cuts;
      if (cuts.size() != e.bands->labels.size() + 1 || e.bands->labels.empty()) {
        out.push_back("benchmark " + key + ": bands need labels.size() + 1 cut-points");
      }
      for (std::size_t i = 1; i < cuts.size(); ++i) {
        if (!(cuts[i - 1] < cuts[i])) {
          out.push_back("benchmark " + key + ": band cut-points must be strictly increasing");
          break;
        }
      }
    }
    if (!e.mu && !e.stats && !e.sample && !e.bands) {
      out.push_back("benchmark " + key + ": entry has no reference data");
    }
  }
  return out;
}

}  // namespace iecsi
