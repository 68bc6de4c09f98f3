#include "iecsi/qualitative.hpp"

#include <algorithm>

namespace iecsi {

std::string_view to_string(Sentiment s) {
  switch (s) {
    case Sentiment::Positive: return "positive";
    case Sentiment::Neutral: return "neutral";
    case Sentiment::Negative: return "negative";
  }
  return "?";
}

std::optional<Sentiment> parse_sentiment(std::string_view s) {
  if (s == "positive") return Sentiment::Positive;
  if (s == "neutral") return Sentiment::Neutral;
  if (s == "negative") return Sentiment::Negative;
  return std::nullopt;
}

std::string_view colour_of(Sentiment s) {
  switch (s) {
    case Sentiment::Positive: return "green";
    case Sentiment::Neutral: return "yellow";
    case Sentiment::Negative: return "red";
  }
  return "?";
}

Sentiment annotate_mean(double mean, const AnalysisConfig& config) {
  if (!(mean >= config.scale_min && mean <= config.scale_max)) {
    throw ContractError("annotate_mean: mean " + std::to_string(mean) + " outside scale");
  }
  if (mean > config.neutral_high) return Sentiment::Positive;
  if (mean < config.neutral_low) return Sentiment::Negative;
  return Sentiment::Neutral;
}

std::vector<SectionTally> tally_sections(std::span<const Annotation> annotations,
                                         const std::map<std::string, std::string>& section_of) {
  std::vector<std::string> unmapped;
  std::map<std::string, SectionTally> by_section;
  for (const auto& [target, section] : section_of) by_section[section].section = section;
  for (const auto& a : annotations) {
    auto it = section_of.find(a.target);
    if (it == section_of.end()) {
      unmapped.push_back(a.target);
      continue;
    }
    auto& t = by_section[it->second];
    switch (a.sentiment) {
      case Sentiment::Positive: ++t.positive; break;
      case Sentiment::Neutral: ++t.neutral; break;
      case Sentiment::Negative: ++t.negative; break;
    }
  }
  if (!unmapped.empty()) {
    std::sort(unmapped.begin(), unmapped.end());
    std::string msg = "targets without a section:";
    for (const auto& t : unmapped) msg += " " + t;
    throw ContractError(msg);
  }
  int worst = 0;
  for (const auto& [name, t] : by_section) worst = std::max(worst, t.negative);
  std::vector<SectionTally> out;
  for (auto& [name, t] : by_section) {
    t.flagged_for_improvement = worst > 0 && t.negative == worst;
    out.push_back(t);
  }
  return out;
}

namespace detail {

double kappa_from_codes(std::span<const std::size_t> a, std::span<const std::size_t> b,
                        std::size_t categories) {
  // kappa = (n * agree - sum_k row_k col_k) / (n^2 - sum_k row_k col_k),
  // which is (p_o - p_e) / (1 - p_e) scaled by n^2, evaluated in integers.
  std::vector<std::uint64_t> row(categories, 0), col(categories, 0);
  std::uint64_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++row[a[i]];
    ++col[b[i]];
    if (a[i] == b[i]) ++agree;
  }
  const std::uint64_t n = a.size();
  std::uint64_t chance = 0;
  for (std::size_t k = 0; k < categories; ++k) chance += row[k] * col[k];
  const std::uint64_t total = n * n;
  if (chance == total) throw DomainError("kappa undefined");
  const double num = static_cast<double>(n * agree) - static_cast<double>(chance);
  return num / static_cast<double>(total - chance);
}

}  // namespace detail

GateDecision kappa_gate(double kappa, const AnalysisConfig& config) {
  return kappa >= config.kappa_threshold ? GateDecision::Accept : GateDecision::ReAnnotate;
}

}  // namespace iecsi
