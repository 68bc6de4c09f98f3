#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iecsi/errors.hpp"
#include "iecsi/model.hpp"

namespace iecsi {

enum class Sentiment { Positive, Neutral, Negative };

std::string_view to_string(Sentiment s);
std::optional<Sentiment> parse_sentiment(std::string_view s);
// Presentation colour: green, yellow, red.
std::string_view colour_of(Sentiment s);

struct Annotation {
  std::string target;
  Sentiment sentiment = Sentiment::Neutral;
  double mean = 0.0;
};

struct SectionTally {
  std::string section;
  int positive = 0;
  int neutral = 0;
  int negative = 0;
  bool flagged_for_improvement = false;
};

// mean > neutral_high -> Positive, mean < neutral_low -> Negative, the
// closed band in between -> Neutral. Throws ContractError off-scale.
Sentiment annotate_mean(double mean, const AnalysisConfig& config);

// Counts sentiments per section (sections ordered by name). Sections with
// the largest nonzero Negative count are flagged; ties flag all of them.
// Throws ContractError listing any target missing from `section_of`.
std::vector<SectionTally> tally_sections(std::span<const Annotation> annotations,
                                         const std::map<std::string, std::string>& section_of);

namespace detail {
// Unweighted Cohen's kappa from integer category codes.
double kappa_from_codes(std::span<const std::size_t> a, std::span<const std::size_t> b,
                        std::size_t categories);
}  // namespace detail

// Unweighted Cohen's kappa for two aligned rating lists. Throws
// ContractError on empty or unequal input and DomainError("kappa
// undefined") when chance agreement is 1.
template <typename T>
double cohen_kappa(std::span<const T> a, std::span<const T> b) {
  if (a.empty() || a.size() != b.size()) {
    throw ContractError("cohen_kappa: rating lists must be nonempty and of equal length");
  }
  std::map<T, std::size_t> index;
  for (const auto& v : a) index.emplace(v, 0);
  for (const auto& v : b) index.emplace(v, 0);
  std::size_t next = 0;
  for (auto& [value, code] : index) code = next++;
  std::vector<std::size_t> ca, cb;
  ca.reserve(a.size());
  cb.reserve(b.size());
  for (const auto& v : a) ca.push_back(index.at(v));
  for (const auto& v : b) cb.push_back(index.at(v));
  return detail::kappa_from_codes(ca, cb, index.size());
}

template <typename T>
double cohen_kappa(const std::vector<T>& a, const std::vector<T>& b) {
  return cohen_kappa(std::span<const T>(a), std::span<const T>(b));
}

enum class GateDecision { Accept, ReAnnotate };

GateDecision kappa_gate(double kappa, const AnalysisConfig& config);

}  // namespace iecsi
