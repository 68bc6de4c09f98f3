#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "iecsi/instruments.hpp"
#include "iecsi/model.hpp"

namespace iecsi {

struct DimensionScore {
  std::string instrument_id;
  std::string subscale_id;
  double mean = 0.0;
  // Sample sd (n - 1) over per-participant subscale scores; 0 when n < 2.
  double sd = 0.0;
  int n = 0;
  std::map<std::string, double> per_item_means;
  // Participant id -> that participant's subscale score (mean over the
  // member items they answered). Feeds the paired tests.
  std::map<std::string, double> per_participant;
};

struct ParticipantResponses {
  std::string participant_id;
  std::vector<ItemResponse> responses;
};

// Raw arithmetic mean per item over all responses. Items nobody answered
// are absent. Throws ContractError if a response belongs to another
// instrument or names an unknown item.
std::map<std::string, double> item_means(std::span<const ItemResponse> responses,
                                         const Instrument& instrument);

// Scores every subscale of a Likert instrument. Reverse-coded items are
// flipped about the scale midpoint and Centered instruments are shifted so
// the midpoint maps to 0. A subscale is reported only when every Likert
// member has at least one response; one with no responses at all throws
// DomainError("empty subscale ...").
std::vector<DimensionScore> subscale_scores(std::span<const ParticipantResponses> responses,
                                            const Instrument& instrument,
                                            const AnalysisConfig& config);

// UEQ-S centering on the 1..7 scale: value - 4.
double center_ueq(int value);

// Scale-generic form of the per-response transform used by subscale_scores.
double transformed_value(int value, const Item& item, const Instrument& instrument,
                         const AnalysisConfig& config);

// Mean docs_viewed over sessions of a single condition.
double docs_viewed_average(std::span<const Session> sessions);

// True when the instrument carries at least one Likert item.
bool is_scored(const Instrument& instrument);

}  // namespace iecsi
