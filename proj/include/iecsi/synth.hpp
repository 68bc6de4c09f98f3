#pragma once

#include <cstdint>

#include "iecsi/study.hpp"

namespace iecsi {

struct SynthOptions {
  int participants = 12;
  StudyMode mode = StudyMode::Comparative;
  // Separation of the two condition means on the favourable 1..7 scale; the
  // conversational condition is shifted up by E/2, the conventional one down.
  double effect = 0.0;
  std::uint64_t seed = 1;
};

// Deterministic synthetic study: the same options give the same study, and
// therefore the same bundle bytes. Every session is complete, summaries
// are rated identically by two annotators, and a benchmark is attached in
// benchmark-only mode. Throws ContractError for fewer than 2 participants.
Study synthesize(const SynthOptions& options);

}  // namespace iecsi
