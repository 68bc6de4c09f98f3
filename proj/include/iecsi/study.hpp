#pragma once

#include <string>
#include <vector>

#include "iecsi/instruments.hpp"
#include "iecsi/model.hpp"

namespace iecsi {

// Everything persisted for one study.
struct Study {
  StudyDesign design;
  InstrumentRegistry registry = builtin_registry();
  std::vector<Participant> participants;
  std::vector<Session> sessions;
  std::vector<AnalystAnnotation> annotations;

  const Session* find_session(std::string_view session_id) const;
  Session* find_session(std::string_view session_id);
  const Instrument* find_instrument(std::string_view instrument_id) const;
  bool operator==(const Study&) const = default;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Checks every domain invariant. Never throws for bad data; violations
// are returned sorted so the result does not depend on session order.
ValidationReport validate_study(const StudyDesign& design, const std::vector<Session>& sessions,
                                const InstrumentRegistry& registry = builtin_registry());

ValidationReport validate_study(const Study& study);

}  // namespace iecsi
