#include "iecsi/scoring.hpp"

#include <cmath>
#include <set>

#include "iecsi/errors.hpp"

namespace iecsi {

namespace {

const Item& require_item(const ItemResponse& r, const Instrument& instrument) {
  if (r.instrument_id != instrument.instrument_id) {
    throw ContractError("response for " + r.instrument_id + " passed to " +
                        instrument.instrument_id);
  }
  const Item* item = instrument.find_item(r.item_id);
  if (!item) throw ContractError("unknown item " + instrument.instrument_id + "/" + r.item_id);
  return *item;
}

struct Acc {
  double sum = 0.0;
  int count = 0;
  double mean() const { return sum / count; }
};

}  // namespace

bool is_scored(const Instrument& instrument) {
  for (const auto& item : instrument.items) {
    if (item.kind == ResponseKind::Likert) return true;
  }
  return false;
}

std::map<std::string, double> item_means(std::span<const ItemResponse> responses,
                                         const Instrument& instrument) {
  std::map<std::string, Acc> acc;
  for (const auto& r : responses) {
    require_item(r, instrument);
    auto& a = acc[r.item_id];
    a.sum += r.value;
    ++a.count;
  }
  std::map<std::string, double> out;
  for (const auto& [id, a] : acc) out.emplace(id, a.mean());
  return out;
}

double center_ueq(int value) {
  if (value < 1 || value > 7) {
    throw ContractError("UEQ-S value " + std::to_string(value) + " outside 1..7");
  }
  return value - 4.0;
}

double transformed_value(int value, const Item& item, const Instrument& instrument,
                         const AnalysisConfig& config) {
  if (value < config.scale_min || value > config.scale_max) {
    throw ContractError("value " + std::to_string(value) + " outside scale");
  }
  double v = item.reverse_coded ? config.scale_min + config.scale_max - value : value;
  if (instrument.scoring_transform == ScoringTransform::Centered) v -= config.midpoint();
  return v;
}

std::vector<DimensionScore> subscale_scores(std::span<const ParticipantResponses> responses,
                                            const Instrument& instrument,
                                            const AnalysisConfig& config) {
  // participant -> item -> transformed value
  std::map<std::string, std::map<std::string, double>> values;
  std::map<std::string, Acc> items;
  for (const auto& p : responses) {
    auto& row = values[p.participant_id];
    for (const auto& r : p.responses) {
      const Item& item = require_item(r, instrument);
      if (item.kind != ResponseKind::Likert) {
        throw ContractError("item " + item.item_id + " does not take Likert responses");
      }
      const double v = transformed_value(r.value, item, instrument, config);
      if (!row.emplace(r.item_id, v).second) {
        throw ContractError("participant " + p.participant_id + " answered " + r.item_id +
                            " twice");
      }
      auto& a = items[r.item_id];
      a.sum += v;
      ++a.count;
    }
  }

  std::vector<DimensionScore> out;
  for (const auto& [subscale_id, members] : instrument.subscales) {
    std::vector<std::string> likert;
    for (const auto& m : members) {
      const Item* item = instrument.find_item(m);
      if (item && item->kind == ResponseKind::Likert) likert.push_back(m);
    }
    if (likert.empty()) continue;

    DimensionScore score;
    score.instrument_id = instrument.instrument_id;
    score.subscale_id = subscale_id;
    bool complete = true;
    for (const auto& m : likert) {
      auto it = items.find(m);
      if (it == items.end()) {
        complete = false;
        continue;
      }
      score.per_item_means.emplace(m, it->second.mean());
    }
    if (score.per_item_means.empty()) {
      throw DomainError("empty subscale " + instrument.instrument_id + "/" + subscale_id);
    }
    if (!complete) continue;

    double sum = 0.0;
    for (const auto& m : likert) sum += score.per_item_means.at(m);
    score.mean = sum / static_cast<double>(likert.size());

    for (const auto& [pid, row] : values) {
      Acc a;
      for (const auto& m : likert) {
        if (auto it = row.find(m); it != row.end()) {
          a.sum += it->second;
          ++a.count;
        }
      }
      if (a.count > 0) score.per_participant.emplace(pid, a.mean());
    }
    score.n = static_cast<int>(score.per_participant.size());
    if (score.n >= 2) {
      double m = 0.0;
      for (const auto& [pid, v] : score.per_participant) m += v;
      m /= score.n;
      double ss = 0.0;
      for (const auto& [pid, v] : score.per_participant) ss += (v - m) * (v - m);
      score.sd = std::sqrt(ss / (score.n - 1));
    }
    out.push_back(std::move(score));
  }
  return out;
}

double docs_viewed_average(std::span<const Session> sessions) {
  if (sessions.empty()) throw DomainError("no sessions");
  const std::string& condition = sessions.front().condition_id;
  double sum = 0.0;
  for (const auto& s : sessions) {
    if (s.condition_id != condition) {
      throw ContractError("docs_viewed_average: sessions span several conditions");
    }
    sum += s.docs_viewed;
  }
  return sum / static_cast<double>(sessions.size());
}

}  // namespace iecsi
