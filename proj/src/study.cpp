#include "iecsi/study.hpp"

#include <algorithm>
#include <set>

namespace iecsi {

const Session* Study::find_session(std::string_view session_id) const {
  auto it = std::find_if(sessions.begin(), sessions.end(),
                         [&](const Session& s) { return s.session_id == session_id; });
  return it == sessions.end() ? nullptr : &*it;
}

Session* Study::find_session(std::string_view session_id) {
  auto it = std::find_if(sessions.begin(), sessions.end(),
                         [&](const Session& s) { return s.session_id == session_id; });
  return it == sessions.end() ? nullptr : &*it;
}

const Instrument* Study::find_instrument(std::string_view instrument_id) const {
  auto it = registry.find(instrument_id);
  return it == registry.end() ? nullptr : &it->second;
}

namespace {

void check_responses(const Session& s, Phase phase, const std::vector<ItemResponse>& responses,
                     const StudyDesign& design, const InstrumentRegistry& registry,
                     std::vector<std::string>& out) {
  const std::string where = "session " + s.session_id + " " + std::string(to_string(phase));
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : responses) {
    const std::string tag = where + " " + r.instrument_id + "/" + r.item_id;
    if (std::find(design.instruments.begin(), design.instruments.end(), r.instrument_id) ==
        design.instruments.end()) {
      out.push_back(tag + ": instrument not part of the study");
    }
    auto it = registry.find(r.instrument_id);
    if (it == registry.end()) {
      out.push_back(tag + ": unknown instrument");
      continue;
    }
    const Item* item = it->second.find_item(r.item_id);
    if (!item) {
      out.push_back(tag + ": unknown item");
      continue;
    }
    if (item->kind != ResponseKind::Likert) {
      out.push_back(tag + ": item does not take Likert responses");
    }
    if (item->phase != phase) out.push_back(tag + ": item belongs to the other phase");
    if (r.value < design.analysis.scale_min || r.value > design.analysis.scale_max) {
      out.push_back(tag + ": value out of scale (" + std::to_string(r.value) + ")");
    }
    if (!seen.emplace(r.instrument_id, r.item_id).second) {
      out.push_back(tag + ": duplicate response");
    }
  }
}

void check_summary(const Session& s, const std::optional<SummaryDocument>& doc, Phase phase,
                   std::vector<std::string>& out) {
  if (!doc) return;
  const std::string where = "session " + s.session_id + " summary " + doc->summary_id;
  if (doc->phase != phase) out.push_back(where + ": phase mismatch");
  std::set<std::string> annotators;
  for (const auto& r : doc->ratings) {
    if (!annotators.insert(r.annotator_id).second) {
      out.push_back(where + ": more than one rating by annotator " + r.annotator_id);
    }
    if (r.dqual < 0 || r.dqual > kDqualMax) out.push_back(where + ": dqual out of range");
    if (r.dintrp < 0 || r.dintrp > kDintrpMax) out.push_back(where + ": dintrp out of range");
    if (r.dcrit < 0 || r.dcrit > kDcritMax) out.push_back(where + ": dcrit out of range");
  }
}

}  // namespace

ValidationReport validate_study(const StudyDesign& design, const std::vector<Session>& sessions,
                                const InstrumentRegistry& registry) {
  std::vector<std::string> out;
  if (design.study_id.empty()) out.emplace_back("study_id must be non-empty");

  const std::size_t want = design.mode == StudyMode::Comparative ? 2 : 1;
  if (design.conditions.size() != want) {
    out.push_back("condition count: " + std::string(to_string(design.mode)) + " needs " +
                  std::to_string(want) + ", got " + std::to_string(design.conditions.size()));
  }
  std::set<std::string> condition_ids;
  for (const auto& c : design.conditions) {
    if (c.condition_id.empty()) out.emplace_back("condition_id must be non-empty");
    if (!condition_ids.insert(c.condition_id).second) {
      out.push_back("duplicate condition_id " + c.condition_id);
    }
  }
  std::set<std::string> instruments;
  for (const auto& id : design.instruments) {
    if (!registry.count(id)) out.push_back("unknown instrument " + id);
    if (!instruments.insert(id).second) out.push_back("duplicate instrument " + id);
  }
  for (auto& v : check_config(design.analysis)) out.push_back(std::move(v));
  if (design.benchmark) {
    for (auto& v : check_benchmark(*design.benchmark)) out.push_back(std::move(v));
  }

  std::set<std::string> session_ids;
  std::set<std::string> summary_ids;
  std::set<std::pair<std::string, std::string>> participant_condition;
  for (const auto& s : sessions) {
    if (!session_ids.insert(s.session_id).second) {
      out.push_back("duplicate session_id " + s.session_id);
    }
    if (!condition_ids.count(s.condition_id)) {
      out.push_back("session " + s.session_id + ": unknown condition_id " + s.condition_id);
    }
    if (!participant_condition.emplace(s.participant_id, s.condition_id).second) {
      out.push_back("participant " + s.participant_id + " has more than one session under " +
                    s.condition_id);
    }
    if (s.docs_viewed < 0) out.push_back("session " + s.session_id + ": negative docs_viewed");
    check_responses(s, Phase::Pre, s.pre_responses, design, registry, out);
    check_responses(s, Phase::Post, s.post_responses, design, registry, out);
    check_summary(s, s.pre_summary, Phase::Pre, out);
    check_summary(s, s.post_summary, Phase::Post, out);
    for (const auto* doc : {&s.pre_summary, &s.post_summary}) {
      if (*doc && !summary_ids.insert((*doc)->summary_id).second) {
        out.push_back("duplicate summary_id " + (*doc)->summary_id);
      }
    }
    if (s.state < SessionState::TaskDone && (!s.post_responses.empty() || s.post_summary)) {
      out.push_back("session " + s.session_id + ": post-search data before task completion");
    }
  }
  std::sort(out.begin(), out.end());
  return {std::move(out)};
}

ValidationReport validate_study(const Study& study) {
  ValidationReport report = validate_study(study.design, study.sessions, study.registry);
  auto& out = report.violations;
  std::set<std::string> participants;
  for (const auto& p : study.participants) {
    if (!participants.insert(p.participant_id).second) {
      out.push_back("duplicate participant_id " + p.participant_id);
    }
  }
  for (const auto& s : study.sessions) {
    if (!participants.count(s.participant_id)) {
      out.push_back("session " + s.session_id + ": unknown participant_id " + s.participant_id);
    }
  }
  std::set<std::string> conditions;
  for (const auto& c : study.design.conditions) conditions.insert(c.condition_id);
  for (const auto& a : study.annotations) {
    if (!conditions.count(a.condition_id)) {
      out.push_back("annotation " + a.target_id + ": unknown condition_id " + a.condition_id);
    }
    if (a.sentiment != "positive" && a.sentiment != "neutral" && a.sentiment != "negative") {
      out.push_back("annotation " + a.target_id + ": unknown sentiment " + a.sentiment);
    }
  }
  for (const auto& [id, in] : study.registry) {
    for (auto& v : check_instrument(in)) out.push_back(std::move(v));
  }
  std::sort(out.begin(), out.end());
  return report;
}

}  // namespace iecsi
