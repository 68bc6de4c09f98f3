#include "iecsi/knowledge_gain.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "iecsi/errors.hpp"
#include "iecsi/qualitative.hpp"

namespace iecsi {

namespace {

constexpr std::array<const char*, 3> kDimensions{"dqual", "dintrp", "dcrit"};

int score_of(const SummaryRating& r, std::string_view dim) {
  if (dim == "dqual") return r.dqual;
  if (dim == "dintrp") return r.dintrp;
  return r.dcrit;
}

std::vector<SummaryRating> sorted_pair(std::span<const SummaryRating> ratings) {
  std::vector<SummaryRating> v(ratings.begin(), ratings.end());
  std::sort(v.begin(), v.end(), [](const SummaryRating& a, const SummaryRating& b) {
    return a.annotator_id < b.annotator_id;
  });
  return v;
}

bool has_two_ratings(const std::optional<SummaryDocument>& doc) {
  if (!doc || doc->ratings.size() != 2) return false;
  return doc->ratings[0].annotator_id != doc->ratings[1].annotator_id;
}

}  // namespace

StudyAgreement summary_agreement(std::span<const Session> sessions, const AnalysisConfig& config) {
  StudyAgreement out;
  std::map<std::string, std::pair<std::vector<int>, std::vector<int>>> lists;
  std::set<std::string> annotators;
  for (const auto& s : sessions) {
    for (const auto* doc : {&s.pre_summary, &s.post_summary}) {
      if (!*doc) continue;
      for (const auto& r : (*doc)->ratings) annotators.insert(r.annotator_id);
      if (!has_two_ratings(*doc)) continue;
      const auto pair = sorted_pair((*doc)->ratings);
      ++out.doubly_rated;
      for (const char* dim : kDimensions) {
        lists[dim].first.push_back(score_of(pair[0], dim));
        lists[dim].second.push_back(score_of(pair[1], dim));
      }
    }
  }
  out.annotators.assign(annotators.begin(), annotators.end());
  out.sufficient = out.doubly_rated > 0;
  if (!out.sufficient) return out;
  for (const char* dim : kDimensions) {
    const auto& [a, b] = lists[dim];
    DimensionAgreement d;
    d.pairs = static_cast<int>(a.size());
    int agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) agree += a[i] == b[i];
    d.observed_agreement = static_cast<double>(agree) / static_cast<double>(a.size());
    try {
      d.kappa = cohen_kappa(a, b);
      d.passes = kappa_gate(*d.kappa, config) == GateDecision::Accept;
    } catch (const DomainError&) {
      d.passes = agree == d.pairs;
    }
    out.dimensions.emplace(dim, d);
  }
  return out;
}

ConsensusRating consensus(std::span<const SummaryRating> ratings, const StudyAgreement& agreement,
                          const AnalysisConfig& config) {
  if (ratings.size() != 2 || ratings[0].annotator_id == ratings[1].annotator_id) {
    throw ContractError("consensus needs ratings from exactly two distinct annotators");
  }
  ConsensusRating c;
  for (const auto& [dim, d] : agreement.dimensions) c.kappa_per_dimension.emplace(dim, d.kappa);
  if (!config.waive_kappa_gate) {
    bool ok = agreement.sufficient;
    for (const auto& [dim, d] : agreement.dimensions) ok = ok && d.passes;
    if (!ok) throw GateError(c.kappa_per_dimension);
  }
  c.dqual = (ratings[0].dqual + ratings[1].dqual) / 2.0;
  c.dintrp = (ratings[0].dintrp + ratings[1].dintrp) / 2.0;
  c.dcrit = (ratings[0].dcrit + ratings[1].dcrit) / 2.0;
  return c;
}

KnowledgeGainResult gain_delta(const ConsensusRating& pre, const ConsensusRating& post) {
  return {post.dqual - pre.dqual, post.dintrp - pre.dintrp, post.dcrit - pre.dcrit, false};
}

bool classify_gain(double delta_dqual, double delta_dintrp, double delta_dcrit) {
  return delta_dqual > 1.5 && delta_dintrp > 1.0 && delta_dcrit > 0.0;
}

bool classify_gain(const KnowledgeGainResult& d) {
  return classify_gain(d.delta_dqual, d.delta_dintrp, d.delta_dcrit);
}

CohortGain cohort_gain(std::span<const Session> sessions,
                       const std::vector<std::string>& condition_ids,
                       const AnalysisConfig& config) {
  std::vector<std::string> missing;
  for (const auto& s : sessions) {
    if (!has_two_ratings(s.pre_summary) || !has_two_ratings(s.post_summary)) {
      missing.push_back(s.session_id);
    }
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    std::string msg = "sessions missing two ratings on both summaries:";
    for (const auto& id : missing) msg += " " + id;
    throw DomainError(msg);
  }

  CohortGain out;
  out.agreement = summary_agreement(sessions, config);
  out.gate_waived = config.waive_kappa_gate;
  for (const auto& cid : condition_ids) {
    ConditionGain g;
    g.condition_id = cid;
    for (const auto& s : sessions) {
      if (s.condition_id != cid) continue;
      const auto pre = consensus(s.pre_summary->ratings, out.agreement, config);
      const auto post = consensus(s.post_summary->ratings, out.agreement, config);
      KnowledgeGainResult r = gain_delta(pre, post);
      r.gain_over_50pct = classify_gain(r);
      g.per_participant.emplace(s.participant_id, r);
    }
    g.participants = static_cast<int>(g.per_participant.size());
    if (g.participants > 0) {
      for (const auto& [pid, r] : g.per_participant) {
        g.mean_delta_dqual += r.delta_dqual;
        g.mean_delta_dintrp += r.delta_dintrp;
        g.mean_delta_dcrit += r.delta_dcrit;
        g.flagged += r.gain_over_50pct;
      }
      const double n = g.participants;
      g.mean_delta_dqual /= n;
      g.mean_delta_dintrp /= n;
      g.mean_delta_dcrit /= n;
      g.fraction_flagged = g.flagged / n;
    }
    out.conditions.push_back(std::move(g));
  }
  return out;
}

}  // namespace iecsi
