#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iecsi/model.hpp"

namespace iecsi {

// Agreement on one rating dimension across every doubly-rated summary.
struct DimensionAgreement {
  // Absent when chance agreement is 1 (both raters constant on one score).
  std::optional<double> kappa;
  double observed_agreement = 0.0;
  int pairs = 0;
  bool passes = false;
};

struct StudyAgreement {
  // "dqual", "dintrp", "dcrit"
  std::map<std::string, DimensionAgreement> dimensions;
  int doubly_rated = 0;
  std::vector<std::string> annotators;
  // False when no summary carries two ratings.
  bool sufficient = false;
};

// Per-dimension Cohen's kappa over all summaries rated by two annotators.
// A dimension passes the gate when kappa >= threshold, or when kappa is
// undefined because the raters agreed on every summary.
StudyAgreement summary_agreement(std::span<const Session> sessions, const AnalysisConfig& config);

struct ConsensusRating {
  double dqual = 0.0;
  double dintrp = 0.0;
  double dcrit = 0.0;
  std::map<std::string, std::optional<double>> kappa_per_dimension;
};

// Mean of two ratings by distinct annotators. Unless the gate is waived,
// throws GateError carrying the kappa values when any dimension fails.
ConsensusRating consensus(std::span<const SummaryRating> ratings, const StudyAgreement& agreement,
                          const AnalysisConfig& config);

struct KnowledgeGainResult {
  double delta_dqual = 0.0;
  double delta_dintrp = 0.0;
  double delta_dcrit = 0.0;
  bool gain_over_50pct = false;
};

// post - pre per dimension; the flag is left unset.
KnowledgeGainResult gain_delta(const ConsensusRating& pre, const ConsensusRating& post);

// True iff dDqual > 1.5 and dDintrp > 1 and dDcrit > 0.
bool classify_gain(double delta_dqual, double delta_dintrp, double delta_dcrit);
bool classify_gain(const KnowledgeGainResult& deltas);

struct ConditionGain {
  std::string condition_id;
  int participants = 0;
  double mean_delta_dqual = 0.0;
  double mean_delta_dintrp = 0.0;
  double mean_delta_dcrit = 0.0;
  int flagged = 0;
  double fraction_flagged = 0.0;
  // participant id -> classified deltas
  std::map<std::string, KnowledgeGainResult> per_participant;
};

struct CohortGain {
  StudyAgreement agreement;
  bool gate_waived = false;
  std::vector<ConditionGain> conditions;
};

// Gain summary per condition, in `condition_ids` order. Every session must
// carry two ratings on both summaries; otherwise DomainError lists the
// offending sessions. Gate failures surface as GateError.
CohortGain cohort_gain(std::span<const Session> sessions,
                       const std::vector<std::string>& condition_ids,
                       const AnalysisConfig& config);

}  // namespace iecsi
