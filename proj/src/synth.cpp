#include "iecsi/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "iecsi/errors.hpp"

namespace iecsi {

namespace {

// std::normal_distribution is implementation-defined; the bundle must be
// byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (spare_) {
      double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double kTwoPi = 6.283185307179586476925;
    spare_ = r * std::sin(kTwoPi * u2);
    return r * std::cos(kTwoPi * u2);
  }

  int below(int n) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(n)); }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

constexpr double kFavourableMean = 4.6;
constexpr double kParticipantSd = 0.8;
constexpr double kItemSd = 1.0;

// Shared by both conditions, so they move item means without creating a
// condition difference.
double item_offset(const std::string& item_id) {
  if (item_id == "pssuq_07") return -3.4;
  if (item_id == "pssuq_08") return -3.0;
  if (item_id == "pssuq_09") return -2.9;
  if (item_id == "anticipated_difficulty") return -1.5;
  return 0.0;
}

std::string two_digit(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", i);
  return buf;
}

std::string timestamp(int participant, int minute) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "2024-03-%02dT%02d:%02d:00Z", 1 + participant % 28,
                9 + (minute / 60) % 12, minute % 60);
  return buf;
}

int likert_value(double favourable, bool flip, const AnalysisConfig& c) {
  int v = static_cast<int>(std::lround(favourable));
  v = std::clamp(v, c.scale_min, c.scale_max);
  return flip ? c.scale_min + c.scale_max - v : v;
}

SummaryDocument summary(const std::string& id, Phase phase, const std::string& topic,
                        int dqual, int dintrp, int dcrit) {
  SummaryDocument doc;
  doc.summary_id = id;
  doc.phase = phase;
  doc.text = std::string(phase == Phase::Pre ? "What I knew about " : "What I learned about ") +
             topic + ": " + std::to_string(dqual) + " specific facts, " +
             std::to_string(dintrp) + " links between them, " +
             (dcrit ? "with a critique." : "no critique.") + "\n";
  for (const char* annotator : {"annotator_a", "annotator_b"}) {
    doc.ratings.push_back({annotator, dqual, dintrp, dcrit});
  }
  return doc;
}

BenchmarkSpec synthetic_benchmark() {
  BenchmarkSpec b;
  BandSet ueq_bands{{-3.0, -0.8, 0.8, 1.5, 3.0}, {"bad", "below average", "good", "excellent"}};
  b.entries[subscale_key(instrument_ids::kPssuq, "OVERALL")] =
      BenchmarkEntry{std::nullopt, ReferenceStats{4.6, 1.1, 40}, std::nullopt, std::nullopt};
  b.entries[subscale_key(instrument_ids::kUeqS, "pragmatic")] =
      BenchmarkEntry{std::nullopt, ReferenceStats{0.8, 1.0, 60}, std::nullopt, ueq_bands};
  b.entries[subscale_key(instrument_ids::kUeqS, "hedonic")] =
      BenchmarkEntry{std::nullopt, std::nullopt, std::nullopt, ueq_bands};
  b.entries[subscale_key(instrument_ids::kNasaTlx, "workload")] =
      BenchmarkEntry{3.5, std::nullopt, std::nullopt, std::nullopt};
  b.entries[subscale_key(instrument_ids::kSal, "post_search")] = BenchmarkEntry{
      std::nullopt, std::nullopt,
      std::vector<double>{4.0, 4.25, 4.5, 3.75, 5.0, 4.5, 3.5, 4.75, 4.0, 5.25}, std::nullopt};
  return b;
}

}  // namespace

Study synthesize(const SynthOptions& o) {
  if (o.participants < 2) throw ContractError("synth: at least 2 participants are required");
  Rng rng(o.seed);
  Study study;
  StudyDesign& d = study.design;
  d.study_id = "synth-" + std::to_string(o.seed);
  d.mode = o.mode;
  d.conditions.push_back({"conversational", InterfaceKind::Conversational,
                          "Conversational search interface"});
  if (o.mode == StudyMode::Comparative) {
    d.conditions.push_back({"conventional", InterfaceKind::Conventional,
                            "Conventional search engine"});
  } else {
    d.benchmark = synthetic_benchmark();
    d.benchmark_ref = "benchmark.json";
  }
  d.instruments = {std::string(instrument_ids::kPssuq), std::string(instrument_ids::kUeqS),
                   std::string(instrument_ids::kNasaTlx), std::string(instrument_ids::kSal),
                   std::string(instrument_ids::kKnowledgeGain)};
  const AnalysisConfig& cfg = d.analysis;
  const std::vector<std::string> topics{"renewable energy", "sleep and memory",
                                        "coral reef bleaching", "antibiotic resistance"};
  const std::vector<std::string> age_groups{"18-24", "25-34", "35-44", "45-54"};

  for (int p = 1; p <= o.participants; ++p) {
    const std::string pid = "p" + two_digit(p);
    study.participants.push_back(
        {pid, {{"age_group", age_groups[static_cast<std::size_t>(rng.below(4))]}}});
    const double person = kParticipantSd * rng.normal();
    for (std::size_t ci = 0; ci < d.conditions.size(); ++ci) {
      const auto& cond = d.conditions[ci];
      const double shift = (cond.kind == InterfaceKind::Conversational ? 0.5 : -0.5) * o.effect;
      Session s;
      s.session_id = pid + "-" + cond.condition_id;
      s.participant_id = pid;
      s.condition_id = cond.condition_id;
      s.topic = topics[(static_cast<std::size_t>(p) + ci) % topics.size()];
      s.state = SessionState::PostDone;
      s.docs_viewed = 2 + rng.below(6);
      int minute = static_cast<int>(ci) * 90;
      for (const auto& id : d.instruments) {
        const Instrument& in = study.registry.at(id);
        for (const auto& item : in.items) {
          if (item.kind != ResponseKind::Likert) continue;
          const bool flip = item.reverse_coded != !in.higher_is_better;
          const double fav = kFavourableMean + item_offset(item.item_id) + shift + person +
                             kItemSd * rng.normal();
          ItemResponse r{in.instrument_id, item.item_id, likert_value(fav, flip, cfg),
                         timestamp(p, minute++)};
          (item.phase == Phase::Pre ? s.pre_responses : s.post_responses).push_back(r);
        }
      }
      // Planted deltas: some sessions show a full gain, the rest move one or
      // two steps on fact quality only.
      int pre_q = rng.below(2), pre_i = 0, pre_c = 0;
      int post_q, post_i, post_c;
      if (rng.uniform() < 0.35) {
        post_q = kDqualMax;
        post_i = kDintrpMax;
        post_c = kDcritMax;
        pre_q = 0;
      } else {
        pre_i = rng.below(2);
        post_q = std::min(kDqualMax, pre_q + 1 + rng.below(2));
        post_i = std::min(kDintrpMax, pre_i + rng.below(2));
        post_c = rng.below(2);
      }
      s.pre_summary = summary(s.session_id + "-pre", Phase::Pre, s.topic, pre_q, pre_i, pre_c);
      s.post_summary =
          summary(s.session_id + "-post", Phase::Post, s.topic, post_q, post_i, post_c);
      study.sessions.push_back(std::move(s));
    }
  }
  return study;
}

}  // namespace iecsi
