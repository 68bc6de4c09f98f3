#include "iecsi/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "iecsi/codec.hpp"
#include "iecsi/errors.hpp"

namespace iecsi {

using codec::json;

namespace {

std::string subscale_target(const std::string& instrument, const std::string& subscale) {
  return "subscale:" + instrument + "/" + subscale;
}

std::string item_target(const std::string& instrument, const std::string& item) {
  return "item:" + instrument + "/" + item;
}

// Maps a scored mean back onto the raw response scale with "higher is more
// favourable" orientation, which is what the neutral band is defined on.
double favourable_mean(double mean, bool centered, bool flip, const AnalysisConfig& c) {
  double raw = centered ? mean + c.midpoint() : mean;
  if (flip) raw = c.scale_min + c.scale_max - raw;
  return std::clamp(raw, static_cast<double>(c.scale_min), static_cast<double>(c.scale_max));
}

bool has_two_ratings(const std::optional<SummaryDocument>& doc) {
  return doc && doc->ratings.size() == 2 &&
         doc->ratings[0].annotator_id != doc->ratings[1].annotator_id;
}

InstrumentScores score_instrument(const Instrument& in, const std::vector<const Session*>& sessions,
                                  const AnalysisConfig& config, const BenchmarkSpec* benchmark) {
  InstrumentScores out;
  out.instrument_id = in.instrument_id;
  out.segment = in.segment;
  out.section = in.section;

  std::vector<ParticipantResponses> grouped;
  std::vector<ItemResponse> flat;
  for (const Session* s : sessions) {
    ParticipantResponses p{s->participant_id, {}};
    for (const auto* list : {&s->pre_responses, &s->post_responses}) {
      for (const auto& r : *list) {
        if (r.instrument_id != in.instrument_id) continue;
        p.responses.push_back(r);
        flat.push_back(r);
      }
    }
    grouped.push_back(std::move(p));
  }
  if (flat.empty()) return out;

  const bool centered = in.scoring_transform == ScoringTransform::Centered;
  for (auto& score : subscale_scores(grouped, in, config)) {
    ScoredSubscale s;
    const double fav = favourable_mean(score.mean, centered, !in.higher_is_better, config);
    s.annotation = {subscale_target(in.instrument_id, score.subscale_id),
                    annotate_mean(fav, config), fav};
    if (benchmark) {
      auto it = benchmark->entries.find(subscale_key(in.instrument_id, score.subscale_id));
      if (it != benchmark->entries.end() && it->second.bands) {
        s.band = benchmark_band(score, *it->second.bands);
      }
    }
    s.score = std::move(score);
    out.subscales.push_back(std::move(s));
  }
  const auto means = item_means(flat, in);
  for (const auto& item : in.items) {
    auto it = means.find(item.item_id);
    if (it == means.end()) continue;
    const double fav = favourable_mean(it->second, false,
                                       item.reverse_coded != !in.higher_is_better, config);
    out.items.push_back({item.item_id, it->second,
                         {item_target(in.instrument_id, item.item_id), annotate_mean(fav, config),
                          fav}});
  }
  return out;
}

std::vector<double> values_of(const std::map<std::string, double>& m) {
  std::vector<double> v;
  for (const auto& [k, x] : m) v.push_back(x);
  return v;
}

// Per-participant values for a planned subscale under one condition.
std::map<std::string, double> participant_values(const ConditionReport& c,
                                                 const std::string& instrument,
                                                 const std::string& subscale) {
  if (instrument == instrument_ids::kKnowledgeGain) {
    std::map<std::string, double> out;
    if (!c.knowledge_gain) return out;
    for (const auto& [pid, r] : c.knowledge_gain->per_participant) {
      if (subscale == kDeltaDqual) out[pid] = r.delta_dqual;
      else if (subscale == kDeltaDintrp) out[pid] = r.delta_dintrp;
      else if (subscale == kDeltaDcrit) out[pid] = r.delta_dcrit;
    }
    return out;
  }
  for (const auto& in : c.instruments) {
    if (in.instrument_id != instrument) continue;
    for (const auto& s : in.subscales) {
      if (s.score.subscale_id == subscale) return s.score.per_participant;
    }
  }
  return {};
}

template <typename F>
void run_test(TestOutcome& out, TestKind kind, F&& f) {
  try {
    out.results.push_back(f());
  } catch (const DomainError& e) {
    out.not_computed.emplace_back(std::string(to_string(kind)), e.what());
  } catch (const ContractError& e) {
    out.not_computed.emplace_back(std::string(to_string(kind)), e.what());
  }
}

void mark_disagreement(TestOutcome& out) {
  std::set<bool> verdicts;
  for (const auto& r : out.results) verdicts.insert(r.significant);
  out.disagreement = verdicts.size() > 1;
}

std::vector<TestOutcome> run_tests(const TestPlan& plan, const AnalysisReport& report,
                                   const StudyDesign& design) {
  std::vector<TestOutcome> outcomes;
  const AnalysisConfig& cfg = design.analysis;
  if (plan.mode == StudyMode::Comparative) {
    if (report.conditions.size() != 2) return outcomes;
    // x is the conversational interface when the design has one.
    std::size_t xi = 0;
    if (report.conditions[0].condition.kind != InterfaceKind::Conversational &&
        report.conditions[1].condition.kind == InterfaceKind::Conversational) {
      xi = 1;
    }
    const ConditionReport& cx = report.conditions[xi];
    const ConditionReport& cy = report.conditions[1 - xi];
    for (const auto& entry : plan.entries) {
      TestOutcome out{entry.instrument_id, entry.subscale_id,
                      cx.condition.condition_id + " - " + cy.condition.condition_id, {}, {}, false};
      const auto mx = participant_values(cx, entry.instrument_id, entry.subscale_id);
      const auto my = participant_values(cy, entry.instrument_id, entry.subscale_id);
      std::vector<double> x, y;
      for (const auto& [pid, v] : mx) {
        if (auto it = my.find(pid); it != my.end()) {
          x.push_back(v);
          y.push_back(it->second);
        }
      }
      for (TestKind kind : entry.tests) {
        if (kind == TestKind::PairedT) {
          run_test(out, kind, [&] { return paired_t_test(x, y, cfg.alpha); });
        } else if (kind == TestKind::Wilcoxon) {
          run_test(out, kind, [&] { return wilcoxon_signed_rank(x, y, cfg); });
        }
      }
      mark_disagreement(out);
      outcomes.push_back(std::move(out));
    }
    return outcomes;
  }

  if (report.conditions.empty()) return outcomes;
  const ConditionReport& c = report.conditions.front();
  for (const auto& entry : plan.entries) {
    TestOutcome out{entry.instrument_id, entry.subscale_id, "vs benchmark", {}, {}, false};
    const std::vector<double> sample =
        values_of(participant_values(c, entry.instrument_id, entry.subscale_id));
    const BenchmarkEntry& ref =
        design.benchmark->entries.at(subscale_key(entry.instrument_id, entry.subscale_id));
    std::optional<ReferenceStats> stats = ref.stats;
    if (!stats && ref.sample && ref.sample->size() >= 2) {
      const auto& r = *ref.sample;
      double m = 0.0;
      for (double v : r) m += v;
      m /= static_cast<double>(r.size());
      double ss = 0.0;
      for (double v : r) ss += (v - m) * (v - m);
      stats = ReferenceStats{m, std::sqrt(ss / static_cast<double>(r.size() - 1)),
                             static_cast<int>(r.size())};
    }
    for (TestKind kind : entry.tests) {
      switch (kind) {
        case TestKind::OneSampleT: {
          double mu = 0.0;
          if (ref.mu) mu = *ref.mu;
          else if (stats) mu = stats->mean;
          else if (ref.sample) mu = ref.sample->front();
          run_test(out, kind, [&] { return one_sample_t_test(sample, mu, cfg.alpha); });
          break;
        }
        case TestKind::Welch:
          if (!stats) {
            out.not_computed.emplace_back(std::string(to_string(kind)),
                                          "reference sample too small for summary statistics");
            break;
          }
          run_test(out, kind, [&] { return welch_t_test(sample, *stats, cfg.alpha); });
          break;
        case TestKind::MannWhitney:
          run_test(out, kind, [&] { return mann_whitney_u(sample, *ref.sample, cfg); });
          break;
        default:
          break;
      }
    }
    mark_disagreement(out);
    outcomes.push_back(std::move(out));
  }
  return outcomes;
}

std::optional<AnalystAgreement> analyst_agreement(const Study& study,
                                                  const AnalysisConfig& config) {
  if (study.annotations.empty()) return std::nullopt;
  AnalystAgreement out;
  std::set<std::string> annotators;
  for (const auto& a : study.annotations) annotators.insert(a.annotator_id);
  out.annotators.assign(annotators.begin(), annotators.end());
  if (out.annotators.size() < 2) return out;
  const std::string& first = out.annotators[0];
  const std::string& second = out.annotators[1];
  std::map<std::pair<std::string, std::string>, std::string> by_first, by_second;
  for (const auto& a : study.annotations) {
    const auto key = std::pair{a.condition_id, a.target_id};
    if (a.annotator_id == first) by_first[key] = a.sentiment;
    else if (a.annotator_id == second) by_second[key] = a.sentiment;
  }
  std::vector<std::string> xa, xb;
  for (const auto& [key, s] : by_first) {
    if (auto it = by_second.find(key); it != by_second.end()) {
      xa.push_back(s);
      xb.push_back(it->second);
    }
  }
  out.paired_targets = static_cast<int>(xa.size());
  if (xa.empty()) return out;
  try {
    out.kappa = cohen_kappa(xa, xb);
    out.accepted = kappa_gate(*out.kappa, config) == GateDecision::Accept;
  } catch (const DomainError&) {
    out.accepted = xa == xb;
  }
  return out;
}

// --- structured form -------------------------------------------------------

json opt_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json to_json(const Annotation& a) {
  return {{"target", a.target},
          {"sentiment", to_string(a.sentiment)},
          {"colour", colour_of(a.sentiment)},
          {"mean_on_scale", a.mean}};
}

json to_json(const StatTestResult& r) {
  json j = {{"test", r.test},
            {"statistic", r.statistic},
            {"p_value", r.p_value},
            {"df", opt_number(r.df)},
            {"significant", r.significant},
            {"n", r.n},
            {"method_note", r.method_note}};
  if (r.effect_size) {
    j["supplementary_effect_size"] = {{"kind", r.effect_size->kind},
                                      {"value", r.effect_size->value}};
  }
  return j;
}

json to_json(const ConditionGain& g) {
  json per = json::object();
  for (const auto& [pid, r] : g.per_participant) {
    per[pid] = {{"delta_dqual", r.delta_dqual},
                {"delta_dintrp", r.delta_dintrp},
                {"delta_dcrit", r.delta_dcrit},
                {"gain_over_50pct", r.gain_over_50pct}};
  }
  return {{"participants", g.participants},
          {"mean_delta_dqual", g.mean_delta_dqual},
          {"mean_delta_dintrp", g.mean_delta_dintrp},
          {"mean_delta_dcrit", g.mean_delta_dcrit},
          {"flagged_gain_over_50pct", g.flagged},
          {"fraction_flagged", g.fraction_flagged},
          {"per_participant", per}};
}

json to_json(const StudyAgreement& a) {
  json dims = json::object();
  for (const auto& [dim, d] : a.dimensions) {
    dims[dim] = {{"kappa", opt_number(d.kappa)},
                 {"observed_agreement", d.observed_agreement},
                 {"pairs", d.pairs},
                 {"passes", d.passes}};
  }
  return {{"annotators", a.annotators},
          {"doubly_rated_summaries", a.doubly_rated},
          {"sufficient", a.sufficient},
          {"dimensions", dims}};
}

json report_to_json(const AnalysisReport& r) {
  json conditions = json::array();
  for (const auto& c : r.conditions) {
    json instruments = json::array();
    for (const auto& in : c.instruments) {
      json subscales = json::array();
      for (const auto& s : in.subscales) {
        json j = {{"subscale_id", s.score.subscale_id},
                  {"mean", s.score.mean},
                  {"sd", s.score.sd},
                  {"n", s.score.n},
                  {"per_item_means", s.score.per_item_means},
                  {"annotation", to_json(s.annotation)}};
        if (s.band) {
          j["benchmark_band"] = {{"label", s.band->label},
                                 {"clamped", s.band->clamped},
                                 {"method_note", s.band->method_note}};
        }
        subscales.push_back(std::move(j));
      }
      json items = json::array();
      for (const auto& it : in.items) {
        items.push_back(
            {{"item_id", it.item_id}, {"mean", it.mean}, {"annotation", to_json(it.annotation)}});
      }
      instruments.push_back({{"instrument_id", in.instrument_id},
                             {"segment", to_string(in.segment)},
                             {"section", in.section},
                             {"subscales", subscales},
                             {"items", items}});
    }
    json sections = json::array();
    for (const auto& t : c.sections) {
      sections.push_back({{"section", t.section},
                          {"positive", t.positive},
                          {"neutral", t.neutral},
                          {"negative", t.negative},
                          {"flagged_for_improvement", t.flagged_for_improvement}});
    }
    conditions.push_back(
        {{"condition_id", c.condition.condition_id},
         {"kind", to_string(c.condition.kind)},
         {"label", c.condition.label},
         {"sessions", c.sessions},
         {"instruments", instruments},
         {"sections", sections},
         {"docs_viewed_average", opt_number(c.docs_viewed_average)},
         {"knowledge_gain", c.knowledge_gain ? to_json(*c.knowledge_gain) : json(nullptr)}});
  }
  json tests = json::array();
  for (const auto& t : r.tests) {
    json results = json::array();
    for (const auto& res : t.results) results.push_back(to_json(res));
    json skipped = json::array();
    for (const auto& [name, why] : t.not_computed) {
      skipped.push_back({{"test", name}, {"reason", why}});
    }
    tests.push_back({{"instrument_id", t.instrument_id},
                     {"subscale_id", t.subscale_id},
                     {"comparison", t.comparison},
                     {"results", results},
                     {"not_computed", skipped},
                     {"parametric_nonparametric_disagreement", t.disagreement}});
  }
  json analyst = nullptr;
  if (r.analyst_agreement) {
    analyst = {{"annotators", r.analyst_agreement->annotators},
               {"paired_targets", r.analyst_agreement->paired_targets},
               {"kappa", opt_number(r.analyst_agreement->kappa)},
               {"accepted", r.analyst_agreement->accepted}};
  }
  return {{"version", r.version},
          {"study_id", r.study_id},
          {"mode", to_string(r.mode)},
          {"analysis", codec::to_json(r.config)},
          {"conditions", conditions},
          {"tests", tests},
          {"summary_agreement",
           r.summary_agreement ? to_json(*r.summary_agreement) : json(nullptr)},
          {"kappa_gate_waived", r.kappa_gate_waived},
          {"analyst_agreement", analyst},
          {"incomplete", r.incomplete},
          {"excluded_sessions", r.excluded_sessions}};
}

// --- markdown ----------------------------------------------------------------

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string sentiment_cell(const Annotation& a) {
  std::string s(to_string(a.sentiment));
  s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s + " (" + std::string(colour_of(a.sentiment)) + ")";
}

std::string render_markdown(const AnalysisReport& r) {
  std::string md;
  md += "# Conversational search interface evaluation: " + r.study_id + "\n\n";
  md += "- Mode: " + std::string(to_string(r.mode)) + "\n";
  md += "- Report version: " + r.version + "\n";
  md += "- Significance level: " + fmt("%g", r.config.alpha) + "\n";
  md += "- Neutral band: [" + fmt("%g", r.config.neutral_low) + ", " +
        fmt("%g", r.config.neutral_high) + "]\n";
  if (r.incomplete) {
    md += "- **Incomplete**: " + std::to_string(r.excluded_sessions.size()) +
          " session(s) excluded\n";
  }
  md += "\n";

  for (const auto& c : r.conditions) {
    md += "## Condition " + c.condition.condition_id + " (" +
          std::string(to_string(c.condition.kind)) + ")\n\n";
    md += "Sessions analysed: " + std::to_string(c.sessions) + "\n\n";
    md += "| Segment | Instrument | Subscale | Mean | SD | n | Sentiment | Benchmark band |\n";
    md += "|---|---|---|---|---|---|---|---|\n";
    for (const auto& in : c.instruments) {
      for (const auto& s : in.subscales) {
        md += "| " + std::string(to_string(in.segment)) + " | " + in.instrument_id + " | " +
              s.score.subscale_id + " | " + fmt("%.3f", s.score.mean) + " | " +
              fmt("%.3f", s.score.sd) + " | " + std::to_string(s.score.n) + " | " +
              sentiment_cell(s.annotation) + " | " + (s.band ? s.band->label : "-") + " |\n";
      }
    }
    md += "\n### Item annotations\n\n| Instrument | Item | Mean | Sentiment |\n|---|---|---|---|\n";
    for (const auto& in : c.instruments) {
      for (const auto& it : in.items) {
        md += "| " + in.instrument_id + " | " + it.item_id + " | " + fmt("%.3f", it.mean) + " | " +
              sentiment_cell(it.annotation) + " |\n";
      }
    }
    md += "\n### Sections\n\n| Section | Positive | Neutral | Negative |\n|---|---|---|---|\n";
    std::vector<std::string> flagged;
    for (const auto& t : c.sections) {
      md += "| " + t.section + " | " + std::to_string(t.positive) + " | " +
            std::to_string(t.neutral) + " | " + std::to_string(t.negative) + " |\n";
      if (t.flagged_for_improvement) {
        flagged.push_back(t.section + " (" + std::to_string(t.negative) + " negative)");
      }
    }
    md += "\n### Needs improvement\n\n";
    if (flagged.empty()) md += "None flagged.\n";
    for (const auto& f : flagged) md += "- " + f + "\n";
    if (c.docs_viewed_average) {
      md += "\nAverage number of docs viewed per search: " + fmt("%.3f", *c.docs_viewed_average) +
            "\n";
    }
    if (c.knowledge_gain) {
      const auto& g = *c.knowledge_gain;
      md += "\n### Knowledge gain\n\n";
      md += "| Participants | mean dDqual | mean dDintrp | mean dDcrit | gain over 50% |\n";
      md += "|---|---|---|---|---|\n";
      md += "| " + std::to_string(g.participants) + " | " + fmt("%.3f", g.mean_delta_dqual) +
            " | " + fmt("%.3f", g.mean_delta_dintrp) + " | " + fmt("%.3f", g.mean_delta_dcrit) +
            " | " + std::to_string(g.flagged) + " (" + fmt("%.3f", g.fraction_flagged) + ") |\n";
    }
    md += "\n";
  }

  md += "## Significance tests\n\n";
  md += "| Instrument | Subscale | Comparison | Test | Statistic | df | p | Significant | Method |\n";
  md += "|---|---|---|---|---|---|---|---|---|\n";
  std::vector<std::string> disagreements;
  for (const auto& t : r.tests) {
    for (const auto& res : t.results) {
      md += "| " + t.instrument_id + " | " + t.subscale_id + " | " + t.comparison + " | " +
            res.test + " | " + fmt("%.4f", res.statistic) + " | " +
            (res.df ? fmt("%.2f", *res.df) : std::string("-")) + " | " +
            fmt("%.4g", res.p_value) + " | " + (res.significant ? "yes" : "no") + " | " +
            res.method_note + " |\n";
    }
    for (const auto& [name, why] : t.not_computed) {
      md += "| " + t.instrument_id + " | " + t.subscale_id + " | " + t.comparison + " | " +
            name + " | - | - | - | - | not computed: " + why + " |\n";
    }
    if (t.disagreement) disagreements.push_back(t.instrument_id + "/" + t.subscale_id);
  }
  if (!disagreements.empty()) {
    md += "\n**Parametric and nonparametric tests disagree** for:";
    for (const auto& d : disagreements) md += " " + d;
    md += "\n";
  }
  md += "\nEffect sizes in the structured report are supplementary and descriptive.\n";

  if (r.summary_agreement) {
    md += "\n## Summary rating agreement\n\n| Dimension | Kappa | Observed agreement | Passes |\n";
    md += "|---|---|---|---|\n";
    for (const auto& [dim, d] : r.summary_agreement->dimensions) {
      md += "| " + dim + " | " + (d.kappa ? fmt("%.4f", *d.kappa) : std::string("undefined")) +
            " | " + fmt("%.3f", d.observed_agreement) + " | " + (d.passes ? "yes" : "no") + " |\n";
    }
    if (r.kappa_gate_waived) md += "\nThe agreement gate was waived for this analysis.\n";
  }
  if (r.analyst_agreement) {
    md += "\n## Analyst annotation agreement\n\n";
    md += "Kappa: " +
          (r.analyst_agreement->kappa ? fmt("%.4f", *r.analyst_agreement->kappa)
                                      : std::string("insufficient")) +
          " over " + std::to_string(r.analyst_agreement->paired_targets) + " targets\n";
  }
  return md;
}

}  // namespace

AnalysisReport analyze(const Study& study, const AnalyzeOptions& options) {
  auto validation = validate_study(study);
  if (study.sessions.empty()) validation.violations.emplace_back("study has no sessions");
  if (!validation.ok()) throw ValidationError(validation.violations);

  const StudyDesign& design = study.design;
  const AnalysisConfig& cfg = design.analysis;
  const TestPlan plan = build_test_plan(design, study.registry);

  AnalysisReport report;
  report.study_id = design.study_id;
  report.mode = design.mode;
  report.config = cfg;
  report.kappa_gate_waived = cfg.waive_kappa_gate;

  const bool wants_kg =
      std::find(design.instruments.begin(), design.instruments.end(),
                instrument_ids::kKnowledgeGain) != design.instruments.end();

  std::vector<const Session*> included;
  std::vector<Session> kg_sessions;
  std::set<std::string> excluded;
  for (const auto& s : study.sessions) {
    if (s.state < SessionState::PostDone) {
      excluded.insert(s.session_id);
      continue;
    }
    if (wants_kg && (!has_two_ratings(s.pre_summary) || !has_two_ratings(s.post_summary))) {
      if (!options.allow_incomplete) {
        throw DomainError("session " + s.session_id +
                          " is missing two ratings on its pre- and post-search summaries");
      }
      excluded.insert(s.session_id);
      included.push_back(&s);
      continue;
    }
    included.push_back(&s);
    if (wants_kg) kg_sessions.push_back(s);
  }
  report.excluded_sessions.assign(excluded.begin(), excluded.end());
  report.incomplete = !excluded.empty();

  std::optional<CohortGain> gain;
  std::vector<std::string> condition_ids;
  for (const auto& c : design.conditions) condition_ids.push_back(c.condition_id);
  if (wants_kg && !kg_sessions.empty()) {
    gain = cohort_gain(kg_sessions, condition_ids, cfg);
    report.summary_agreement = gain->agreement;
  }

  const BenchmarkSpec* benchmark = design.benchmark ? &*design.benchmark : nullptr;
  const auto instrument_order = ordered_instrument_ids(design.instruments);
  for (std::size_t ci = 0; ci < design.conditions.size(); ++ci) {
    const auto& cond = design.conditions[ci];
    ConditionReport cr;
    cr.condition = cond;
    std::vector<const Session*> sessions;
    std::vector<Session> session_values;
    for (const Session* s : included) {
      if (s->condition_id == cond.condition_id) {
        sessions.push_back(s);
        session_values.push_back(*s);
      }
    }
    cr.sessions = static_cast<int>(sessions.size());

    std::vector<Annotation> annotations;
    std::map<std::string, std::string> section_of;
    for (const auto& id : instrument_order) {
      const Instrument& in = study.registry.at(id);
      if (!is_scored(in)) continue;
      InstrumentScores scores = score_instrument(in, sessions, cfg, benchmark);
      for (const auto& s : scores.subscales) {
        annotations.push_back(s.annotation);
        section_of[s.annotation.target] = in.section;
      }
      for (const auto& it : scores.items) {
        annotations.push_back(it.annotation);
        section_of[it.annotation.target] = in.section;
      }
      cr.instruments.push_back(std::move(scores));
    }
    if (!annotations.empty()) cr.sections = tally_sections(annotations, section_of);

    const bool logs_docs = std::any_of(instrument_order.begin(), instrument_order.end(),
                                       [&](const std::string& id) {
                                         for (const auto& item : study.registry.at(id).items) {
                                           if (item.kind == ResponseKind::Count) return true;
                                         }
                                         return false;
                                       });
    if (logs_docs && !session_values.empty()) {
      cr.docs_viewed_average = docs_viewed_average(session_values);
    }
    if (gain) cr.knowledge_gain = gain->conditions[ci];
    report.conditions.push_back(std::move(cr));
  }

  report.tests = run_tests(plan, report, design);
  report.analyst_agreement = analyst_agreement(study, cfg);
  return report;
}

std::string render(const AnalysisReport& report, ReportFormat format) {
  if (format == ReportFormat::Structured) return codec::canonical_dump(report_to_json(report));
  return render_markdown(report);
}

std::size_t annotation_count(const AnalysisReport& report) {
  std::size_t n = 0;
  for (const auto& c : report.conditions) {
    for (const auto& in : c.instruments) n += in.subscales.size() + in.items.size();
  }
  return n;
}

}  // namespace iecsi
