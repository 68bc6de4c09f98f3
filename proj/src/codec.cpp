#include "iecsi/codec.hpp"

#include "iecsi/errors.hpp"

namespace iecsi::codec {

namespace {

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + "." + key, "missing required field");
  return *it;
}

std::string str(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_string()) throw ParseError(where + "." + key, "expected string");
  return v.get<std::string>();
}

double num(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number()) throw ParseError(where + "." + key, "expected number");
  return v.get<double>();
}

int integer(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number_integer()) throw ParseError(where + "." + key, "expected integer");
  return v.get<int>();
}

template <typename T>
T optional_value(const json& j, const char* key, const std::string& where, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(where + "." + key, "wrong type");
  }
}

const json& array(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_array()) throw ParseError(where + "." + key, "expected array");
  return v;
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "expected array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError(where, "expected array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

json parse_document(std::string_view text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, e.what());
  }
}

json to_json(const AnalysisConfig& c) {
  return {{"alpha", c.alpha},
          {"kappa_threshold", c.kappa_threshold},
          {"scale_min", c.scale_min},
          {"scale_max", c.scale_max},
          {"neutral_band", {c.neutral_low, c.neutral_high}},
          {"exact_test_cutoff", c.exact_test_cutoff},
          {"waive_kappa_gate", c.waive_kappa_gate}};
}

AnalysisConfig config_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected object");
  AnalysisConfig c;
  c.alpha = optional_value(j, "alpha", where, c.alpha);
  c.kappa_threshold = optional_value(j, "kappa_threshold", where, c.kappa_threshold);
  c.scale_min = optional_value(j, "scale_min", where, c.scale_min);
  c.scale_max = optional_value(j, "scale_max", where, c.scale_max);
  c.exact_test_cutoff = optional_value(j, "exact_test_cutoff", where, c.exact_test_cutoff);
  c.waive_kappa_gate = optional_value(j, "waive_kappa_gate", where, c.waive_kappa_gate);
  if (auto it = j.find("neutral_band"); it != j.end()) {
    auto band = numbers(*it, where + ".neutral_band");
    if (band.size() != 2) throw ParseError(where + ".neutral_band", "expected [low, high]");
    c.neutral_low = band[0];
    c.neutral_high = band[1];
  }
  return c;
}

json to_json(const BenchmarkSpec& b) {
  json entries = json::object();
  for (const auto& [key, e] : b.entries) {
    json o = json::object();
    if (e.mu) o["mu"] = *e.mu;
    if (e.stats) o["stats"] = {{"mean", e.stats->mean}, {"sd", e.stats->sd}, {"n", e.stats->n}};
    if (e.sample) o["sample"] = *e.sample;
    if (e.bands) o["bands"] = {{"cuts", e.bands->cuts}, {"labels", e.bands->labels}};
    entries[key] = std::move(o);
  }
  return {{"entries", entries}};
}

BenchmarkSpec benchmark_from_json(const json& j, const std::string& where) {
  BenchmarkSpec b;
  const json& entries = field(j, "entries", where);
  if (!entries.is_object()) throw ParseError(where + ".entries", "expected object");
  for (const auto& [key, e] : entries.items()) {
    const std::string w = where + ".entries[\"" + key + "\"]";
    if (!e.is_object()) throw ParseError(w, "expected object");
    BenchmarkEntry entry;
    if (e.contains("mu")) entry.mu = num(e, "mu", w);
    if (e.contains("stats")) {
      const json& s = e["stats"];
      entry.stats = ReferenceStats{num(s, "mean", w + ".stats"), num(s, "sd", w + ".stats"),
                                   integer(s, "n", w + ".stats")};
    }
    if (e.contains("sample")) entry.sample = numbers(e["sample"], w + ".sample");
    if (e.contains("bands")) {
      const json& bj = e["bands"];
      BandSet bands;
      bands.cuts = numbers(field(bj, "cuts", w + ".bands"), w + ".bands.cuts");
      for (const auto& l : array(bj, "labels", w + ".bands")) {
        if (!l.is_string()) throw ParseError(w + ".bands.labels", "expected strings");
        bands.labels.push_back(l.get<std::string>());
      }
      entry.bands = std::move(bands);
    }
    b.entries.emplace(key, std::move(entry));
  }
  return b;
}

json to_json(const StudyDesign& d) {
  json conditions = json::array();
  for (const auto& c : d.conditions) {
    conditions.push_back(
        {{"condition_id", c.condition_id}, {"kind", to_string(c.kind)}, {"label", c.label}});
  }
  json j = {{"study_id", d.study_id},
            {"mode", to_string(d.mode)},
            {"conditions", conditions},
            {"instruments", d.instruments},
            {"analysis", to_json(d.analysis)}};
  if (d.benchmark_ref) j["benchmark"] = *d.benchmark_ref;
  return j;
}

StudyDesign design_from_json(const json& j, const std::string& where) {
  StudyDesign d;
  d.study_id = str(j, "study_id", where);
  const std::string mode = str(j, "mode", where);
  auto m = parse_study_mode(mode);
  if (!m) throw ParseError(where + ".mode", "expected comparative or benchmark_only");
  d.mode = *m;
  const json& conditions = array(j, "conditions", where);
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    const std::string w = where + ".conditions[" + std::to_string(i) + "]";
    InterfaceCondition c;
    c.condition_id = str(conditions[i], "condition_id", w);
    auto kind = parse_interface_kind(str(conditions[i], "kind", w));
    if (!kind) throw ParseError(w + ".kind", "expected conversational or conventional");
    c.kind = *kind;
    c.label = optional_value<std::string>(conditions[i], "label", w, "");
    d.conditions.push_back(std::move(c));
  }
  for (const auto& id : array(j, "instruments", where)) {
    if (!id.is_string()) throw ParseError(where + ".instruments", "expected strings");
    d.instruments.push_back(id.get<std::string>());
  }
  if (auto it = j.find("analysis"); it != j.end()) {
    d.analysis = config_from_json(*it, where + ".analysis");
  }
  if (auto it = j.find("benchmark"); it != j.end() && !it->is_null()) {
    if (it->is_string()) {
      d.benchmark_ref = it->get<std::string>();
    } else {
      d.benchmark = benchmark_from_json(*it, where + ".benchmark");
    }
  }
  return d;
}

json to_json(const Participant& p) {
  return {{"participant_id", p.participant_id}, {"demographics", p.demographics}};
}

Participant participant_from_json(const json& j, const std::string& where) {
  Participant p;
  p.participant_id = str(j, "participant_id", where);
  if (auto it = j.find("demographics"); it != j.end()) {
    if (!it->is_object()) throw ParseError(where + ".demographics", "expected object");
    for (const auto& [k, v] : it->items()) {
      if (!v.is_string()) throw ParseError(where + ".demographics." + k, "expected string");
      p.demographics.emplace(k, v.get<std::string>());
    }
  }
  return p;
}

json to_json(const ItemResponse& r) {
  return {{"instrument_id", r.instrument_id},
          {"item_id", r.item_id},
          {"value", r.value},
          {"timestamp", r.timestamp}};
}

ItemResponse response_from_json(const json& j, const std::string& where) {
  ItemResponse r;
  r.instrument_id = str(j, "instrument_id", where);
  r.item_id = str(j, "item_id", where);
  r.value = integer(j, "value", where);
  r.timestamp = optional_value<std::string>(j, "timestamp", where, "");
  return r;
}

json session_metadata(const Session& s) {
  const auto summary = [](const std::optional<SummaryDocument>& doc) -> json {
    if (!doc) return nullptr;
    return {{"summary_id", doc->summary_id},
            {"phase", to_string(doc->phase)},
            {"file", "summaries/" + doc->summary_id + ".txt"}};
  };
  return {{"session_id", s.session_id},
          {"participant_id", s.participant_id},
          {"condition_id", s.condition_id},
          {"topic", s.topic},
          {"docs_viewed", s.docs_viewed},
          {"state", to_string(s.state)},
          {"pre_summary", summary(s.pre_summary)},
          {"post_summary", summary(s.post_summary)}};
}

}  // namespace iecsi::codec
