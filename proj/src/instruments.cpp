#include "iecsi/instruments.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include "iecsi/errors.hpp"
#include "json.hpp"

namespace iecsi {

using nlohmann::json;

std::string_view to_string(Segment s) {
  return s == Segment::Exploration ? "exploration" : "contentment";
}
std::string_view to_string(ScoringTransform t) {
  return t == ScoringTransform::Raw ? "raw" : "centered";
}
std::string_view to_string(ResponseKind k) {
  switch (k) {
    case ResponseKind::Likert: return "likert";
    case ResponseKind::Count: return "count";
    case ResponseKind::Summary: return "summary";
  }
  return "?";
}

const Item* Instrument::find_item(std::string_view item_id) const {
  auto it = std::find_if(items.begin(), items.end(),
                         [&](const Item& i) { return i.item_id == item_id; });
  return it == items.end() ? nullptr : &*it;
}

namespace {

Item likert(std::string id, std::string prompt, std::string neg, std::string pos, Phase phase) {
  Item item;
  item.item_id = std::move(id);
  item.prompt = std::move(prompt);
  item.negative_anchor = std::move(neg);
  item.positive_anchor = std::move(pos);
  item.phase = phase;
  return item;
}

Instrument make_nasa_tlx() {
  Instrument in;
  in.instrument_id = instrument_ids::kNasaTlx;
  in.name = "NASA Task Load Index";
  in.segment = Segment::Exploration;
  in.section = "cognitive load";
  in.higher_is_better = false;
  const auto item = [](std::string id, std::string prompt) {
    return likert(std::move(id), std::move(prompt), "very low", "very high", Phase::Post);
  };
  in.items = {
      item("mental", "How mentally demanding was the task?"),
      item("physical", "How physically demanding was the task?"),
      item("temporal", "How hurried or rushed was the pace of the task?"),
      item("performance", "How successful were you in accomplishing what you were asked to do?"),
      item("effort", "How hard did you have to work to accomplish your level of performance?"),
      item("frustration",
           "How insecure, discouraged, irritated, stressed, and annoyed were you?"),
  };
  in.subscales = {
      {"demand", {"mental", "physical", "temporal"}},
      {"interaction", {"effort", "frustration", "performance"}},
      {"workload", {"mental", "physical", "temporal", "performance", "effort", "frustration"}},
  };
  return in;
}

Instrument make_pssuq() {
  static constexpr std::array<std::string_view, 16> kPrompts{
      "Overall, I am satisfied with how easy it is to use this system.",
      "It was simple to use this system.",
      "I was able to complete the tasks and scenarios quickly using this system.",
      "I felt comfortable using this system.",
      "It was easy to learn to use this system.",
      "I believe I could become productive quickly using this system.",
      "The system gave error messages that clearly told me how to fix problems.",
      "Whenever I made a mistake using the system, I could recover easily and quickly.",
      "The information (such as online help, on-screen messages, and other documentation) "
      "provided with this system was clear.",
      "It was easy to find the information I needed.",
      "The information was effective in helping me complete the tasks and scenarios.",
      "The organization of information on the system screens was clear.",
      "The interface of this system was pleasant.",
      "I liked using the interface of this system.",
      "This system has all the functions and capabilities I expect it to have.",
      "Overall, I am satisfied with this system.",
  };
  Instrument in;
  in.instrument_id = instrument_ids::kPssuq;
  in.name = "Post-Study System Usability Questionnaire";
  in.segment = Segment::Exploration;
  in.section = "software usability";
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < kPrompts.size(); ++i) {
    std::string id = (i < 9 ? "pssuq_0" : "pssuq_") + std::to_string(i + 1);
    ids.push_back(id);
    in.items.push_back(likert(id, std::string(kPrompts[i]), "strongly disagree",
                              "strongly agree", Phase::Post));
  }
  const auto range = [&](std::size_t first, std::size_t last) {
    return std::vector<std::string>(ids.begin() + static_cast<long>(first - 1),
                                    ids.begin() + static_cast<long>(last));
  };
  in.subscales = {
      {"SYSUSE", range(1, 6)},
      {"INFOQUAL", range(7, 12)},
      {"INTERQUAL", range(13, 15)},
      {"OVERALL", range(1, 16)},
  };
  return in;
}

Instrument make_ueq_s() {
  Instrument in;
  in.instrument_id = instrument_ids::kUeqS;
  in.name = "User Experience Questionnaire (short)";
  in.segment = Segment::Exploration;
  in.section = "user experience";
  in.scoring_transform = ScoringTransform::Centered;
  const std::array<std::pair<std::string_view, std::string_view>, 8> anchors{{
      {"obstructive", "supportive"},
      {"complicated", "easy"},
      {"inefficient", "efficient"},
      {"confusing", "clear"},
      {"boring", "exciting"},
      {"not interesting", "interesting"},
      {"conventional", "inventive"},
      {"usual", "leading edge"},
  }};
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    std::string id = "ueqs_" + std::to_string(i + 1);
    ids.push_back(id);
    std::string prompt = "Rate the system from \"" + std::string(anchors[i].first) +
                         "\" to \"" + std::string(anchors[i].second) + "\".";
    in.items.push_back(likert(id, prompt, std::string(anchors[i].first),
                              std::string(anchors[i].second), Phase::Post));
  }
  in.subscales = {
      {"pragmatic", {ids[0], ids[1], ids[2], ids[3]}},
      {"hedonic", {ids[4], ids[5], ids[6], ids[7]}},
      {"overall", ids},
  };
  return in;
}

Instrument make_sal() {
  Instrument in;
  in.instrument_id = instrument_ids::kSal;
  in.name = "Search as Learning";
  in.segment = Segment::Contentment;
  in.section = "search as learning";
  struct Row {
    std::string_view id;
    std::string_view prompt;
    ResponseKind kind;
  };
  struct Group {
    std::string_view subscale;
    Phase phase;
    std::vector<Row> rows;
  };
  const std::vector<Group> groups{
      {"search_formulation",
       Phase::Pre,
       {{"background_knowledge", "Background Knowledge", ResponseKind::Likert},
        {"interest_in_topic", "Interest in Topic", ResponseKind::Likert},
        {"anticipated_difficulty", "Anticipated Difficulty", ResponseKind::Likert}}},
      {"content_selection",
       Phase::Post,
       {{"actual_difficulty", "Actual Difficulty", ResponseKind::Likert},
        {"text_presentation_quality", "Text Presentation Quality", ResponseKind::Likert},
        {"docs_viewed", "Average number of docs viewed per search", ResponseKind::Count},
        {"usefulness_of_results", "The usefulness of Search results", ResponseKind::Likert},
        {"text_relevance", "Text Relevance", ResponseKind::Likert}}},
      {"interaction_with_content",
       Phase::Post,
       {{"cognitively_engaged", "Cognitively Engaged", ResponseKind::Likert},
        {"suggestion_skills", "Suggestions Skills", ResponseKind::Likert},
        {"system_understanding_input", "System Understanding Input", ResponseKind::Likert},
        {"average_satisfaction", "Average Level of Satisfaction", ResponseKind::Likert}}},
      {"post_search",
       Phase::Post,
       {{"search_success", "Search Success", ResponseKind::Likert},
        {"results_presentation", "Presentation of the Search Results", ResponseKind::Likert},
        {"knowledge_expansion", "Expansion of knowledge after the search", ResponseKind::Likert},
        {"topic_understanding", "Understanding about the Topic", ResponseKind::Likert}}},
  };
  for (const auto& g : groups) {
    std::vector<std::string> members;
    for (const auto& r : g.rows) {
      Item item = likert(std::string(r.id), std::string(r.prompt), "very low", "very high",
                         g.phase);
      item.kind = r.kind;
      if (r.kind == ResponseKind::Count) {
        item.negative_anchor = "none";
        item.positive_anchor = "many";
      }
      in.items.push_back(std::move(item));
      members.emplace_back(r.id);
    }
    in.subscales.emplace_back(std::string(g.subscale), std::move(members));
  }
  return in;
}

Instrument make_knowledge_gain() {
  Instrument in;
  in.instrument_id = instrument_ids::kKnowledgeGain;
  in.name = "Knowledge Gain";
  in.segment = Segment::Contentment;
  in.section = "knowledge gain";
  Item pre = likert("pre_summary", "Write a short summary of what you know about the topic.",
                    "irrelevant facts", "specific, associated and critiqued facts", Phase::Pre);
  pre.kind = ResponseKind::Summary;
  Item post = likert("post_summary",
                     "Write a short summary of what you now know about the topic.",
                     "irrelevant facts", "specific, associated and critiqued facts", Phase::Post);
  post.kind = ResponseKind::Summary;
  in.items = {pre, post};
  return in;
}

// --- override document parsing ---------------------------------------------

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + "." + key, "missing required field");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw ParseError(path + "." + key, "expected string");
  return v.get<std::string>();
}

bool optional_bool(const json& obj, const char* key, const std::string& path, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw ParseError(path + "." + key, "expected boolean");
  return it->get<bool>();
}

Item parse_item(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected object");
  Item item;
  item.item_id = require_string(j, "item_id", path);
  item.prompt = require_string(j, "prompt", path);
  for (const char* key : {"negative_anchor", "positive_anchor"}) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
      throw ParseError(path + "." + key, "anchors required");
    }
  }
  item.negative_anchor = j.at("negative_anchor").get<std::string>();
  item.positive_anchor = j.at("positive_anchor").get<std::string>();
  const std::string phase = require_string(j, "phase", path);
  auto parsed = parse_phase(phase);
  if (!parsed) throw ParseError(path + ".phase", "expected \"pre\" or \"post\"");
  item.phase = *parsed;
  item.reverse_coded = optional_bool(j, "reverse_coded", path, false);
  if (auto it = j.find("kind"); it != j.end()) {
    const std::string kind = it->is_string() ? it->get<std::string>() : "";
    if (kind == "likert") item.kind = ResponseKind::Likert;
    else if (kind == "count") item.kind = ResponseKind::Count;
    else if (kind == "summary") item.kind = ResponseKind::Summary;
    else throw ParseError(path + ".kind", "expected likert, count or summary");
  }
  return item;
}

Instrument parse_instrument(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected object");
  Instrument in;
  in.instrument_id = require_string(j, "instrument_id", path);
  if (in.instrument_id.empty()) throw ParseError(path + ".instrument_id", "must be non-empty");
  in.name = require_string(j, "name", path);
  const std::string segment = require_string(j, "segment", path);
  if (segment == "exploration") in.segment = Segment::Exploration;
  else if (segment == "contentment") in.segment = Segment::Contentment;
  else throw ParseError(path + ".segment", "expected exploration or contentment");
  if (auto it = j.find("scoring_transform"); it != j.end()) {
    const std::string t = it->is_string() ? it->get<std::string>() : "";
    if (t == "raw") in.scoring_transform = ScoringTransform::Raw;
    else if (t == "centered") in.scoring_transform = ScoringTransform::Centered;
    else throw ParseError(path + ".scoring_transform", "expected raw or centered");
  }
  in.higher_is_better = optional_bool(j, "higher_is_better", path, true);
  in.section = j.contains("section") ? require_string(j, "section", path) : in.name;

  const json& items = require(j, "items", path);
  if (!items.is_array()) throw ParseError(path + ".items", "expected array");
  for (std::size_t i = 0; i < items.size(); ++i) {
    in.items.push_back(parse_item(items[i], path + ".items[" + std::to_string(i) + "]"));
  }
  if (auto it = j.find("subscales"); it != j.end()) {
    if (!it->is_array()) throw ParseError(path + ".subscales", "expected array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string sp = path + ".subscales[" + std::to_string(i) + "]";
      const json& s = (*it)[i];
      if (!s.is_object()) throw ParseError(sp, "expected object");
      std::string id = require_string(s, "subscale_id", sp);
      const json& members = require(s, "items", sp);
      if (!members.is_array()) throw ParseError(sp + ".items", "expected array");
      std::vector<std::string> ids;
      for (const auto& m : members) {
        if (!m.is_string()) throw ParseError(sp + ".items", "expected array of strings");
        ids.push_back(m.get<std::string>());
      }
      in.subscales.emplace_back(std::move(id), std::move(ids));
    }
  }
  auto problems = check_instrument(in);
  if (!problems.empty()) throw ParseError(path, problems.front());
  return in;
}

}  // namespace

std::vector<std::string> check_instrument(const Instrument& in) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& item : in.items) {
    if (!seen.insert(item.item_id).second) {
      out.push_back(in.instrument_id + ": duplicate item_id " + item.item_id);
    }
    if (item.negative_anchor.empty() || item.positive_anchor.empty()) {
      out.push_back(in.instrument_id + "/" + item.item_id + ": anchors required");
    }
  }
  std::set<std::string> subscale_ids;
  for (const auto& [sid, members] : in.subscales) {
    if (!subscale_ids.insert(sid).second) {
      out.push_back(in.instrument_id + ": duplicate subscale " + sid);
    }
    if (members.empty()) out.push_back(in.instrument_id + "/" + sid + ": empty subscale");
    for (const auto& m : members) {
      if (!seen.count(m)) {
        out.push_back(in.instrument_id + "/" + sid + ": unknown item " + m);
      }
    }
  }
  return out;
}

InstrumentRegistry builtin_registry() {
  InstrumentRegistry reg;
  for (Instrument in : {make_pssuq(), make_ueq_s(), make_nasa_tlx(), make_sal(),
                        make_knowledge_gain()}) {
    std::string id = in.instrument_id;
    reg.emplace(std::move(id), std::move(in));
  }
  return reg;
}

InstrumentRegistry apply_overrides(std::string_view json_text, InstrumentRegistry base,
                                   const std::string& source) {
  if (json_text.find_first_not_of(" \t\r\n") == std::string_view::npos) return base;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, e.what());
  }
  if (!doc.is_object()) throw ParseError(source, "expected a JSON object");
  auto it = doc.find("instruments");
  if (it == doc.end()) return base;
  if (!it->is_array()) throw ParseError(source + ": instruments", "expected array");
  for (std::size_t i = 0; i < it->size(); ++i) {
    Instrument in = parse_instrument((*it)[i], "instruments[" + std::to_string(i) + "]");
    std::string id = in.instrument_id;
    base.insert_or_assign(std::move(id), std::move(in));
  }
  return base;
}

InstrumentRegistry load_overrides(const std::filesystem::path& path, InstrumentRegistry base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open instrument override file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return apply_overrides(buf.str(), std::move(base), path.string());
}

std::string instrument_to_json(const Instrument& in) {
  json j;
  j["instrument_id"] = in.instrument_id;
  j["name"] = in.name;
  j["segment"] = to_string(in.segment);
  j["scoring_transform"] = to_string(in.scoring_transform);
  j["higher_is_better"] = in.higher_is_better;
  j["section"] = in.section;
  j["items"] = json::array();
  for (const auto& item : in.items) {
    j["items"].push_back({{"item_id", item.item_id},
                          {"prompt", item.prompt},
                          {"negative_anchor", item.negative_anchor},
                          {"positive_anchor", item.positive_anchor},
                          {"phase", to_string(item.phase)},
                          {"reverse_coded", item.reverse_coded},
                          {"kind", to_string(item.kind)}});
  }
  j["subscales"] = json::array();
  for (const auto& [sid, members] : in.subscales) {
    j["subscales"].push_back({{"subscale_id", sid}, {"items", members}});
  }
  return j.dump(2);
}

std::vector<std::string> ordered_instrument_ids(const std::vector<std::string>& ids) {
  static const std::vector<std::string_view> kOrder{
      instrument_ids::kPssuq, instrument_ids::kUeqS, instrument_ids::kNasaTlx,
      instrument_ids::kSal, instrument_ids::kKnowledgeGain};
  const auto rank = [&](const std::string& id) {
    auto it = std::find(kOrder.begin(), kOrder.end(), id);
    return static_cast<std::size_t>(it - kOrder.begin());
  };
  std::vector<std::string> out = ids;
  std::sort(out.begin(), out.end(), [&](const std::string& a, const std::string& b) {
    const auto ra = rank(a), rb = rank(b);
    return ra != rb ? ra < rb : a < b;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace iecsi
