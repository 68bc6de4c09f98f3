#include "iecsi/service.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <random>
#include <set>

#include "httplib.h"
#include "iecsi/codec.hpp"
#include "iecsi/errors.hpp"
#include "iecsi/knowledge_gain.hpp"
#include "iecsi/report.hpp"

namespace iecsi {

namespace fs = std::filesystem;
using codec::json;

std::string_view to_string(Role r) {
  switch (r) {
    case Role::Participant: return "participant";
    case Role::Annotator: return "annotator";
    case Role::Researcher: return "researcher";
  }
  return "participant";
}

namespace {

std::optional<Role> parse_role(std::string_view s) {
  if (s == "participant") return Role::Participant;
  if (s == "annotator") return Role::Annotator;
  if (s == "researcher") return Role::Researcher;
  return std::nullopt;
}

struct HttpError : std::runtime_error {
  HttpError(int status, const std::string& what, json detail = nullptr)
      : std::runtime_error(what), status(status), detail(std::move(detail)) {}
  int status;
  json detail;
};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(codec::canonical_dump(body), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message,
                const json& detail = nullptr) {
  json body = {{"error", message}};
  if (!detail.is_null()) body.update(detail);
  send_json(res, status, body);
}

template <typename F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const HttpError& e) {
    send_error(res, e.status, e.what(), e.detail);
  } catch (const ValidationError& e) {
    send_error(res, 400, "validation failed", {{"violations", e.violations()}});
  } catch (const GateError& e) {
    json kappas = json::object();
    for (const auto& [dim, k] : e.kappas()) kappas[dim] = k ? json(*k) : json(nullptr);
    send_error(res, 409, e.what(), {{"kappa", kappas}});
  } catch (const ParseError& e) {
    send_error(res, 400, e.what());
  } catch (const ContractError& e) {
    send_error(res, 400, e.what());
  } catch (const DomainError& e) {
    send_error(res, 422, e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

json body_of(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j = codec::parse_document(req.body, "request body");
  if (!j.is_object()) throw HttpError(400, "request body must be an object");
  return j;
}

std::string string_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw HttpError(400, std::string("missing string field ") + key);
  }
  return it->get<std::string>();
}

int int_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer()) {
    throw HttpError(400, std::string("missing integer field ") + key);
  }
  return it->get<int>();
}

std::string random_token() {
  static std::mutex m;
  static std::random_device rd;
  std::lock_guard guard(m);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (int i = 0; i < 4; ++i) {
    unsigned v = rd();
    for (int k = 0; k < 8; ++k) {
      out += hex[v & 0xF];
      v >>= 4;
    }
  }
  return out;
}

std::string now_iso8601() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool wants_summaries(const StudyDesign& d) {
  for (const auto& id : d.instruments) {
    if (id == instrument_ids::kKnowledgeGain) return true;
  }
  return false;
}

std::optional<Phase> open_phase(SessionState s) {
  if (s == SessionState::Created) return Phase::Pre;
  if (s == SessionState::TaskDone) return Phase::Post;
  return std::nullopt;
}

// Likert items the participant must answer in a phase, in report order.
std::vector<std::pair<const Instrument*, const Item*>> phase_items(const Study& study,
                                                                   Phase phase) {
  std::vector<std::pair<const Instrument*, const Item*>> out;
  for (const auto& id : ordered_instrument_ids(study.design.instruments)) {
    const Instrument& in = study.registry.at(id);
    for (const auto& item : in.items) {
      if (item.kind == ResponseKind::Likert && item.phase == phase) out.emplace_back(&in, &item);
    }
  }
  return out;
}

bool phase_complete(const Study& study, const Session& s, Phase phase) {
  const auto& answered = phase == Phase::Pre ? s.pre_responses : s.post_responses;
  std::set<std::pair<std::string, std::string>> have;
  for (const auto& r : answered) have.emplace(r.instrument_id, r.item_id);
  for (const auto& [in, item] : phase_items(study, phase)) {
    if (!have.count({in->instrument_id, item->item_id})) return false;
  }
  if (wants_summaries(study.design)) {
    const auto& doc = phase == Phase::Pre ? s.pre_summary : s.post_summary;
    if (!doc) return false;
  }
  return true;
}

void advance(const Study& study, Session& s) {
  if (s.state == SessionState::Created && phase_complete(study, s, Phase::Pre)) {
    s.state = SessionState::PreDone;
  } else if (s.state == SessionState::TaskDone && phase_complete(study, s, Phase::Post)) {
    s.state = SessionState::PostDone;
  }
}

json questionnaire(const Study& study, const Session& s, Phase phase) {
  const auto& answered = phase == Phase::Pre ? s.pre_responses : s.post_responses;
  std::set<std::pair<std::string, std::string>> have;
  for (const auto& r : answered) have.emplace(r.instrument_id, r.item_id);
  json items = json::array();
  for (const auto& [in, item] : phase_items(study, phase)) {
    items.push_back({{"instrument_id", in->instrument_id},
                     {"item_id", item->item_id},
                     {"prompt", item->prompt},
                     {"negative_anchor", item->negative_anchor},
                     {"positive_anchor", item->positive_anchor},
                     {"scale_min", study.design.analysis.scale_min},
                     {"scale_max", study.design.analysis.scale_max},
                     {"answered", have.count({in->instrument_id, item->item_id}) > 0}});
  }
  const auto& doc = phase == Phase::Pre ? s.pre_summary : s.post_summary;
  json step = {{"step", phase == Phase::Pre ? "pre_questionnaire" : "post_questionnaire"},
               {"session_id", s.session_id},
               {"topic", s.topic},
               {"items", items},
               {"summary_required", wants_summaries(study.design)},
               {"summary_submitted", doc.has_value()}};
  if (phase == Phase::Pre) {
    json demo = json::object();
    if (auto p = std::find_if(study.participants.begin(), study.participants.end(),
                              [&](const Participant& x) {
                                return x.participant_id == s.participant_id;
                              });
        p != study.participants.end()) {
      demo = p->demographics;
    }
    step["demographics"] = demo;
  }
  return step;
}

Session& session_in(Study& study, const std::string& session_id) {
  for (auto& s : study.sessions) {
    if (s.session_id == session_id) return s;
  }
  throw HttpError(404, "unknown session " + session_id);
}

json agreement_json(const Study& study) {
  const StudyAgreement a = summary_agreement(study.sessions, study.design.analysis);
  if (!a.sufficient) {
    return {{"status", "insufficient"},
            {"annotators", a.annotators},
            {"doubly_rated_summaries", a.doubly_rated}};
  }
  json dims = json::object();
  for (const auto& [dim, d] : a.dimensions) {
    dims[dim] = {{"kappa", d.kappa ? json(*d.kappa) : json(nullptr)},
                 {"observed_agreement", d.observed_agreement},
                 {"pairs", d.pairs},
                 {"passes", d.passes}};
  }
  return {{"status", "ok"},
          {"annotators", a.annotators},
          {"doubly_rated_summaries", a.doubly_rated},
          {"threshold", study.design.analysis.kappa_threshold},
          {"dimensions", dims}};
}

}  // namespace

Service::Service(fs::path data_root)
    : store_(std::move(data_root)), server_(std::make_unique<httplib::Server>()) {
  const fs::path file = store_.root() / "tokens.json";
  if (fs::exists(file)) {
    std::ifstream in(file, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const json j = codec::parse_document(text, "tokens.json");
    for (const auto& [token, t] : j.items()) {
      auto role = parse_role(t.at("role").get<std::string>());
      if (!role) throw ParseError("tokens.json." + token, "unknown role");
      tokens_[token] = {*role, t.at("study_id").get<std::string>(),
                        t.value("session_id", std::string()),
                        t.value("annotator_id", std::string())};
    }
  }
  routes();
}

Service::~Service() = default;

bool Service::bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
    return port_ > 0;
  }
  if (!server_->bind_to_port(host, port)) return false;
  port_ = port;
  return true;
}

bool Service::run() { return server_->listen_after_bind(); }

void Service::stop() {
  server_->stop();
  store_.flush_journal();
}

std::string Service::issue_researcher_token(const std::string& study_id) {
  if (!store_.exists(study_id)) throw ContractError("unknown study " + study_id);
  {
    std::lock_guard guard(tokens_mutex_);
    for (const auto& [value, t] : tokens_) {
      if (t.role == Role::Researcher && t.study_id == study_id) return value;
    }
  }
  return issue({Role::Researcher, study_id, {}, {}});
}

std::optional<SessionToken> Service::resolve(const std::string& token) const {
  std::lock_guard guard(tokens_mutex_);
  auto it = tokens_.find(token);
  if (it == tokens_.end()) return std::nullopt;
  return it->second;
}

std::string Service::issue(const SessionToken& token) {
  std::string value = random_token();
  {
    std::lock_guard guard(tokens_mutex_);
    while (tokens_.count(value)) value = random_token();
    tokens_[value] = token;
  }
  persist_tokens();
  return value;
}

void Service::persist_tokens() {
  std::lock_guard guard(tokens_mutex_);
  json j = json::object();
  for (const auto& [value, t] : tokens_) {
    json e = {{"role", to_string(t.role)}, {"study_id", t.study_id}};
    if (!t.session_id.empty()) e["session_id"] = t.session_id;
    if (!t.annotator_id.empty()) e["annotator_id"] = t.annotator_id;
    j[value] = e;
  }
  const fs::path file = store_.root() / "tokens.json";
  const fs::path tmp = store_.root() / ".tokens.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << codec::canonical_dump(j);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, file);
}

std::mutex& Service::study_lock(const std::string& study_id) {
  std::lock_guard guard(locks_mutex_);
  auto& slot = locks_[study_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

void Service::routes() {
  auto& srv = *server_;

  const auto authorize = [this](const httplib::Request& req, Role role) {
    const std::string header = req.get_header_value("Authorization");
    constexpr std::string_view kBearer = "Bearer ";
    if (header.rfind(kBearer, 0) != 0) throw HttpError(401, "missing bearer token");
    auto t = resolve(header.substr(kBearer.size()));
    if (!t || t->role != role) throw HttpError(401, "invalid token");
    return *t;
  };
  const auto authorize_study = [this](const httplib::Request& req, const std::string& study_id,
                                      std::initializer_list<Role> roles) {
    if (!store_.exists(study_id)) throw HttpError(404, "unknown study " + study_id);
    const std::string header = req.get_header_value("Authorization");
    constexpr std::string_view kBearer = "Bearer ";
    if (header.rfind(kBearer, 0) != 0) throw HttpError(401, "missing bearer token");
    auto t = resolve(header.substr(kBearer.size()));
    if (!t || t->study_id != study_id ||
        std::find(roles.begin(), roles.end(), t->role) == roles.end()) {
      throw HttpError(401, "invalid token");
    }
    return *t;
  };

  srv.Post("/v1/studies", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = body_of(req);
      Study study;
      study.design = codec::design_from_json(body, "design");
      if (study.design.benchmark_ref && !study.design.benchmark) {
        throw HttpError(400, "benchmark must be given inline");
      }
      if (!is_safe_id(study.design.study_id)) {
        throw HttpError(400, "validation failed",
                        {{"violations", {"study_id must match [A-Za-z0-9._-]+"}}});
      }
      auto report = validate_study(study);
      if (!report.ok()) throw ValidationError(report.violations);
      std::lock_guard guard(study_lock(study.design.study_id));
      if (store_.exists(study.design.study_id)) {
        throw HttpError(409, "study " + study.design.study_id + " already exists");
      }
      store_.save(study);
      const std::string token = issue({Role::Researcher, study.design.study_id, {}, {}});
      send_json(res, 201, {{"study_id", study.design.study_id}, {"researcher_token", token}});
    });
  });

  srv.Post(R"(/v1/studies/([^/]+)/sessions)",
           [this, authorize_study](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const std::string study_id = req.matches[1];
               authorize_study(req, study_id, {Role::Researcher});
               const json body = body_of(req);
               const std::string pid = string_field(body, "participant_id");
               const std::string cid = string_field(body, "condition_id");
               const std::string sid = body.contains("session_id")
                                           ? string_field(body, "session_id")
                                           : pid + "-" + cid;
               if (!is_safe_id(sid)) throw HttpError(400, "unsafe session_id");
               std::lock_guard guard(study_lock(study_id));
               Study study = store_.load(study_id);
               if (study.find_session(sid)) throw HttpError(409, "session " + sid + " exists");
               auto p = std::find_if(
                   study.participants.begin(), study.participants.end(),
                   [&](const Participant& x) { return x.participant_id == pid; });
               if (p == study.participants.end()) {
                 Participant np{pid, {}};
                 if (auto it = body.find("demographics"); it != body.end()) {
                   np.demographics = it->get<std::map<std::string, std::string>>();
                 }
                 study.participants.push_back(std::move(np));
               }
               Session s;
               s.session_id = sid;
               s.participant_id = pid;
               s.condition_id = cid;
               s.topic = body.value("topic", std::string());
               advance(study, s);
               study.sessions.push_back(s);
               store_.save(study);
               const std::string token = issue({Role::Participant, study_id, sid, {}});
               send_json(res, 201, {{"session_id", sid}, {"participant_token", token}});
             });
           });

  srv.Post(R"(/v1/studies/([^/]+)/annotators)",
           [this, authorize_study](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const std::string study_id = req.matches[1];
               authorize_study(req, study_id, {Role::Researcher});
               const std::string aid = string_field(body_of(req), "annotator_id");
               const std::string token = issue({Role::Annotator, study_id, {}, aid});
               send_json(res, 201, {{"annotator_id", aid}, {"annotator_token", token}});
             });
           });

  srv.Post(R"(/v1/studies/([^/]+)/sessions/([^/]+)/close)",
           [this, authorize_study](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const std::string study_id = req.matches[1];
               authorize_study(req, study_id, {Role::Researcher});
               std::lock_guard guard(study_lock(study_id));
               Study study = store_.load(study_id);
               Session& s = session_in(study, req.matches[2]);
               if (s.state == SessionState::Closed) throw HttpError(410, "session closed");
               if (s.state != SessionState::PostDone) {
                 throw HttpError(409, "session " + s.session_id + " has not finished");
               }
               s.state = SessionState::Closed;
               store_.save(study);
               send_json(res, 200, {{"session_id", s.session_id}, {"state", "closed"}});
             });
           });

  srv.Get("/v1/session/next",
          [this, authorize](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
              const SessionToken t = authorize(req, Role::Participant);
              std::lock_guard guard(study_lock(t.study_id));
              Study study = store_.load(t.study_id);
              const Session& s = session_in(study, t.session_id);
              switch (s.state) {
                case SessionState::Created:
                  send_json(res, 200, questionnaire(study, s, Phase::Pre));
                  break;
                case SessionState::PreDone:
                  send_json(res, 200, {{"step", "task"}, {"session_id", s.session_id},
                                       {"topic", s.topic}});
                  break;
                case SessionState::TaskDone:
                  send_json(res, 200, questionnaire(study, s, Phase::Post));
                  break;
                case SessionState::PostDone:
                  send_json(res, 200, {{"step", "done"}, {"session_id", s.session_id}});
                  break;
                case SessionState::Closed:
                  throw HttpError(410, "session closed");
              }
            });
          });

  srv.Post("/v1/session/responses",
           [this, authorize](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const SessionToken t = authorize(req, Role::Participant);
               const json body = body_of(req);
               std::lock_guard guard(study_lock(t.study_id));
               Study study = store_.load(t.study_id);
               Session& s = session_in(study, t.session_id);
               if (s.state == SessionState::Closed) throw HttpError(410, "session closed");
               const auto phase = open_phase(s.state);
               if (!phase) {
                 throw HttpError(409, "no questionnaire is open in state " +
                                          std::string(to_string(s.state)));
               }
               auto& list = *phase == Phase::Pre ? s.pre_responses : s.post_responses;
               std::set<std::pair<std::string, std::string>> seen;
               for (const auto& r : list) seen.emplace(r.instrument_id, r.item_id);
               const auto it = body.find("responses");
               if (it == body.end() || !it->is_array()) {
                 throw HttpError(400, "responses must be an array");
               }
               const AnalysisConfig& cfg = study.design.analysis;
               std::vector<ItemResponse> batch;
               for (std::size_t i = 0; i < it->size(); ++i) {
                 const json& r = (*it)[i];
                 const std::string where = "responses[" + std::to_string(i) + "]";
                 if (!r.is_object()) throw HttpError(400, where + ": expected object");
                 ItemResponse ir{string_field(r, "instrument_id"), string_field(r, "item_id"),
                                 int_field(r, "value"), r.value("timestamp", std::string())};
                 if (ir.timestamp.empty()) ir.timestamp = now_iso8601();
                 const Instrument* in = study.find_instrument(ir.instrument_id);
                 if (!in || std::find(study.design.instruments.begin(),
                                      study.design.instruments.end(),
                                      ir.instrument_id) == study.design.instruments.end()) {
                   throw HttpError(422, where + ": instrument " + ir.instrument_id +
                                            " is not part of this study");
                 }
                 const Item* item = in->find_item(ir.item_id);
                 if (!item || item->kind != ResponseKind::Likert) {
                   throw HttpError(422, where + ": " + ir.item_id + " is not a Likert item of " +
                                            ir.instrument_id);
                 }
                 if (item->phase != *phase) {
                   throw HttpError(422, where + ": " + ir.item_id + " belongs to the " +
                                            std::string(to_string(item->phase)) +
                                            " questionnaire");
                 }
                 if (ir.value < cfg.scale_min || ir.value > cfg.scale_max) {
                   throw HttpError(422, where + ": value " + std::to_string(ir.value) +
                                            " out of scale " + std::to_string(cfg.scale_min) +
                                            ".." + std::to_string(cfg.scale_max));
                 }
                 if (!seen.emplace(ir.instrument_id, ir.item_id).second) {
                   throw HttpError(409, where + ": duplicate response for " + ir.instrument_id +
                                            "/" + ir.item_id);
                 }
                 batch.push_back(std::move(ir));
               }
               if (auto d = body.find("demographics"); d != body.end() && *phase == Phase::Pre) {
                 if (!d->is_object()) throw HttpError(400, "demographics must be an object");
                 for (auto& p : study.participants) {
                   if (p.participant_id != s.participant_id) continue;
                   for (const auto& [k, v] : d->items()) {
                     if (!v.is_string()) throw HttpError(400, "demographics." + k + ": string");
                     p.demographics[k] = v.get<std::string>();
                   }
                 }
               }
               list.insert(list.end(), batch.begin(), batch.end());
               advance(study, s);
               store_.save(study);
               send_json(res, 200, {{"accepted", batch.size()},
                                    {"state", to_string(s.state)}});
             });
           });

  srv.Post("/v1/session/task",
           [this, authorize](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const SessionToken t = authorize(req, Role::Participant);
               const json body = body_of(req);
               std::lock_guard guard(study_lock(t.study_id));
               Study study = store_.load(t.study_id);
               Session& s = session_in(study, t.session_id);
               if (s.state == SessionState::Closed) throw HttpError(410, "session closed");
               if (s.state != SessionState::PreDone) {
                 throw HttpError(409, "task is not the current step");
               }
               const int docs = int_field(body, "docs_viewed");
               if (docs < 0) throw HttpError(422, "docs_viewed must be non-negative");
               s.docs_viewed = docs;
               s.state = SessionState::TaskDone;
               advance(study, s);
               store_.save(study);
               send_json(res, 200, {{"state", to_string(s.state)}});
             });
           });

  srv.Post("/v1/session/summary",
           [this, authorize](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const SessionToken t = authorize(req, Role::Participant);
               const json body = body_of(req);
               const auto phase = parse_phase(string_field(body, "phase"));
               if (!phase) throw HttpError(400, "phase must be pre or post");
               auto text = body.find("text");
               if (text == body.end() || !text->is_string()) {
                 throw HttpError(400, "missing string field text");
               }
               std::lock_guard guard(study_lock(t.study_id));
               Study study = store_.load(t.study_id);
               Session& s = session_in(study, t.session_id);
               if (s.state == SessionState::Closed) throw HttpError(410, "session closed");
               if (!wants_summaries(study.design)) {
                 throw HttpError(409, "this study does not collect summaries");
               }
               auto& slot = *phase == Phase::Pre ? s.pre_summary : s.post_summary;
               if (slot) throw HttpError(409, "summary already submitted");
               if (open_phase(s.state) != *phase) {
                 throw HttpError(409, std::string(to_string(*phase)) +
                                          " summary is not the current step");
               }
               SummaryDocument doc;
               doc.summary_id = s.session_id + "-" + std::string(to_string(*phase));
               doc.phase = *phase;
               doc.text = text->get<std::string>();
               const bool empty = doc.text.empty();
               slot = std::move(doc);
               advance(study, s);
               store_.save(study);
               send_json(res, 201, {{"summary_id", slot->summary_id},
                                    {"empty_text", empty},
                                    {"state", to_string(s.state)}});
             });
           });

  srv.Post("/v1/ratings",
           [this, authorize](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const SessionToken t = authorize(req, Role::Annotator);
               const json body = body_of(req);
               const std::string summary_id = string_field(body, "summary_id");
               const SummaryRating rating{t.annotator_id, int_field(body, "dqual"),
                                          int_field(body, "dintrp"), int_field(body, "dcrit")};
               if (rating.dqual < 0 || rating.dqual > kDqualMax || rating.dintrp < 0 ||
                   rating.dintrp > kDintrpMax || rating.dcrit < 0 || rating.dcrit > kDcritMax) {
                 throw HttpError(422, "ratings out of range: dqual 0..3, dintrp 0..2, dcrit 0..1");
               }
               std::lock_guard guard(study_lock(t.study_id));
               Study study = store_.load(t.study_id);
               SummaryDocument* doc = nullptr;
               for (auto& s : study.sessions) {
                 for (auto* d : {&s.pre_summary, &s.post_summary}) {
                   if (*d && (*d)->summary_id == summary_id) doc = &**d;
                 }
               }
               if (!doc) throw HttpError(404, "unknown summary " + summary_id);
               for (const auto& r : doc->ratings) {
                 if (r.annotator_id == t.annotator_id) {
                   throw HttpError(409, "summary already rated by " + t.annotator_id);
                 }
               }
               if (doc->ratings.size() >= 2) {
                 throw HttpError(409, "summary already has two ratings");
               }
               doc->ratings.push_back(rating);
               store_.save(study);
               send_json(res, 201, {{"summary_id", summary_id},
                                    {"annotator_id", t.annotator_id}});
             });
           });

  srv.Get(R"(/v1/studies/([^/]+)/agreement)",
          [this, authorize_study](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
              const std::string study_id = req.matches[1];
              authorize_study(req, study_id, {Role::Researcher, Role::Annotator});
              std::lock_guard guard(study_lock(study_id));
              send_json(res, 200, agreement_json(store_.load(study_id)));
            });
          });

  srv.Get(R"(/v1/studies/([^/]+)/analysis)",
          [this, authorize_study](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
              const std::string study_id = req.matches[1];
              authorize_study(req, study_id, {Role::Researcher});
              Study snapshot;
              {
                std::lock_guard guard(study_lock(study_id));
                snapshot = store_.load(study_id);
              }
              const AnalysisReport report = analyze(snapshot, {.allow_incomplete = true});
              res.status = 200;
              res.set_content(render(report, ReportFormat::Structured), "application/json");
            });
          });
}

}  // namespace iecsi
