#include "iecsi/storage.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "csv.hpp"
#include "iecsi/codec.hpp"
#include "iecsi/errors.hpp"

namespace iecsi {

namespace fs = std::filesystem;
using codec::json;

bool is_safe_id(std::string_view id) {
  if (id.empty() || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void sync_path(const fs::path& path) {
  const int fd = ::open(path.c_str(), O_RDONLY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
  }
  sync_path(path);
}

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

void check_header(const std::vector<csv::Row>& rows, std::string_view expected,
                  const std::string& source) {
  if (rows.empty()) throw ParseError(source + ":1", "missing header row");
  std::string header = csv::format_row(rows.front().fields);
  header.pop_back();
  if (header != expected) {
    throw ParseError(source + ":1", "header must be: " + std::string(expected));
  }
}

std::string at_row(const std::string& source, const csv::Row& row) {
  return source + ":" + std::to_string(row.line);
}

void expect_width(const csv::Row& row, std::size_t width, const std::string& source) {
  if (row.fields.size() != width) {
    throw ParseError(at_row(source, row), "expected " + std::to_string(width) + " columns, got " +
                                              std::to_string(row.fields.size()));
  }
}

void import_ratings(std::string_view text, Study& study, const std::string& source) {
  const auto rows = csv::parse(text, source);
  check_header(rows, kRatingsHeader, source);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    expect_width(row, 7, source);
    const auto& f = row.fields;
    const std::string where = at_row(source, row);
    if (f[0] != study.design.study_id) throw ParseError(where, "study_id mismatch: " + f[0]);
    Session* s = study.find_session(f[1]);
    if (!s) throw ParseError(where, "unknown session_id " + f[1]);
    auto phase = parse_phase(f[2]);
    if (!phase) throw ParseError(where, "bad phase " + f[2]);
    auto& doc = *phase == Phase::Pre ? s->pre_summary : s->post_summary;
    if (!doc) throw ParseError(where, "session " + f[1] + " has no " + f[2] + " summary");
    SummaryRating rating;
    rating.annotator_id = f[3];
    const std::array<std::pair<const char*, int>, 3> limits{
        {{"dqual", kDqualMax}, {"dintrp", kDintrpMax}, {"dcrit", kDcritMax}}};
    std::array<int, 3> scores{};
    for (std::size_t k = 0; k < 3; ++k) {
      auto v = parse_int(f[4 + k]);
      if (!v) throw ParseError(where, std::string("bad integer in ") + limits[k].first);
      if (*v < 0 || *v > limits[k].second) {
        throw ParseError(where, std::string(limits[k].first) + " " + f[4 + k] + " out of range 0.." +
                                    std::to_string(limits[k].second));
      }
      scores[k] = *v;
    }
    rating.dqual = scores[0];
    rating.dintrp = scores[1];
    rating.dcrit = scores[2];
    for (const auto& existing : doc->ratings) {
      if (existing.annotator_id == rating.annotator_id) {
        throw ParseError(where, "duplicate rating by " + rating.annotator_id);
      }
    }
    doc->ratings.push_back(std::move(rating));
  }
}

void import_annotations(std::string_view text, Study& study, const std::string& source) {
  const auto rows = csv::parse(text, source);
  check_header(rows, kAnnotationsHeader, source);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    expect_width(row, 5, source);
    const auto& f = row.fields;
    if (f[0] != study.design.study_id) {
      throw ParseError(at_row(source, row), "study_id mismatch: " + f[0]);
    }
    study.annotations.push_back({f[1], f[2], f[3], f[4]});
  }
}

std::string responses_csv(const Study& study) {
  std::string out(kResponsesHeader);
  out += '\n';
  for (const auto& s : study.sessions) {
    for (Phase phase : {Phase::Pre, Phase::Post}) {
      const auto& list = phase == Phase::Pre ? s.pre_responses : s.post_responses;
      for (const auto& r : list) {
        out += csv::format_row({study.design.study_id, s.session_id, s.participant_id,
                                s.condition_id, std::string(to_string(phase)), r.instrument_id,
                                r.item_id, std::to_string(r.value), r.timestamp});
      }
    }
  }
  return out;
}

std::string ratings_csv(const Study& study) {
  std::string out(kRatingsHeader);
  out += '\n';
  for (const auto& s : study.sessions) {
    for (const auto* doc : {&s.pre_summary, &s.post_summary}) {
      if (!*doc) continue;
      for (const auto& r : (*doc)->ratings) {
        out += csv::format_row({study.design.study_id, s.session_id,
                                std::string(to_string((*doc)->phase)), r.annotator_id,
                                std::to_string(r.dqual), std::to_string(r.dintrp),
                                std::to_string(r.dcrit)});
      }
    }
  }
  return out;
}

std::string benchmark_file_name(const StudyDesign& d) {
  return d.benchmark_ref.value_or("benchmark.json");
}

}  // namespace

std::size_t import_responses_csv_text(std::string_view text, Study& study,
                                      const std::string& source) {
  const auto rows = csv::parse(text, source);
  check_header(rows, kResponsesHeader, source);
  const auto& cfg = study.design.analysis;

  struct Staged {
    Session* session;
    Phase phase;
    ItemResponse response;
  };
  std::vector<Staged> staged;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (const auto& s : study.sessions) {
    for (const auto* list : {&s.pre_responses, &s.post_responses}) {
      for (const auto& r : *list) seen.emplace(s.session_id, r.instrument_id, r.item_id);
    }
  }

  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    expect_width(row, 9, source);
    const auto& f = row.fields;
    const std::string where = at_row(source, row);
    if (f[0] != study.design.study_id) throw ParseError(where, "study_id mismatch: " + f[0]);
    Session* s = study.find_session(f[1]);
    if (!s) throw ParseError(where, "unknown session_id " + f[1]);
    if (f[2] != s->participant_id) throw ParseError(where, "participant_id does not match session");
    if (f[3] != s->condition_id) throw ParseError(where, "condition_id does not match session");
    auto phase = parse_phase(f[4]);
    if (!phase) throw ParseError(where, "bad phase " + f[4]);
    if (std::find(study.design.instruments.begin(), study.design.instruments.end(), f[5]) ==
        study.design.instruments.end()) {
      throw ParseError(where, "instrument " + f[5] + " is not part of the study");
    }
    const Instrument* in = study.find_instrument(f[5]);
    if (!in) throw ParseError(where, "unknown instrument_id " + f[5]);
    const Item* item = in->find_item(f[6]);
    if (!item) throw ParseError(where, "unknown item_id " + f[6]);
    if (item->kind != ResponseKind::Likert) {
      throw ParseError(where, "item " + f[6] + " does not take Likert responses");
    }
    if (item->phase != *phase) throw ParseError(where, "item " + f[6] + " is not a " + f[4] + " item");
    auto value = parse_int(f[7]);
    if (!value) throw ParseError(where, "bad integer '" + f[7] + "' in column value");
    if (*value < cfg.scale_min || *value > cfg.scale_max) {
      throw ParseError(where, "value " + f[7] + " out of scale " + std::to_string(cfg.scale_min) +
                                  ".." + std::to_string(cfg.scale_max));
    }
    if (!seen.emplace(f[1], f[5], f[6]).second) {
      throw ParseError(where, "duplicate response for " + f[1] + " " + f[5] + "/" + f[6]);
    }
    staged.push_back({s, *phase, ItemResponse{f[5], f[6], *value, f[8]}});
  }
  for (auto& st : staged) {
    auto& list = st.phase == Phase::Pre ? st.session->pre_responses : st.session->post_responses;
    list.push_back(std::move(st.response));
  }
  return staged.size();
}

std::size_t import_responses_csv(const fs::path& path, Study& study) {
  return import_responses_csv_text(read_file(path), study, path.filename().string());
}

Study load_study(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ParseError(dir.string(), "study directory not found");
  Study study;
  study.design = codec::design_from_json(
      codec::parse_document(read_file(dir / "study.json"), "study.json"), "study.json");
  if (study.design.benchmark_ref) {
    const std::string& ref = *study.design.benchmark_ref;
    if (!is_safe_id(ref)) throw ParseError("study.json.benchmark", "must be a plain file name");
    study.design.benchmark = codec::benchmark_from_json(
        codec::parse_document(read_file(dir / ref), ref), ref);
  } else if (study.design.benchmark) {
    study.design.benchmark_ref = "benchmark.json";
  }
  if (fs::exists(dir / "instruments.json")) {
    study.registry = load_overrides(dir / "instruments.json");
  }

  if (fs::exists(dir / "participants.json")) {
    const json doc =
        codec::parse_document(read_file(dir / "participants.json"), "participants.json");
    if (!doc.is_array()) throw ParseError("participants.json", "expected array");
    for (std::size_t i = 0; i < doc.size(); ++i) {
      study.participants.push_back(
          codec::participant_from_json(doc[i], "participants.json[" + std::to_string(i) + "]"));
    }
  }

  const json sessions = codec::parse_document(read_file(dir / "sessions.json"), "sessions.json");
  if (!sessions.is_array()) throw ParseError("sessions.json", "expected array");
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    const std::string w = "sessions.json[" + std::to_string(i) + "]";
    const json& j = sessions[i];
    if (!j.is_object()) throw ParseError(w, "expected object");
    Session s;
    try {
      s.session_id = j.at("session_id").get<std::string>();
      s.participant_id = j.at("participant_id").get<std::string>();
      s.condition_id = j.at("condition_id").get<std::string>();
      s.topic = j.value("topic", "");
      s.docs_viewed = j.value("docs_viewed", 0);
      auto state = parse_session_state(j.at("state").get<std::string>());
      if (!state) throw ParseError(w + ".state", "unknown session state");
      s.state = *state;
    } catch (const codec::json::exception& e) {
      throw ParseError(w, e.what());
    }
    for (auto [key, phase] : {std::pair{"pre_summary", Phase::Pre}, {"post_summary", Phase::Post}}) {
      auto it = j.find(key);
      if (it == j.end() || it->is_null()) continue;
      SummaryDocument doc;
      if (!it->is_object() || !it->contains("summary_id") || !(*it)["summary_id"].is_string()) {
        throw ParseError(w + "." + key, "expected summary reference with summary_id");
      }
      doc.summary_id = (*it)["summary_id"].get<std::string>();
      if (!is_safe_id(doc.summary_id)) throw ParseError(w + "." + key, "unsafe summary_id");
      doc.phase = phase;
      doc.text = read_file(dir / "summaries" / (doc.summary_id + ".txt"));
      (phase == Phase::Pre ? s.pre_summary : s.post_summary) = std::move(doc);
    }
    study.sessions.push_back(std::move(s));
  }

  if (fs::exists(dir / "responses.csv")) {
    import_responses_csv_text(read_file(dir / "responses.csv"), study, "responses.csv");
  }
  if (fs::exists(dir / "ratings.csv")) {
    import_ratings(read_file(dir / "ratings.csv"), study, "ratings.csv");
  }
  if (fs::exists(dir / "annotations.csv")) {
    import_annotations(read_file(dir / "annotations.csv"), study, "annotations.csv");
  }

  auto report = validate_study(study);
  if (!report.ok()) throw ValidationError(report.violations);
  return study;
}

std::map<std::string, std::string> bundle_files(const Study& study) {
  std::map<std::string, std::string> files;
  StudyDesign design = study.design;
  if (design.benchmark) design.benchmark_ref = benchmark_file_name(design);
  files["study.json"] = codec::canonical_dump(codec::to_json(design));
  if (design.benchmark) {
    files[*design.benchmark_ref] = codec::canonical_dump(codec::to_json(*design.benchmark));
  }

  json participants = json::array();
  for (const auto& p : study.participants) participants.push_back(codec::to_json(p));
  files["participants.json"] = codec::canonical_dump(participants);

  json sessions = json::array();
  for (const auto& s : study.sessions) {
    sessions.push_back(codec::session_metadata(s));
    for (const auto* doc : {&s.pre_summary, &s.post_summary}) {
      if (*doc) files["summaries/" + (*doc)->summary_id + ".txt"] = (*doc)->text;
    }
  }
  files["sessions.json"] = codec::canonical_dump(sessions);
  files["responses.csv"] = responses_csv(study);
  files["ratings.csv"] = ratings_csv(study);

  const InstrumentRegistry builtin = builtin_registry();
  json overrides = json::array();
  for (const auto& [id, in] : study.registry) {
    auto it = builtin.find(id);
    if (it == builtin.end() || !(it->second == in)) {
      overrides.push_back(json::parse(instrument_to_json(in)));
    }
  }
  if (!overrides.empty()) {
    files["instruments.json"] = codec::canonical_dump({{"instruments", overrides}});
  }
  if (!study.annotations.empty()) {
    std::string out(kAnnotationsHeader);
    out += '\n';
    for (const auto& a : study.annotations) {
      out += csv::format_row(
          {study.design.study_id, a.condition_id, a.target_id, a.annotator_id, a.sentiment});
    }
    files["annotations.csv"] = out;
  }
  return files;
}

void write_study(const Study& study, const fs::path& dir) {
  auto report = validate_study(study);
  if (!report.ok()) throw ValidationError(report.violations);
  if (study.design.benchmark_ref && !is_safe_id(*study.design.benchmark_ref)) {
    throw ValidationError({"benchmark reference must be a plain file name"});
  }
  for (const auto& s : study.sessions) {
    for (const auto* doc : {&s.pre_summary, &s.post_summary}) {
      if (*doc && !is_safe_id((*doc)->summary_id)) {
        throw ValidationError({"summary_id " + (*doc)->summary_id + " is not a safe file name"});
      }
    }
  }
  const auto files = bundle_files(study);

  static std::atomic<unsigned> counter{0};
  const fs::path parent = dir.has_parent_path() ? dir.parent_path() : fs::path(".");
  fs::create_directories(parent);
  const std::string tag = std::to_string(::getpid()) + "." + std::to_string(counter++) + "." +
                          std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  const fs::path staging = parent / ("." + dir.filename().string() + ".tmp." + tag);
  const fs::path previous = parent / ("." + dir.filename().string() + ".old." + tag);
  fs::remove_all(staging);
  try {
    for (const auto& [rel, content] : files) write_file(staging / rel, content);
  } catch (...) {
    fs::remove_all(staging);
    throw;
  }
  const bool had_previous = fs::exists(dir);
  if (had_previous) fs::rename(dir, previous);
  fs::rename(staging, dir);
  if (had_previous) fs::remove_all(previous);
  sync_path(parent);
}

StudyStore::StudyStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_);
  journal_.open(root_ / "journal.log", std::ios::app);
}

fs::path StudyStore::study_dir(std::string_view study_id) const {
  if (!is_safe_id(study_id)) {
    throw ContractError("study_id '" + std::string(study_id) + "' is not a safe directory name");
  }
  return root_ / std::string(study_id);
}

std::mutex& StudyStore::lock_for(const std::string& study_id) {
  std::lock_guard guard(locks_mutex_);
  auto& slot = locks_[study_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

void StudyStore::save(const Study& study) {
  const fs::path dir = study_dir(study.design.study_id);
  std::lock_guard guard(lock_for(study.design.study_id));
  write_study(study, dir);
  {
    std::lock_guard index_guard(index_mutex_);
    index_.insert_or_assign(study.design.study_id, study);
  }
  std::lock_guard journal_guard(journal_mutex_);
  journal_ << "save " << study.design.study_id << " sessions=" << study.sessions.size() << '\n';
  journal_.flush();
}

Study StudyStore::load(const std::string& study_id) {
  const fs::path dir = study_dir(study_id);
  std::lock_guard guard(lock_for(study_id));
  Study study = load_study(dir);
  std::lock_guard index_guard(index_mutex_);
  index_.insert_or_assign(study_id, study);
  return study;
}

bool StudyStore::exists(const std::string& study_id) const {
  return is_safe_id(study_id) && fs::exists(root_ / study_id / "study.json");
}

std::vector<std::string> StudyStore::list() const {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(root_)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_directory() && is_safe_id(name) && fs::exists(entry.path() / "study.json")) {
      out.push_back(name);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void StudyStore::flush_journal() {
  std::lock_guard guard(journal_mutex_);
  journal_.flush();
}

void save_study(StudyStore& store, const Study& study) { store.save(study); }

}  // namespace iecsi
