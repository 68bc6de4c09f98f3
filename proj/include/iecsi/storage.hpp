#pragma once

// Study bundles on disk. One directory per study:
//
//   study.json        design (mode, conditions, instruments, analysis config)
//   participants.json participant ids and demographics
//   sessions.json     session metadata and summary references
//   responses.csv     one row per Likert response
//   ratings.csv       one row per annotator rating of a summary
//   summaries/        <summary_id>.txt, verbatim summary text
//   benchmark.json    optional, referenced from study.json
//   instruments.json  optional instrument overrides
//   annotations.csv   optional analyst sentiment annotations

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "iecsi/study.hpp"

namespace iecsi {

inline constexpr std::string_view kResponsesHeader =
    "study_id,session_id,participant_id,condition_id,phase,instrument_id,item_id,value,"
    "timestamp_iso8601";
inline constexpr std::string_view kRatingsHeader =
    "study_id,session_id,phase,annotator_id,dqual,dintrp,dcrit";
inline constexpr std::string_view kAnnotationsHeader =
    "study_id,condition_id,target_id,annotator_id,sentiment";

// Letters, digits, '.', '_' and '-', not starting with a dot.
bool is_safe_id(std::string_view id);

// Reads and fully validates a bundle. Throws ParseError (with file:line or
// field) for malformed input and ValidationError for invariant violations.
Study load_study(const std::filesystem::path& dir);

// Canonical file contents of a bundle, keyed by relative path.
std::map<std::string, std::string> bundle_files(const Study& study);

// Validates, then writes the bundle to `dir`, replacing any previous
// contents. Nothing is written when validation fails.
void write_study(const Study& study, const std::filesystem::path& dir);

// Appends the rows of a responses CSV to the matching sessions. All rows
// are checked before any is committed. Returns the number ingested.
std::size_t import_responses_csv(const std::filesystem::path& path, Study& study);
std::size_t import_responses_csv_text(std::string_view text, Study& study,
                                      const std::string& source);

// Per-study single writer, multiple readers. Studies live in
// root/<study_id>/; every successful save is appended to root/journal.log.
class StudyStore {
 public:
  explicit StudyStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path study_dir(std::string_view study_id) const;

  void save(const Study& study);
  Study load(const std::string& study_id);
  bool exists(const std::string& study_id) const;
  std::vector<std::string> list() const;
  void flush_journal();

 private:
  std::mutex& lock_for(const std::string& study_id);

  std::filesystem::path root_;
  std::mutex locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
  std::mutex index_mutex_;
  std::map<std::string, Study> index_;
  std::mutex journal_mutex_;
  std::ofstream journal_;
};

void save_study(StudyStore& store, const Study& study);

}  // namespace iecsi
