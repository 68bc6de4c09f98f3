#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "iecsi/study.hpp"
#include "iecsi/synth.hpp"

namespace iecsi::test {

namespace fs = std::filesystem;

inline fs::path fixtures() { return IECSI_FIXTURES; }

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("iecsi-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

inline Study small_study(int participants = 4, StudyMode mode = StudyMode::Comparative,
                         std::uint64_t seed = 7) {
  return synthesize({participants, mode, 0.0, seed});
}

// Replaces both annotators' ratings on every summary.
template <typename F>
void set_ratings(Study& study, F&& rate) {
  int k = 0;
  for (auto& s : study.sessions) {
    for (auto* doc : {&s.pre_summary, &s.post_summary}) {
      if (!*doc) continue;
      (*doc)->ratings = rate(k++, **doc);
    }
  }
}

// The engineered dcrit disagreement: 3 (0,0), 2 (1,0), 7 (1,1) over 12
// summaries; kappa = 7/11.
inline std::pair<std::vector<int>, std::vector<int>> planted_pairs() {
  return {{0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1}, {0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1}};
}

// 6 participants x 2 conditions -> 24 summaries carrying the planted dcrit
// table twice (same kappa); dqual and dintrp agree.
inline Study planted_disagreement_study() {
  Study study = small_study(6);
  const auto [a, b] = planted_pairs();
  set_ratings(study, [&](int k, const SummaryDocument& doc) {
    const int q = doc.phase == Phase::Pre ? k % 2 : 2 + k % 2;
    const int i = doc.phase == Phase::Pre ? 0 : 1 + k % 2;
    const int ca = a[static_cast<std::size_t>(k % 12)];
    const int cb = b[static_cast<std::size_t>(k % 12)];
    return std::vector<SummaryRating>{{"annotator_a", q, i, ca}, {"annotator_b", q, i, cb}};
  });
  return study;
}

}  // namespace iecsi::test
