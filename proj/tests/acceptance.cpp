// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any
// criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "httplib.h"

#include "iecsi/distributions.hpp"
#include "iecsi/errors.hpp"
#include "iecsi/knowledge_gain.hpp"
#include "iecsi/qualitative.hpp"
#include "iecsi/report.hpp"
#include "iecsi/service.hpp"
#include "iecsi/stats.hpp"
#include "iecsi/storage.hpp"
#include "iecsi/synth.hpp"
#include "oracle_values.hpp"
#include "test_util.hpp"

using namespace iecsi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void criterion(const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (budget_s > 0 && secs > budget_s) {
    o.pass = false;
    o.detail += "; over time budget";
  }
  std::ostringstream line;
  line.setf(std::ios::fixed);
  line.precision(3);
  line << (o.pass ? "PASS " : "FAIL ") << name << " (" << o.detail << ", " << secs << " s)";
  std::cout << line.str() << std::endl;
  if (!o.pass) ++failures;
}

Outcome annotation_table() {
  const std::vector<std::pair<double, Sentiment>> table{
      {1.0, Sentiment::Negative}, {1.99, Sentiment::Negative}, {2.0, Sentiment::Neutral},
      {3.0, Sentiment::Neutral},  {4.0, Sentiment::Neutral},   {4.01, Sentiment::Positive},
      {7.0, Sentiment::Positive}};
  const AnalysisConfig c;
  int ok = 0;
  for (const auto& [mean, expected] : table) ok += annotate_mean(mean, c) == expected;
  return {ok == 7, std::to_string(ok) + "/7 means"};
}

Outcome gain_grid() {
  // Only the point past every threshold is a gain.
  int ok = 0, k = 0;
  for (double q : {1.4, 1.5, 1.6}) {
    for (double i : {0.9, 1.0, 1.1}) {
      for (double c : {-0.1, 0.0, 0.1}) {
        ok += classify_gain(q, i, c) == (k == 26);
        ++k;
      }
    }
  }
  const bool boundary = !classify_gain(1.5, 1.0, 0.0);
  return {ok == 27 && boundary,
          std::to_string(ok) + "/27 grid points, boundary " + (boundary ? "strict" : "NOT strict")};
}

double kappa_oracle(const std::vector<int>& a, const std::vector<int>& b, int k) {
  std::vector<double> m(static_cast<std::size_t>(k * k), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) m[static_cast<std::size_t>(a[i] * k + b[i])] += 1.0;
  const double n = static_cast<double>(a.size());
  double po = 0.0, pe = 0.0;
  for (int i = 0; i < k; ++i) {
    po += m[static_cast<std::size_t>(i * k + i)] / n;
    double row = 0.0, col = 0.0;
    for (int j = 0; j < k; ++j) {
      row += m[static_cast<std::size_t>(i * k + j)];
      col += m[static_cast<std::size_t>(j * k + i)];
    }
    pe += (row / n) * (col / n);
  }
  return (po - pe) / (1.0 - pe);
}

Outcome kappa_against_oracle() {
  std::mt19937_64 rng(2718);
  int compared = 0, undefined = 0, bad = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 50);
    const int k = 2 + static_cast<int>(rng() % 3);
    std::vector<int> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      a[static_cast<std::size_t>(i)] = static_cast<int>(rng() % static_cast<unsigned>(k));
      b[static_cast<std::size_t>(i)] = rng() % 2 ? a[static_cast<std::size_t>(i)]
                                                 : static_cast<int>(rng() % static_cast<unsigned>(k));
    }
    const double expected = kappa_oracle(a, b, k);
    if (!std::isfinite(expected)) {
      ++undefined;
      try {
        cohen_kappa(a, b);
        ++bad;
      } catch (const DomainError&) {
      }
      continue;
    }
    const double d = std::abs(cohen_kappa(a, b) - expected);
    worst = std::max(worst, d);
    if (d > 1e-12) ++bad;
    ++compared;
  }
  const auto [pa, pb] = test::planted_pairs();
  const bool planted = cohen_kappa(pa, pb) == 7.0 / 11.0;
  std::ostringstream d;
  d << compared << " defined + " << undefined << " undefined cases, max |diff| " << worst
    << ", planted " << (planted ? "= 7/11" : "!= 7/11");
  return {bad == 0 && planted, d.str()};
}

Outcome exact_tests() {
  std::mt19937_64 rng(31415);
  const AnalysisConfig cfg;
  int cases = 0, bad = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    std::vector<double> mags(n);
    std::iota(mags.begin(), mags.end(), 1.0);
    std::shuffle(mags.begin(), mags.end(), rng);
    std::vector<double> x(n), y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = ((rng() & 1) ? 1.0 : -1.0) * (mags[i] * 0.5 + static_cast<double>(rng() % 97) * 1e-3);
    }
    const auto r = wilcoxon_signed_rank(x, y, cfg);
    const double d = std::abs(r.p_value - oracle::brute_wilcoxon_p(x));
    worst = std::max(worst, d);
    bad += d > 1e-12 || r.method_note.find("exact") == std::string::npos;
    ++cases;
  }
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t nx = 1 + rng() % 9;
    const std::size_t ny = 1 + rng() % (10 - nx);
    std::vector<double> pool(nx + ny);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      pool[i] = static_cast<double>(i) + static_cast<double>(rng() % 1000) * 1e-4;
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::vector<double> x(pool.begin(), pool.begin() + static_cast<long>(nx));
    const std::vector<double> y(pool.begin() + static_cast<long>(nx), pool.end());
    const auto r = mann_whitney_u(x, y, cfg);
    const double d = std::abs(r.p_value - oracle::brute_mann_whitney_p(x, y));
    worst = std::max(worst, d);
    bad += d > 1e-12 || r.method_note.find("exact") == std::string::npos;
    ++cases;
  }
  std::ostringstream d;
  d << cases << " cases, " << bad << " mismatches, max |diff| " << worst;
  return {bad == 0, d.str()};
}

Outcome t_grid() {
  double worst = 0.0;
  for (const auto& row : oracle::kTGrid) {
    worst = std::max(worst, std::abs(student_t_two_sided_p(row.t, row.df) - row.p));
  }
  std::ostringstream d;
  d << oracle::kTGrid.size() << " grid points, max |diff| " << worst;
  return {worst <= 1e-8, d.str()};
}

Outcome calibration() {
  int rejected = 0, runs = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const AnalysisReport report = analyze(synthesize({12, StudyMode::Comparative, 0.0, seed}));
    for (const auto& t : report.tests) {
      if (t.instrument_id != "PSSUQ" || t.subscale_id != "OVERALL") continue;
      for (const auto& r : t.results) {
        if (r.test != "paired_t_test") continue;
        ++runs;
        rejected += r.significant;
      }
    }
  }
  const double rate = runs ? static_cast<double>(rejected) / runs : 0.0;
  std::ostringstream d;
  d << rejected << "/" << runs << " rejections at alpha 0.05, rate " << rate << " (allowed 0.01..0.09)";
  return {runs == 200 && rate >= 0.01 && rate <= 0.09, d.str()};
}

std::string run_cli(const std::string& args, const fs::path& out) {
  const char* cli = std::getenv("IECSI_CLI_PATH");
  if (!cli) throw std::runtime_error("IECSI_CLI_PATH not set");
  const std::string cmd = std::string(cli) + " " + args + " > " + out.string();
  const int status = std::system(cmd.c_str());
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw std::runtime_error("cli failed: " + cmd);
  }
  return test::read_file(out);
}

Outcome determinism() {
  test::TempDir tmp;
  const fs::path golden = test::fixtures() / "golden";
  const std::string first = render(analyze(load_study(golden)), ReportFormat::Structured);
  const std::string second = render(analyze(load_study(golden)), ReportFormat::Structured);
  const std::string cli = run_cli("analyze " + golden.string(), tmp / "cli.json");

  fs::create_directories(tmp / "store");
  fs::copy(golden, tmp / "store" / "synth-1", fs::copy_options::recursive);
  std::string served;
  {
    Service service(tmp / "store");
    if (!service.bind("127.0.0.1", 0)) throw std::runtime_error("cannot bind");
    std::thread th([&] { service.run(); });
    const std::string token = service.issue_researcher_token("synth-1");
    httplib::Client client("127.0.0.1", service.port());
    client.set_read_timeout(60, 0);
    httplib::Result res;
    for (int i = 0; i < 200; ++i) {
      res = client.Get("/v1/studies/synth-1/analysis", {{"Authorization", "Bearer " + token}});
      if (res) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (res && res->status == 200) served = res->body;
    service.stop();
    th.join();
  }
  const std::string expected = test::read_file(fs::path(IECSI_FIXTURES) / "golden_report.json");
  const bool runs = first == second;
  const bool via_cli = cli == first;
  const bool via_service = served == first;
  const bool frozen = first == expected;
  std::ostringstream d;
  d << first.size() << " bytes; two runs " << (runs ? "equal" : "DIFFER") << ", cli "
    << (via_cli ? "equal" : "DIFFERS") << ", service " << (via_service ? "equal" : "DIFFERS")
    << ", frozen golden " << (frozen ? "equal" : "DIFFERS");
  return {runs && via_cli && via_service && frozen, d.str()};
}

Outcome round_trip() {
  test::TempDir tmp;
  const fs::path golden = test::fixtures() / "golden";
  const Study study = load_study(golden);
  write_study(study, tmp / "copy");
  const Study back = load_study(tmp / "copy");
  bool bytes = true;
  for (const auto& [rel, content] : bundle_files(study)) {
    bytes &= test::read_file(golden / rel) == content &&
             test::read_file(tmp / "copy" / rel) == content;
  }

  Study target = study;
  for (auto& s : target.sessions) s.post_responses.clear();
  const Study before = target;
  std::string csv(kResponsesHeader);
  csv += "\n";
  csv += "synth-1,p01-conversational,p01,conversational,post,PSSUQ,pssuq_01,5,t\n";
  csv += "synth-1,p01-conversational,p01,conversational,post,PSSUQ,pssuq_02,6,t\n";
  csv += "synth-1,p01-conversational,p01,conversational,post,PSSUQ,pssuq_03,\"7\n";
  test::write_file(tmp / "corrupt.csv", csv);
  bool rejected = false;
  try {
    import_responses_csv(tmp / "corrupt.csv", target);
  } catch (const ParseError&) {
    rejected = true;
  }
  const bool untouched = target == before;
  std::ostringstream d;
  d << "load/save " << (back == study ? "identity" : "NOT identity") << ", bundle bytes "
    << (bytes ? "equal" : "DIFFER") << ", corrupt import " << (rejected ? "rejected" : "ACCEPTED")
    << " with " << (untouched ? "zero" : "SOME") << " rows committed";
  return {back == study && bytes && rejected && untouched, d.str()};
}

}  // namespace

int main() {
  criterion("annotation-rule-table", 1.0, annotation_table);
  criterion("knowledge-gain-rule", 0, gain_grid);
  criterion("kappa-oracle", 0, kappa_against_oracle);
  criterion("exact-test-oracle", 60.0, exact_tests);
  criterion("t-distribution-accuracy", 0, t_grid);
  criterion("calibration", 120.0, calibration);
  criterion("pipeline-determinism", 0, determinism);
  criterion("round-trip", 0, round_trip);
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " failing" << std::endl;
  return failures ? 1 : 0;
}
