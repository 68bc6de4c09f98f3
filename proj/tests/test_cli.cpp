#include <sys/wait.h>

#include <chrono>
#include <csignal>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "doctest.h"
#include "iecsi/storage.hpp"
#include "test_util.hpp"

using namespace iecsi;
namespace fs = std::filesystem;

namespace {

const std::string kCli = IECSI_CLI_PATH;

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const fs::path& scratch) {
  const fs::path out = scratch / "stdout.txt";
  const std::string cmd = kCli + " " + args + " > " + out.string() + " 2> " +
                          (scratch / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, test::read_file(out)};
}

std::string golden() { return (test::fixtures() / "golden").string(); }

}  // namespace

TEST_CASE("validate") {
  test::TempDir tmp;
  const Run ok = run("validate " + golden(), tmp.path());
  CHECK(ok.code == 0);
  CHECK(ok.out.find("ok") != std::string::npos);

  fs::copy(test::fixtures() / "golden", tmp / "bad", fs::copy_options::recursive);
  test::write_file(tmp / "bad" / "ratings.csv", "nonsense\n");
  CHECK(run("validate " + (tmp / "bad").string(), tmp.path()).code == 1);
  CHECK(test::read_file(tmp / "stderr.txt").find("ratings.csv") != std::string::npos);

  CHECK(run("validate " + (tmp / "missing").string(), tmp.path()).code == 2);
  CHECK(run("frobnicate", tmp.path()).code == 2);
  CHECK(run("", tmp.path()).code == 2);
}

TEST_CASE("analyze") {
  test::TempDir tmp;
  const Run r = run("analyze " + golden(), tmp.path());
  CHECK(r.code == 0);
  CHECK(r.out == test::read_file(test::fixtures() / "golden_report.json"));

  CHECK(run("analyze " + golden() + " --format markdown --out " + (tmp / "r.md").string(),
            tmp.path())
            .code == 0);
  CHECK(test::read_file(tmp / "r.md") == test::read_file(test::fixtures() / "golden_report.md"));
  CHECK(run("analyze " + golden() + " --format yaml", tmp.path()).code == 2);

  SUBCASE("gate failure") {
    write_study(test::planted_disagreement_study(), tmp / "planted");
    CHECK(run("analyze " + (tmp / "planted").string(), tmp.path()).code == 3);
    CHECK(test::read_file(tmp / "stderr.txt").find("kappa") != std::string::npos);
  }
  SUBCASE("missing benchmark") {
    write_study(test::small_study(4, StudyMode::BenchmarkOnly), tmp / "bench");
    fs::remove(tmp / "bench" / "benchmark.json");
    CHECK(run("analyze " + (tmp / "bench").string(), tmp.path()).code == 1);
    CHECK(test::read_file(tmp / "stderr.txt").find("benchmark") != std::string::npos);
  }
}

TEST_CASE("kappa") {
  test::TempDir tmp;
  const Run ident = run("kappa " + golden(), tmp.path());
  CHECK(ident.code == 0);
  CHECK(ident.out.find("dqual kappa=1.000000 accept") != std::string::npos);

  write_study(test::planted_disagreement_study(), tmp / "planted");
  const Run planted = run("kappa " + (tmp / "planted").string(), tmp.path());
  CHECK(planted.code == 0);
  CHECK(planted.out.find("dcrit kappa=0.636364 re-annotate") != std::string::npos);
}

TEST_CASE("synth") {
  test::TempDir tmp;
  CHECK(run("synth --participants 12 --seed 1 --out " + (tmp / "s").string(), tmp.path()).code ==
        0);
  for (const auto& [rel, content] : bundle_files(load_study(test::fixtures() / "golden"))) {
    CAPTURE(rel);
    CHECK(test::read_file(tmp / "s" / rel) == content);
  }
  CHECK(run("synth --participants 1 --out " + (tmp / "one").string(), tmp.path()).code == 2);
  CHECK_FALSE(fs::exists(tmp / "one"));
}

TEST_CASE("serve") {
  test::TempDir tmp;
  CHECK(run("serve --addr nonsense --data " + (tmp / "data").string(), tmp.path()).code == 1);

  const int port = 20000 + static_cast<int>(::getpid() % 20000);
  const fs::path log = tmp / "serve.log";
  const std::string cmd = kCli + " serve --addr 127.0.0.1:" + std::to_string(port) + " --data " +
                          (tmp / "data").string() + " > " + log.string() + " 2>&1 & echo $! > " +
                          (tmp / "pid").string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  const pid_t pid = std::stoi(test::read_file(tmp / "pid"));

  for (int i = 0; i < 500 && test::read_file(log).find("listening") == std::string::npos; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  REQUIRE(test::read_file(log).find("listening on 127.0.0.1:" + std::to_string(port)) !=
          std::string::npos);

  nlohmann::json design =
      nlohmann::json::parse(test::read_file(test::fixtures() / "golden" / "study.json"));
  design["study_id"] = "served";
  httplib::Client client("127.0.0.1", port);
  auto res = client.Post("/v1/studies", design.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);

  ::kill(pid, SIGINT);
  bool done = false;
  for (int i = 0; i < 500 && !done; ++i) {
    done = test::read_file(log).find("shutdown") != std::string::npos;
    if (!done) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  CHECK(done);
  CHECK(test::read_file(tmp / "data" / "journal.log").find("save served") != std::string::npos);
  CHECK(fs::exists(tmp / "data" / "served" / "study.json"));
}
