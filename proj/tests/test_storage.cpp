#include <thread>

#include "doctest.h"
#include "csv.hpp"
#include "iecsi/errors.hpp"
#include "iecsi/storage.hpp"
#include "test_util.hpp"

using namespace iecsi;
namespace fs = std::filesystem;

namespace {

std::string error_of(const fs::path& dir) {
  try {
    load_study(dir);
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

void copy_golden(const fs::path& to) {
  fs::copy(test::fixtures() / "golden", to, fs::copy_options::recursive);
}

std::size_t total_responses(const Study& s) {
  std::size_t n = 0;
  for (const auto& x : s.sessions) n += x.pre_responses.size() + x.post_responses.size();
  return n;
}

}  // namespace

TEST_CASE("csv parsing") {
  const auto rows = csv::parse("a,b\r\n\"x,1\",\"say \"\"hi\"\"\"\n\n3,4\n", "t.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].fields == std::vector<std::string>{"x,1", "say \"hi\""});
  CHECK(rows[2].line == 4);
  CHECK(csv::format_row({"a,b", "c"}) == "\"a,b\",c\n");
  CHECK_THROWS_AS(csv::parse("a,\"b\n", "t.csv"), ParseError);
}

TEST_CASE("golden fixture loads and re-serializes byte for byte") {
  const Study study = load_study(test::fixtures() / "golden");
  CHECK(study.sessions.size() == 24);
  CHECK(study.participants.size() == 12);
  for (const auto& [rel, content] : bundle_files(study)) {
    CAPTURE(rel);
    CHECK(test::read_file(test::fixtures() / "golden" / rel) == content);
  }
}

TEST_CASE("save/load round trip is the identity") {
  test::TempDir tmp;
  const Study study = load_study(test::fixtures() / "golden");
  write_study(study, tmp / "copy");
  const Study back = load_study(tmp / "copy");
  CHECK(back == study);

  SUBCASE("benchmark and annotations survive") {
    Study b = test::small_study(5, StudyMode::BenchmarkOnly);
    b.annotations.push_back({"conversational", "subscale:PSSUQ/OVERALL", "r1", "positive"});
    b.annotations.push_back({"conversational", "subscale:PSSUQ/OVERALL", "r2", "neutral"});
    write_study(b, tmp / "bench");
    CHECK(fs::exists(tmp / "bench" / "benchmark.json"));
    CHECK(fs::exists(tmp / "bench" / "annotations.csv"));
    CHECK(load_study(tmp / "bench") == b);
  }
  SUBCASE("instrument overrides survive") {
    Study o = test::small_study(3);
    o.registry.at("PSSUQ").items[0].prompt = "Overall, the system was easy to use.";
    write_study(o, tmp / "over");
    CHECK(fs::exists(tmp / "over" / "instruments.json"));
    CHECK(load_study(tmp / "over") == o);
  }
  SUBCASE("rewriting replaces previous contents") {
    Study smaller = test::small_study(2);
    write_study(smaller, tmp / "copy");
    CHECK(load_study(tmp / "copy") == smaller);
  }
}

TEST_CASE("invalid studies are not written") {
  test::TempDir tmp;
  Study study = test::small_study(3);
  study.sessions[0].post_responses[0].value = 9;
  CHECK_THROWS_AS(write_study(study, tmp / "bad"), ValidationError);
  CHECK_FALSE(fs::exists(tmp / "bad"));
}

TEST_CASE("load errors carry file and line") {
  test::TempDir tmp;
  SUBCASE("missing directory") {
    CHECK(error_of(tmp / "nope").find("study directory not found") != std::string::npos);
  }
  SUBCASE("value out of scale") {
    copy_golden(tmp / "g");
    std::string text = test::read_file(tmp / "g" / "responses.csv");
    const auto line3 = text.find('\n', text.find('\n') + 1) + 1;
    const auto value_end = text.rfind(',', text.find('\n', line3));
    const auto value_start = text.rfind(',', value_end - 1) + 1;
    text.replace(value_start, value_end - value_start, "8");
    test::write_file(tmp / "g" / "responses.csv", text);
    const std::string e = error_of(tmp / "g");
    CHECK(e.find("responses.csv:3") != std::string::npos);
    CHECK(e.find("out of scale") != std::string::npos);
  }
  SUBCASE("bad integer") {
    copy_golden(tmp / "g");
    std::string text = test::read_file(tmp / "g" / "responses.csv");
    text += "synth-1,p01-conversational,p01,conversational,post,PSSUQ,pssuq_01,four,x\n";
    test::write_file(tmp / "g" / "responses.csv", text);
    CHECK(error_of(tmp / "g").find("bad integer") != std::string::npos);
  }
  SUBCASE("wrong header") {
    copy_golden(tmp / "g");
    test::write_file(tmp / "g" / "ratings.csv", "session,annotator\n");
    CHECK(error_of(tmp / "g").find("ratings.csv") != std::string::npos);
  }
  SUBCASE("duplicate rating") {
    copy_golden(tmp / "g");
    std::string text = test::read_file(tmp / "g" / "ratings.csv");
    const auto first_row = text.find('\n') + 1;
    text += text.substr(first_row, text.find('\n', first_row) + 1 - first_row);
    test::write_file(tmp / "g" / "ratings.csv", text);
    CHECK_FALSE(error_of(tmp / "g").empty());
  }
  SUBCASE("broken json") {
    copy_golden(tmp / "g");
    test::write_file(tmp / "g" / "sessions.json", "[{");
    CHECK(error_of(tmp / "g").find("sessions.json") != std::string::npos);
  }
}

TEST_CASE("response import is atomic") {
  Study study = load_study(test::fixtures() / "golden");
  const std::size_t before = total_responses(study);
  for (auto& s : study.sessions) s.post_responses.clear();
  const Study cleared = study;

  std::string good(kResponsesHeader);
  good += "\nsynth-1,p01-conversational,p01,conversational,post,PSSUQ,pssuq_01,5,t1\n";
  good += "synth-1,p01-conversational,p01,conversational,post,PSSUQ,pssuq_02,6,t2\n";
  std::string bad = good + "synth-1,p01-conversational,p01,conversational,post,PSSUQ,pssuq_03,0,t3\n";

  CHECK_THROWS_AS(import_responses_csv_text(bad, study, "bad.csv"), ParseError);
  CHECK(study == cleared);

  std::string unknown = good + "synth-1,nobody,p01,conversational,post,PSSUQ,pssuq_03,4,t3\n";
  CHECK_THROWS_AS(import_responses_csv_text(unknown, study, "bad.csv"), ParseError);
  CHECK(study == cleared);

  CHECK(import_responses_csv_text(good, study, "good.csv") == 2);
  CHECK(total_responses(study) == total_responses(cleared) + 2);
  CHECK(before > total_responses(study));
  // a second import of the same rows is a duplicate
  CHECK_THROWS_AS(import_responses_csv_text(good, study, "good.csv"), ParseError);
}

TEST_CASE("study store") {
  test::TempDir tmp;
  StudyStore store(tmp.path());
  Study a = test::small_study(3, StudyMode::Comparative, 1);
  Study b = test::small_study(3, StudyMode::Comparative, 2);
  CHECK(a.design.study_id != b.design.study_id);
  store.save(a);
  save_study(store, b);
  CHECK(store.exists(a.design.study_id));
  CHECK_FALSE(store.exists("missing"));
  CHECK_FALSE(store.exists("../etc"));
  CHECK(store.list() == std::vector<std::string>{"synth-1", "synth-2"});
  CHECK(store.load("synth-2") == b);
  CHECK_THROWS_AS(store.study_dir("../x"), ContractError);
  CHECK_THROWS_AS(store.study_dir(".hidden"), ContractError);
  store.flush_journal();
  const std::string journal = test::read_file(tmp / "journal.log");
  CHECK(journal.find("save synth-1") != std::string::npos);
  CHECK(journal.find("save synth-2") != std::string::npos);
}

TEST_CASE("concurrent writers on different studies") {
  test::TempDir tmp;
  StudyStore store(tmp.path());
  std::vector<std::thread> threads;
  for (int t = 0; t < 6; ++t) {
    threads.emplace_back([&store, t] {
      for (int round = 0; round < 3; ++round) {
        store.save(test::small_study(2 + round, StudyMode::Comparative,
                                     static_cast<std::uint64_t>(100 + t)));
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(store.list().size() == 6);
  for (int t = 0; t < 6; ++t) {
    const Study s = store.load("synth-" + std::to_string(100 + t));
    CHECK(s.participants.size() == 4);
  }
}

TEST_CASE("concurrent writers on one study serialize") {
  test::TempDir tmp;
  StudyStore store(tmp.path());
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&store, t] {
      for (int round = 0; round < 3; ++round) store.save(test::small_study(2 + t, StudyMode::Comparative, 5));
    });
  }
  for (auto& th : threads) th.join();
  const Study s = store.load("synth-5");
  CHECK(validate_study(s).ok());
  CHECK(s.participants.size() >= 2);
}
