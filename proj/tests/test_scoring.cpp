#include <algorithm>
#include <random>

#include "doctest.h"
#include "iecsi/errors.hpp"
#include "iecsi/scoring.hpp"
#include "test_util.hpp"

using namespace iecsi;

namespace {

std::string pssuq_id(int i) { return (i < 10 ? "pssuq_0" : "pssuq_") + std::to_string(i); }

ParticipantResponses pssuq_participant(const std::string& pid, const std::vector<int>& values) {
  ParticipantResponses p{pid, {}};
  for (std::size_t i = 0; i < values.size(); ++i) {
    p.responses.push_back({"PSSUQ", pssuq_id(static_cast<int>(i) + 1), values[i], "t"});
  }
  return p;
}

const DimensionScore& find(const std::vector<DimensionScore>& v, const std::string& id) {
  auto it = std::find_if(v.begin(), v.end(),
                         [&](const DimensionScore& d) { return d.subscale_id == id; });
  REQUIRE(it != v.end());
  return *it;
}

// Two participants, values worked out by hand:
//   p1: SYSUSE 5, INFOQUAL 4, INTERQUAL 6, item 16 = 3 -> OVERALL 75/16
//   p2: SYSUSE 1..6 (3.5), INFOQUAL 7, INTERQUAL 2,3,4 (3), item 16 = 5 -> OVERALL 77/16
std::vector<ParticipantResponses> pssuq_fixture() {
  return {pssuq_participant("p1", {5, 5, 5, 5, 5, 5, 4, 4, 4, 4, 4, 4, 6, 6, 6, 3}),
          pssuq_participant("p2", {1, 2, 3, 4, 5, 6, 7, 7, 7, 7, 7, 7, 2, 3, 4, 5})};
}

}  // namespace

TEST_CASE("PSSUQ subscales on a hand-computed fixture") {
  const Instrument pssuq = builtin_registry().at("PSSUQ");
  const auto scores = subscale_scores(pssuq_fixture(), pssuq, AnalysisConfig{});
  REQUIRE(scores.size() == 4);
  CHECK(scores[0].subscale_id == "SYSUSE");
  CHECK(scores[3].subscale_id == "OVERALL");

  const auto& sys = find(scores, "SYSUSE");
  CHECK(sys.mean == doctest::Approx(4.25).epsilon(1e-15));
  CHECK(sys.sd == doctest::Approx(1.0606601717798212).epsilon(1e-12));
  CHECK(sys.n == 2);
  CHECK(sys.per_participant.at("p1") == 5.0);
  CHECK(sys.per_participant.at("p2") == 3.5);
  CHECK(sys.per_item_means.at("pssuq_01") == 3.0);

  CHECK(find(scores, "INFOQUAL").mean == 5.5);
  CHECK(find(scores, "INTERQUAL").mean == 4.5);
  const auto& overall = find(scores, "OVERALL");
  CHECK(overall.mean == doctest::Approx(4.75).epsilon(1e-15));
  CHECK(overall.per_participant.at("p1") == doctest::Approx(75.0 / 16.0));
  CHECK(overall.per_participant.at("p2") == doctest::Approx(77.0 / 16.0));
}

TEST_CASE("UEQ-S centering") {
  CHECK(center_ueq(1) == -3.0);
  CHECK(center_ueq(4) == 0.0);
  CHECK(center_ueq(7) == 3.0);
  CHECK_THROWS_AS(center_ueq(0), ContractError);
  CHECK_THROWS_AS(center_ueq(8), ContractError);

  const Instrument ueq = builtin_registry().at("UEQ-S");
  ParticipantResponses p{"p1", {}};
  const std::vector<int> values{7, 6, 5, 4, 1, 1, 1, 1};
  for (int i = 0; i < 8; ++i) {
    p.responses.push_back({"UEQ-S", "ueqs_" + std::to_string(i + 1),
                           values[static_cast<std::size_t>(i)], "t"});
  }
  const auto scores = subscale_scores(std::vector{p}, ueq, AnalysisConfig{});
  CHECK(find(scores, "pragmatic").mean == 1.5);
  CHECK(find(scores, "hedonic").mean == -3.0);
  CHECK(find(scores, "overall").mean == -0.75);
  CHECK(find(scores, "overall").sd == 0.0);
}

TEST_CASE("reverse-coded items are flipped about the midpoint") {
  Instrument in;
  in.instrument_id = "SUS";
  in.items = {{"sus_1", "p", "n", "p", Phase::Post, false, ResponseKind::Likert},
              {"sus_2", "p", "n", "p", Phase::Post, true, ResponseKind::Likert}};
  in.subscales = {{"usability", {"sus_1", "sus_2"}}};
  ParticipantResponses p{"p1", {{"SUS", "sus_1", 6, "t"}, {"SUS", "sus_2", 2, "t"}}};
  const auto scores = subscale_scores(std::vector{p}, in, AnalysisConfig{});
  CHECK(scores.at(0).mean == 6.0);
  CHECK(transformed_value(2, in.items[1], in, AnalysisConfig{}) == 6.0);
  CHECK(transformed_value(2, in.items[0], in, AnalysisConfig{}) == 2.0);
}

TEST_CASE("NASA-TLX is the raw unweighted mean") {
  const Instrument tlx = builtin_registry().at("NASA-TLX");
  ParticipantResponses p{"p1", {}};
  const std::vector<std::pair<std::string, int>> values{
      {"mental", 6}, {"physical", 1}, {"temporal", 5},
      {"performance", 3}, {"effort", 4}, {"frustration", 2}};
  for (const auto& [id, v] : values) p.responses.push_back({"NASA-TLX", id, v, "t"});
  const auto scores = subscale_scores(std::vector{p}, tlx, AnalysisConfig{});
  CHECK(find(scores, "demand").mean == 4.0);
  CHECK(find(scores, "interaction").mean == 3.0);
  CHECK(find(scores, "workload").mean == 3.5);
}

TEST_CASE("subscale completeness") {
  const Instrument pssuq = builtin_registry().at("PSSUQ");
  SUBCASE("missing member drops the subscale") {
    auto data = pssuq_fixture();
    for (auto& p : data) p.responses.pop_back();  // nobody answered item 16
    const auto scores = subscale_scores(data, pssuq, AnalysisConfig{});
    CHECK(scores.size() == 3);
    CHECK(std::none_of(scores.begin(), scores.end(),
                       [](const DimensionScore& d) { return d.subscale_id == "OVERALL"; }));
  }
  SUBCASE("subscale without any response is an error") {
    std::vector<ParticipantResponses> data{{"p1", {{"PSSUQ", "pssuq_07", 4, "t"}}}};
    CHECK_THROWS_AS(subscale_scores(data, pssuq, AnalysisConfig{}), DomainError);
  }
  SUBCASE("response for another instrument") {
    std::vector<ParticipantResponses> data{{"p1", {{"UEQ-S", "ueqs_1", 4, "t"}}}};
    CHECK_THROWS_AS(subscale_scores(data, pssuq, AnalysisConfig{}), ContractError);
    CHECK_THROWS_AS(item_means(data[0].responses, pssuq), ContractError);
  }
}

TEST_CASE("item means are raw") {
  const Instrument ueq = builtin_registry().at("UEQ-S");
  std::vector<ItemResponse> r{{"UEQ-S", "ueqs_1", 7, "t"}, {"UEQ-S", "ueqs_1", 4, "t"},
                              {"UEQ-S", "ueqs_2", 1, "t"}};
  const auto m = item_means(r, ueq);
  CHECK(m.size() == 2);
  CHECK(m.at("ueqs_1") == 5.5);
  CHECK(m.at("ueqs_2") == 1.0);
}

TEST_CASE("scores are invariant under participant and response order") {
  const Study study = test::small_study(10);
  const Instrument& pssuq = study.registry.at("PSSUQ");
  std::vector<ParticipantResponses> data;
  for (const auto& s : study.sessions) {
    if (s.condition_id != "conversational") continue;
    ParticipantResponses p{s.participant_id, {}};
    for (const auto& r : s.post_responses) {
      if (r.instrument_id == "PSSUQ") p.responses.push_back(r);
    }
    data.push_back(std::move(p));
  }
  const auto expected = subscale_scores(data, pssuq, AnalysisConfig{});
  std::mt19937 rng(11);
  for (int i = 0; i < 25; ++i) {
    std::shuffle(data.begin(), data.end(), rng);
    for (auto& p : data) std::shuffle(p.responses.begin(), p.responses.end(), rng);
    const auto got = subscale_scores(data, pssuq, AnalysisConfig{});
    REQUIRE(got.size() == expected.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(got[k].mean == doctest::Approx(expected[k].mean).epsilon(1e-12));
      CHECK(got[k].sd == doctest::Approx(expected[k].sd).epsilon(1e-12));
      CHECK(got[k].per_participant == expected[k].per_participant);
    }
  }
}

TEST_CASE("docs viewed average") {
  std::vector<Session> s(3);
  for (int i = 0; i < 3; ++i) {
    s[static_cast<std::size_t>(i)].condition_id = "c";
    s[static_cast<std::size_t>(i)].docs_viewed = 2 + 2 * i;
  }
  CHECK(docs_viewed_average(s) == 4.0);
  s[1].condition_id = "d";
  CHECK_THROWS_AS(docs_viewed_average(s), ContractError);
  CHECK_THROWS_AS(docs_viewed_average(std::vector<Session>{}), DomainError);
}

TEST_CASE("is_scored") {
  const auto reg = builtin_registry();
  CHECK(is_scored(reg.at("SAL")));
  CHECK_FALSE(is_scored(reg.at("KG")));
}
