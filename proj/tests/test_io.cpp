#include <doctest.h>

#include <cmath>

#include "qfluct/circle.hpp"
#include "qfluct/errors.hpp"
#include "qfluct/io.hpp"
#include "qfluct/junction.hpp"

using namespace qfluct;

TEST_SUITE("io") {

TEST_CASE("sector table") {
  const SectorTable t = boltzmann_table({0.2, 1.0, 1.5, 0.0}, 4);
  const json j = to_json(t);
  CHECK(j["n_spins"] == 4);
  CHECK(j["log_partition"].get<double>() == t.log_partition());
  REQUIRE(j["sectors"].size() == 3);
  CHECK(j["sectors"][0]["s"] == 2);
  CHECK(j["sectors"][1]["d"] == 3);
  CHECK(j["sectors"][1]["rows"].size() == 3);
  CHECK(j["sectors"][1]["rows"][0]["sz"] == -1);
  CHECK(j["sectors"][1]["rows"][2]["eta"].get<double>() == t.sector(1).eta[2]);
  // above the exact range only log_d is written
  CHECK(to_json(boltzmann_table({0.2, 1.0, 1.5, 0.0}, 80))["sectors"][0].contains("log_d"));
}

TEST_CASE("gap solution and parameters") {
  const GapSolution sol = solve_gap(0.1, 1.0, 3.0);
  const json j = to_json(sol);
  CHECK(j["delta"].get<double>() == sol.delta);
  CHECK(j["converged"] == true);
  CHECK(j.contains("normal_branch_residual"));
  const json m = to_json(ModelParams{0.1, 2.0, 3.0, 0.4});
  CHECK(m == json{{"epsilon", 0.1}, {"t_c", 2.0}, {"beta", 3.0}, {"mu", 0.4}});
  JunctionParams jp;
  jp.beta = 4.0;
  jp.delta_right = 0.2;
  const json jj = to_json(jp);
  CHECK(jj["left"]["beta"] == 4.0);
  CHECK(jj["delta_right_override"] == 0.2);
  CHECK_FALSE(jj.contains("delta_left_override"));
}

TEST_CASE("word round trip") {
  const FluctuationWord w{{{0.25, 1, 0}, {-1.5, 0, 3}}};
  const FluctuationWord back = word_from_json(to_json(w));
  REQUIRE(back.factors.size() == 2);
  CHECK(back.factors[1].alpha == -1.5);
  CHECK(back.factors[1].m == 3);
  const FluctuationWord arr = word_from_json(json::parse("[[0.5, 2, 1], [0, 0, 1]]"));
  CHECK(arr.total_n() == 2);
  CHECK(arr.total_m() == 2);
  CHECK(word_from_json(json::parse(R"([{"m": 2}])")).factors[0].alpha == 0.0);
  CHECK(word_from_json(json::array()).factors.empty());
}

TEST_CASE("malformed words") {
  for (const char* text : {R"({"alpha": 1})", "[[0, 1]]", "[[0, -1, 0]]", "[[0, 1.5, 0]]", R"([["x", 1, 0]])",
                           R"([{"alpha": 0, "k": 1}])", "[3]", R"([{"n": "2"}])"}) {
    CHECK_THROWS_AS(word_from_json(json::parse(text)), ParameterError);
  }
}

TEST_CASE("circle state round trip") {
  const CircleState s = phase_peaked_state({12, 0.5}, 0.7, 0.6);
  const CircleState back = circle_state_from_json(to_json(s));
  CHECK(back.trunc.n_max == 12);
  CHECK(back.trunc.charge_offset == 0.5);
  CHECK((back.amplitudes - s.amplitudes).norm() == 0.0);
  CHECK_THROWS_AS(circle_state_from_json(json{{"n_max", 2}, {"amplitudes", json::array()}}), ParameterError);
  CHECK_THROWS_AS(circle_state_from_json(json{{"amplitudes", json::array()}}), ParameterError);
}

}  // TEST_SUITE
