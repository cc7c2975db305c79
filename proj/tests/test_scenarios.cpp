#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ghflow/scenarios.hpp"

using namespace ghflow;

namespace {

ScenarioConfig tiny_torus_config() {
  ScenarioConfig cfg;
  cfg.scenario = "collapsing_torus";
  cfg.i_list = {4, 16};
  cfg.nr = 64;
  cfg.ns = 32;
  cfg.gh_nr = 16;
  cfg.gh_ns = 16;
  cfg.t_end = 0.2;
  cfg.budget = 100;
  cfg.t_grid = {0.0, 0.1, 0.2};
  cfg.apply_defaults();
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("scenarios");

TEST_CASE("config defaults and validation") {
  SUBCASE("minimal config applies defaults") {
    const auto cfg = ScenarioConfig::from_json(
        nlohmann::json::parse(R"({"scenario": "collapsing_torus"})"));
    CHECK(cfg.i_list == std::vector<int>{1, 4, 16, 64});
    CHECK(cfg.nr == 256);
    CHECK(cfg.t_grid.size() == 5);
  }
  SUBCASE("explicit empty i_list is a schema error naming the field") {
    try {
      ScenarioConfig::from_json(
          nlohmann::json::parse(R"({"scenario": "collapsing_torus", "i_list": []})"));
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("i_list") != std::string::npos);
    }
  }
  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_AS(ScenarioConfig::from_json(nlohmann::json::parse(
                        R"({"scenario": "collapsing_torus", "mystery": 3})")),
                    ConfigError);
  }
  SUBCASE("round trip is exact") {
    const auto cfg = ScenarioConfig::from_json(nlohmann::json::parse(
        R"({"scenario": "nil_scaling", "i_list": [5, 50], "c2": 1.5, "seed": 9})"));
    const auto again = ScenarioConfig::from_json(cfg.to_json());
    CHECK(cfg.to_json().dump() == again.to_json().dump());
  }
  SUBCASE("scenario names are checked") {
    CHECK_THROWS_AS(
        ScenarioConfig::from_json(nlohmann::json::parse(R"({"scenario": "warp-core"})")),
        ConfigError);
  }
  SUBCASE("descending i_list rejected") {
    CHECK_THROWS_AS(ScenarioConfig::from_json(nlohmann::json::parse(
                        R"({"scenario": "collapsing_torus", "i_list": [4, 2]})")),
                    ConfigError);
  }
}

TEST_CASE("profile specs") {
  CHECK(parse_profile("2+cos", 16)[0] == doctest::Approx(3.0));
  CHECK(parse_profile("flat", 8) == std::vector<double>(8, 1.0));
  CHECK(parse_profile("const:2.5", 4) == std::vector<double>(4, 2.5));
  CHECK(parse_profile("cosine:2:1", 16)[0] == doctest::Approx(3.0));
  CHECK_THROWS_AS(parse_profile("cosine:1:2", 8), ConfigError);
  CHECK_THROWS_AS(parse_profile("sawtooth", 8), ConfigError);
}

TEST_CASE("collapsing torus scenario at desk scale") {
  const auto rep = run_collapsing_torus(tiny_torus_config());
  CHECK(rep.scenario == "collapsing_torus");
  CHECK(rep.all_pass());

  // the cell records carry the series fields
  int cells = 0;
  for (const auto& r : rep.records)
    if (r.kind == "cell") {
      ++cells;
      CHECK(r.values.count("gh_upper") == 1);
      CHECK(r.values.count("k_max") == 1);
    }
  CHECK(cells == 2);

  std::ostringstream csv;
  rep.write_csv(csv);
  CHECK(csv.str().find("scenario,i,t,gh_lower,gh_upper,K_max") == 0);
  CHECK(csv.str().find("collapsing_torus,4,0,") != std::string::npos);

  bool found_mono = false;
  for (const auto& r : rep.records)
    if (r.name == "gh_upper_monotone_in_i") {
      found_mono = true;
      CHECK(r.pass);
    }
  CHECK(found_mono);
}

TEST_CASE("flat profile torus is stationary and tight") {
  auto cfg = tiny_torus_config();
  cfg.f_profile = "flat";
  cfg.i_list = {1, 4};
  const auto rep = run_collapsing_torus(cfg);
  CHECK_FALSE(rep.all_pass());  // the nonstationarity witness must fail on flat data
  for (const auto& r : rep.records) {
    if (r.name == "chat_nonstationary_at_largest_i") CHECK_FALSE(r.pass);
    if (r.name == "gh_upper_vs_fiber_bound") CHECK(r.pass);
    if (r.name == "flow_monitors") CHECK(r.pass);
  }
}

TEST_CASE("nil scaling scenario") {
  ScenarioConfig cfg;
  cfg.scenario = "nil_scaling";
  cfg.i_list = {10, 100};
  cfg.box_n = 5;
  cfg.budget = 200;
  cfg.apply_defaults();
  const auto rep = run_nil_scaling(cfg);
  CHECK(rep.all_pass());
  bool saw_gate = false, saw_dev = false, saw_fiber = false, saw_plane = false,
       saw_ratio = false;
  for (const auto& r : rep.records) {
    saw_gate |= r.name == "closed_form_residual_gate";
    saw_dev |= r.name == "pullback_deviation";
    saw_fiber |= r.name == "quotient_fiber_diameter";
    saw_plane |= r.name == "plane_quotient_gh";
    saw_ratio |= r.name == "dy2_time_ratio";
  }
  CHECK(saw_gate);
  CHECK(saw_dev);
  CHECK(saw_fiber);
  CHECK(saw_plane);
  CHECK(saw_ratio);
}

TEST_CASE("family convergence scenario") {
  ScenarioConfig cfg;
  cfg.scenario = "family_convergence";
  cfg.i_list = {4, 16, 64};
  cfg.nr = 32;
  cfg.ns = 32;
  cfg.t_end = 0.2;
  cfg.t_grid = {0.0, 0.1, 0.2};
  cfg.apply_defaults();
  const auto rep = run_family_convergence(cfg);
  CHECK(rep.all_pass());
  bool saw_modulus = false, saw_cauchy = false, saw_chain = false;
  for (const auto& r : rep.records) {
    if (r.name.rfind("continuity_modulus", 0) == 0) {
      saw_modulus = true;
      CHECK(r.values.at("pairs") > 0);
    }
    saw_cauchy |= r.name == "cauchy_eps_nonincreasing";
    saw_chain |= r.name == "sixteen_eps_chain";
  }
  CHECK(saw_modulus);
  CHECK(saw_cauchy);
  CHECK(saw_chain);
}

TEST_CASE("doubling grid resolutions moves GH bounds less than the slack") {
  auto coarse = tiny_torus_config();
  coarse.i_list = {4};
  auto fine = coarse;
  fine.gh_nr = 32;
  fine.gh_ns = 32;
  fine.ns = 64;
  const auto rep_c = run_collapsing_torus(coarse);
  const auto rep_f = run_collapsing_torus(fine);
  double upper_c = 0.0, upper_f = 0.0, slack_c = 0.0;
  for (const auto& r : rep_c.records)
    if (r.name == "gh_upper_vs_fiber_bound") {
      upper_c = r.values.at("gh_upper");
      slack_c = r.values.at("grid_slack");
    }
  for (const auto& r : rep_f.records)
    if (r.name == "gh_upper_vs_fiber_bound") upper_f = r.values.at("gh_upper");
  CHECK(std::abs(upper_f - upper_c) < slack_c);
}

TEST_CASE("reports are bit-stable across reruns and job counts") {
  auto cfg = tiny_torus_config();
  cfg.i_list = {4};
  cfg.jobs = 1;
  const auto a = run_collapsing_torus(cfg);
  const auto b = run_collapsing_torus(cfg);
  cfg.jobs = 8;
  const auto c = run_collapsing_torus(cfg);
  CHECK(a.to_json(false).dump() == b.to_json(false).dump());
  // the config echo records the jobs knob; compare records only
  CHECK(a.to_json(false)["records"].dump() == c.to_json(false)["records"].dump());
}

TEST_CASE("verify suites pass on a correct build") {
  const auto flow = run_verify_suite("flow-oracles", 1, 0);
  CHECK(flow.all_pass());
  const auto gh = run_verify_suite("gh-axioms", 1, 0);
  CHECK(gh.all_pass());
  CHECK_THROWS_AS(run_verify_suite("nope", 1, 0), ConfigError);
}

TEST_SUITE_END();
