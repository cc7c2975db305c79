#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ghflow/errors.hpp"
#include "ghflow/metric_space.hpp"

namespace ghflow {

inline constexpr const char* kVersion = "0.1.0";

// Declarative experiment input. Fields not present in a config file take
// scenario-dependent defaults; unknown keys are rejected.
struct ScenarioConfig {
  std::string scenario;
  std::vector<int> i_list;
  std::vector<double> t_grid;
  int nr = 256;
  int ns = 256;
  // GH sampling grid: finer along the fiber direction, where the collapse
  // scale lives; the product stays at the dense-matrix cap.
  int gh_nr = 32;
  int gh_ns = 128;
  double dt = 0.0;  // 0: parabolic budget with a 0.9 safety factor
  double t_end = 0.5;
  std::uint64_t seed = 1;
  int budget = 800;
  int jobs = 0;
  double c1 = 1.0, c2 = 1.0, c3 = 1.0;
  int box_n = 9;
  std::vector<double> delta_grid{0.05, 0.1};
  std::string f_profile = "2+cos";

  nlohmann::ordered_json to_json() const;
  static ScenarioConfig from_json(const nlohmann::json& j);
  void apply_defaults();
  void validate() const;
};

ScenarioConfig parse_config(const std::string& path);

// Profile spec: "2+cos", "flat", "const:<v>" or "cosine:<a>:<b>" (a + b cos r).
std::vector<double> parse_profile(const std::string& spec, int n);

// One asserted bound with both sides, its margin, and any named values worth
// keeping (gh_lower, gh_upper, k_max, ...). kind "cell" rows feed series.csv.
struct CheckRecord {
  std::string name;
  std::string kind = "assert";
  std::optional<double> i;
  std::optional<double> t;
  bool pass = true;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  std::map<std::string, double> values;
  std::string note;
};

struct Report {
  std::string scenario;
  std::uint64_t seed = 0;
  nlohmann::ordered_json config_echo;
  std::vector<CheckRecord> records;

  bool all_pass() const;
  CheckRecord& add(CheckRecord rec);
  nlohmann::ordered_json to_json(bool include_timestamp = true) const;
  void write_csv(std::ostream& out) const;
};

Report run_collapsing_torus(const ScenarioConfig& cfg);
Report run_nil_scaling(const ScenarioConfig& cfg);
Report run_family_convergence(const ScenarioConfig& cfg);
Report run_scenario(const ScenarioConfig& cfg);

// Built-in verification suites: "gh-axioms", "flow-oracles" or "all".
Report run_verify_suite(const std::string& name, std::uint64_t seed, int jobs);

// n seeded points in a square of side 0.7, so distances stay within [0,1].
FiniteMetricSpace random_pointed_space(int n, std::uint64_t seed);

}  // namespace ghflow
