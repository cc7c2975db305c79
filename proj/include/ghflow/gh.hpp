#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ghflow/grid_sample.hpp"
#include "ghflow/metric_space.hpp"

namespace ghflow {

using SpaceRef = std::shared_ptr<const FiniteMetricSpace>;

inline SpaceRef make_space(FiniteMetricSpace s) {
  return std::make_shared<const FiniteMetricSpace>(std::move(s));
}

// Basepoint-preserving map between pointed spaces; image[i] is the target
// index of source point i.
struct PointedMap {
  SpaceRef source;
  SpaceRef target;
  std::vector<int> image;
};

void validate_map(const PointedMap& map);

// The eps-pointed approximation predicate:
//   (a) every target point y with d(y0,y) < 1/eps - eps lies within eps of
//       the image of the open 1/eps-ball about the source basepoint, and
//   (b) |d_X(x,x') - d_Y(f x, f x')| < eps on that ball.
// Inequalities are strict and compared exactly on stored floats; tolerances
// belong to acceptance budgets, not to this predicate.
bool check_eps_approximation(const PointedMap& map, double eps);

struct ApproxDetail {
  bool ok = false;
  double worst_distortion = 0.0;    // max |dX - dY| over checked pairs
  double worst_coverage_gap = 0.0;  // max over required targets of dist to image
  bool coverage_vacuous = true;
};
ApproxDetail check_eps_approximation_detail(const PointedMap& map, double eps);

// Certified two-sided estimate. `upper` always carries re-checkable witness
// maps; `lower` is a necessary-condition bound (never above the grid-restricted
// distance). An exhausted grid yields upper = +inf with empty witnesses.
struct GhEstimate {
  double lower = 0.0;
  double upper = 0.0;
  PointedMap witness_fwd;
  PointedMap witness_bwd;
  std::vector<double> eps_grid;
  std::string method;

  bool witnesses_ok() const;
};

// 64 geometric points from 1e-3 to 1.5.
std::vector<double> default_eps_grid();

// Exhaustive solver for tiny spaces (|X|,|Y| <= 6). Every grid eps is tested
// independently; maps enumerate in lexicographic image order, so witnesses
// are the lexicographically smallest feasible maps.
GhEstimate gh_brute_force(const SpaceRef& x, const SpaceRef& y,
                          const std::vector<double>& eps_grid = default_eps_grid());

// Largest grid eps preceded only by eps values that violate the necessary
// condition ecc_X(1/e)-e <= rad_Y (and symmetrically); 0 when nothing violates.
double gh_lower_bound(const SpaceRef& x, const SpaceRef& y,
                      const std::vector<double>& eps_grid = default_eps_grid());

// Witness-certified upper bound: deterministic candidate maps (constant,
// greedy landmark-signature matching, caller-provided seeds) plus simulated
// annealing over single-point reassignments. Falls back to exhaustive
// per-direction enumeration whenever the budget covers the whole map space.
// refine=false restricts the estimate to the deterministic candidate pool;
// scenario reports use that mode so bounds track the structured witness
// family rather than annealing luck.
GhEstimate gh_upper_bound(const SpaceRef& x, const SpaceRef& y, int budget,
                          std::uint64_t seed,
                          const std::vector<double>& eps_grid = default_eps_grid(),
                          const std::vector<std::vector<int>>& seed_maps_fwd = {},
                          const std::vector<std::vector<int>>& seed_maps_bwd = {},
                          bool refine = true);

// --- Section-2 propositions as checkable records ---

struct TriangleFactor2Report {
  bool hypothesis_met = false;
  double d12 = 0.0, d23 = 0.0, d13 = 0.0;
  double bound_sum = 0.0;   // 2 (d12 + d23)
  double bound_max = 0.0;   // 2 max(d12, d23), recorded for comparison only
  double margin_sum = 0.0;
  double margin_max = 0.0;
  bool pass = true;  // vacuously true when the hypothesis is not met
};
// Checks d13 <= 2 (d12 + d23) under the hypothesis d12, d23 <= 1/2; the sum
// reading is implied by either reading of the two-argument display.
TriangleFactor2Report check_triangle_factor2(
    const SpaceRef& x1, const SpaceRef& x2, const SpaceRef& x3,
    const std::vector<double>& eps_grid = default_eps_grid());

struct AssociativityReport {
  bool hypothesis_met = false;
  std::vector<double> pair_distances;
  double limit_distance = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool pass = true;
};
// Finite-scale version of the 4-eps convergence statement, with the last list
// entries standing in for the limits. Evidence, not proof.
AssociativityReport check_associativity(
    const std::vector<SpaceRef>& xs, const std::vector<SpaceRef>& xs_prime, double eps,
    double slack, const std::vector<double>& eps_grid = default_eps_grid());

struct MetricsCloseReport {
  double delta = 0.0;
  double worst_edge_ratio = 1.0;
  double gh_upper = 0.0;
  double bound = 0.0;   // 2 delta^{1/4} (1+delta)^{1/2}
  double slack = 0.0;
  double margin = 0.0;
  bool pass = false;
};
// Verifies the metrics-close => GH-close bound on two samplings of the same
// grid whose edge lengths differ by at most (1+delta)^{1/2} pointwise.
MetricsCloseReport verify_metrics_close_bound(const RiemannianSample& sample,
                                              const RiemannianSample& perturbed,
                                              double delta, int budget,
                                              std::uint64_t seed,
                                              double slack_multiplier = 1.0);

}  // namespace ghflow
