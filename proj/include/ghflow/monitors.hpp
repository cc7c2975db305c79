#pragma once

#include <functional>

#include "ghflow/flow_trace.hpp"
#include "ghflow/grid_sample.hpp"
#include "ghflow/nil_flow.hpp"
#include "ghflow/warped_flow.hpp"

namespace ghflow {

// Quantitative constants of the flow estimates: curvature bound c0, metric
// tolerance delta, the matching time window eta = log(1+delta)/(2 c0), and the
// ball-shrinkage rate r(t) = 1/(1 + sqrt(e^{2t} - 1)).
struct BoundParams {
  double c0 = 1.0;
  double delta = 0.1;
  double eta = 0.0;
  double horizon = 0.0;

  static double r_of_t(double t);
  static BoundParams derive(double c0, double delta, double horizon);
};

using NilSampler = std::function<RiemannianSample(const NilMetric&)>;
using WarpedSampler = std::function<RiemannianSample(const WarpedSurfaceMetric&)>;

// Three metric-equivalence bounds under a curvature cap, as one record:
//   1. coefficient ratios within e^{+-2 c0 |t-t0|} for all recorded pairs,
//   2. |ratio - 1| <= delta for recorded pairs closer than eta,
//   3. |d_t - d_t0| <= sqrt(delta_pair) d_t0 + slack on sampled distances,
// with delta_pair = e^{2 c0 |t-t0|} - 1 (the value item 1 integrates to).
struct EquivalenceReport {
  double c0 = 0.0;
  double ratio_tolerance = 0.0;
  double item1_worst_excess = 0.0;  // max of max(ratio,1/ratio)/bound - (1+tol)
  bool item1_pass = false;
  int item2_pairs = 0;
  double item2_worst = 0.0;
  bool item2_pass = false;
  double pair_t0 = 0.0, pair_t = 0.0, delta_pair = 0.0;
  double item3_worst_excess = 0.0;
  double item3_slack = 0.0;
  bool item3_pass = false;
  bool pass() const { return item1_pass && item2_pass && item3_pass; }
};

EquivalenceReport check_metric_equivalence_bounds(const FlowTrace<NilMetric>& trace,
                                                  const BoundParams& params, double t0,
                                                  double t, const NilSampler& sampler,
                                                  int landmark_count = 4,
                                                  double ratio_tolerance = 1e-3);

EquivalenceReport check_metric_equivalence_bounds(
    const FlowTrace<WarpedSurfaceMetric>& trace, const BoundParams& params, double t0,
    double t, const WarpedSampler& sampler, int landmark_count = 4,
    double ratio_tolerance = 1e-3);

// Ball containment under the flow, on sampled distances. Requires the
// trace-wide curvature bound 1. The inner radius r(t)*rho is shrunk by the
// grid budget (multiplicative anisotropy, additive 2 max-edge) so that the
// sample-level inclusion is a consequence of the continuum statement.
struct ContainmentReport {
  double rho = 0.0;
  double t = 0.0;
  double shrink_factor = 0.0;  // r(t)
  double inner_radius = 0.0;
  int forward_count = 0;
  double forward_margin = 0.0;
  bool forward_pass = false;
  int backward_count = 0;
  double backward_margin = 0.0;
  bool backward_pass = false;
  bool pass() const { return forward_pass && backward_pass; }
};

ContainmentReport check_ball_containment(const FlowTrace<WarpedSurfaceMetric>& trace,
                                         const WarpedSampler& sampler, double rho,
                                         double t);

// Two-sided Lipschitz bound e^{-c' t} g(0) <= g(t) <= e^{c' t} g(0) with
// c' = 2c, after verifying |dg/dt| <= c g numerically from trace differences.
struct LipschitzReport {
  double c = 0.0;
  double c_prime = 0.0;
  double hypothesis_worst = 0.0;  // max |dc| / (c dt e^{c dt}) observed
  double worst_excess = 0.0;      // max of max(ratio,1/ratio)/e^{c' t} - (1+tol)
  bool pass = false;
};

LipschitzReport check_lipschitz_equivalence(const FlowTrace<NilMetric>& trace, double c,
                                            double ratio_tolerance = 1e-3);
LipschitzReport check_lipschitz_equivalence(const FlowTrace<WarpedSurfaceMetric>& trace,
                                            double c, double ratio_tolerance = 1e-3);

}  // namespace ghflow
