#pragma once

#include <vector>

#include "ghflow/flow_trace.hpp"
#include "ghflow/grid_sample.hpp"

namespace ghflow {

// Rotationally symmetric torus metric a(r) dr^2 + b(r) ds^2 on [0,2pi)^2,
// sampled on a periodic r-grid. The initial family dr^2 + lambda^2 f^2 ds^2
// sits at a == 1; the flow does not preserve a == 1, hence the general pair.
struct WarpedSurfaceMetric {
  std::vector<double> a;
  std::vector<double> b;

  int nr() const { return static_cast<int>(a.size()); }
  void require_valid() const;

  static WarpedSurfaceMetric from_profile(const std::vector<double>& f, double lambda);
};

// Profile values of r -> 2 + cos r (and friends) on the n-point grid.
std::vector<double> profile_two_plus_cos(int n);
std::vector<double> profile_constant(int n, double value);

// Gauss curvature K = -(1/(2 sqrt(ab))) d_r( d_r b / sqrt(ab) ) by second-order
// periodic central differences. Reduces to -f''/f when a == 1, b == f^2.
std::vector<double> gauss_curvature(const WarpedSurfaceMetric& m);
double curvature_sup(const WarpedSurfaceMetric& m);

// Integral of K dA over the torus; zero for any closed profile up to roundoff
// (the discrete K is a divergence, so the sum telescopes).
double gauss_bonnet_total(const WarpedSurfaceMetric& m);

// 2D Ricci flow da/dt = -2 K a, db/dt = -2 K b by RK4. Requires the parabolic
// budget dt <= h^2 / (8 max(1, K_max)); aborts on positivity loss or
// curvature blow-up past the budget.
FlowTrace<WarpedSurfaceMetric> integrate_warped_surface(const WarpedSurfaceMetric& m0,
                                                        double horizon, double dt,
                                                        int max_records = 129);

// Parabolic step budget for the given state.
double warped_stable_dt(const WarpedSurfaceMetric& m0);

// The exact scaling symmetry of the flow: scaling the metric by c2 slows
// time by c2 and divides curvature by c2. Pure algebra on a recorded trace,
// used to state curvature-normalized hypotheses honestly.
FlowTrace<WarpedSurfaceMetric> parabolic_rescale(const FlowTrace<WarpedSurfaceMetric>& trace,
                                                 double c2);

// Length of the r-circle (same for every s by symmetry); the measured
// circumference c_hat(t) of the collapse scenarios.
double r_circle_length(const WarpedSurfaceMetric& m);

// Grid sampling of the state (8-neighbor stencil, periods 2pi).
RiemannianSample sample_state(const WarpedSurfaceMetric& m, int nr, int ns);

}  // namespace ghflow
