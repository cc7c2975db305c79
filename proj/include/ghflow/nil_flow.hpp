#pragma once

#include <array>
#include <vector>

#include "ghflow/flow_trace.hpp"

namespace ghflow {

// Left-invariant metric a*(dz - x dy)^2 + b*dy^2 + c*dx^2 on the Heisenberg
// group, diagonal in the standard left-invariant coframe.
struct NilMetric {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;

  void require_valid() const;
};

// Ricci-flow rates in the Milnor frame. With the orthonormal frame
// f1 = e1/sqrt(a), f2 = e2/sqrt(b), f3 = e3/sqrt(c) and [e2,e3] = e1, the
// only structure constant is lambda = sqrt(a/(b c)), giving sectional
// curvatures K(f1,f2) = K(f1,f3) = lambda^2/4, K(f2,f3) = -3 lambda^2/4 and
// Ricci eigenvalues (lambda^2/2, -lambda^2/2, -lambda^2/2). dg/dt = -2 Rc is
//   da/dt = -a^2/(b c),  db/dt = a/c,  dc/dt = a/b.
// Exact consequences used as oracles: a*b, a*c and b/c are conserved.
std::array<double, 3> nil_ricci_derivative(const NilMetric& m);

// Largest sectional-curvature magnitude, (3/4) a/(b c). Tends to 0 in the
// flat limit a/(bc) -> 0.
double nil_curvature_bound(const NilMetric& m);

// Classical 4th-order one-step integration; aborts with a diagnostic if the
// state leaves positivity. Records ~max_records states including t=0 and T.
FlowTrace<NilMetric> integrate_nil(const NilMetric& m0, double horizon, double dt,
                                   int max_records = 257);

// Square-root-exponent closed form: a = (2t+c1)^{-1/2}, b = c2 (2t+c1)^{1/2},
// c = c3 (2t+c1)^{1/2}. Conserves a*b, a*c, b/c but does not solve the
// implemented rates away from isolated instants; kept as a comparison
// evaluator behind the residual gate.
NilMetric nil_sqrt_form(double c1, double c2, double c3, double t);

// Similarity solution of the implemented rates: a0 u^{-1/3}, b0 u^{1/3},
// c0 u^{1/3} with u = 1 + 3 a0 t / (b0 c0).
NilMetric nil_similarity_form(const NilMetric& m0, double t);

// Max over the t-grid of the componentwise defect |d(form)/dt - rates(form)|,
// with the form's time derivative taken analytically.
double nil_sqrt_form_residual(double c1, double c2, double c3,
                           const std::vector<double>& t_grid);
double similarity_form_residual(const NilMetric& m0, const std::vector<double>& t_grid);

// Residual gate: evaluates both closed forms (the similarity form starts from
// the sqrt form's t=0 state so the two are comparable) and selects the one
// with residual below the gate as the trusted evaluator.
struct ClosedFormGate {
  static constexpr double kThreshold = 1e-10;
  double sqrt_residual = 0.0;
  double similarity_residual = 0.0;
  bool sqrt_passes = false;
  bool similarity_passes = false;
  NilMetric initial;  // shared t=0 state
};
ClosedFormGate closed_form_residual_gate(double c1, double c2, double c3,
                                         const std::vector<double>& t_grid);

}  // namespace ghflow
