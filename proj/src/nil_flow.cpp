#include "ghflow/nil_flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ghflow {

void NilMetric::require_valid() const {
  if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0) || !std::isfinite(a) || !std::isfinite(b) ||
      !std::isfinite(c))
    throw DomainError("nil metric coefficients must be positive and finite");
}

std::array<double, 3> nil_ricci_derivative(const NilMetric& m) {
  m.require_valid();
  return {-m.a * m.a / (m.b * m.c), m.a / m.c, m.a / m.b};
}

double nil_curvature_bound(const NilMetric& m) {
  m.require_valid();
  return 0.75 * m.a / (m.b * m.c);
}

FlowTrace<NilMetric> integrate_nil(const NilMetric& m0, double horizon, double dt,
                                   int max_records) {
  m0.require_valid();
  if (!(horizon >= 0.0)) throw DomainError("horizon must be nonnegative");
  if (!(dt > 0.0)) throw DomainError("dt must be positive");

  FlowTrace<NilMetric> trace;
  trace.times.push_back(0.0);
  trace.states.push_back(m0);
  trace.k_max.push_back(nil_curvature_bound(m0));
  if (horizon == 0.0) return trace;

  const long long steps = std::max<long long>(1, std::llround(horizon / dt));
  const double h = horizon / static_cast<double>(steps);
  const long long stride = std::max<long long>(1, steps / std::max(1, max_records - 1));

  // Unchecked rates: intermediate stages may leave positivity on a divergent
  // run, and that must surface as the post-step FlowError, not a DomainError.
  auto rates = [](const NilMetric& m) -> std::array<double, 3> {
    return {-m.a * m.a / (m.b * m.c), m.a / m.c, m.a / m.b};
  };
  NilMetric m = m0;
  for (long long k = 0; k < steps; ++k) {
    const auto k1 = rates(m);
    NilMetric m2{m.a + 0.5 * h * k1[0], m.b + 0.5 * h * k1[1], m.c + 0.5 * h * k1[2]};
    const auto k2 = rates(m2);
    NilMetric m3{m.a + 0.5 * h * k2[0], m.b + 0.5 * h * k2[1], m.c + 0.5 * h * k2[2]};
    const auto k3 = rates(m3);
    NilMetric m4{m.a + h * k3[0], m.b + h * k3[1], m.c + h * k3[2]};
    const auto k4 = rates(m4);
    m.a += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    m.b += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    m.c += h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]);
    const double t = static_cast<double>(k + 1) * h;
    if (!(m.a > 0.0 && m.b > 0.0 && m.c > 0.0) || !std::isfinite(m.a + m.b + m.c))
      throw FlowError("nil flow left positivity at t=" + std::to_string(t));
    if ((k + 1) % stride == 0 || k + 1 == steps) {
      trace.times.push_back(t);
      trace.states.push_back(m);
      trace.k_max.push_back(nil_curvature_bound(m));
    }
  }
  return trace;
}

NilMetric nil_sqrt_form(double c1, double c2, double c3, double t) {
  const double w = 2.0 * t + c1;
  if (!(w > 0.0)) throw DomainError("nonpositive radicand 2t + c1");
  if (!(c2 > 0.0) || !(c3 > 0.0)) throw DomainError("c2, c3 must be positive");
  return {std::pow(w, -0.5), c2 * std::sqrt(w), c3 * std::sqrt(w)};
}

NilMetric nil_similarity_form(const NilMetric& m0, double t) {
  m0.require_valid();
  const double u = 1.0 + 3.0 * m0.a * t / (m0.b * m0.c);
  if (!(u > 0.0)) throw DomainError("similarity form leaves positivity");
  const double third = 1.0 / 3.0;
  return {m0.a * std::pow(u, -third), m0.b * std::pow(u, third), m0.c * std::pow(u, third)};
}

namespace {
double residual_of(const NilMetric& m, const std::array<double, 3>& form_rates) {
  const auto f = nil_ricci_derivative(m);
  return std::max({std::abs(form_rates[0] - f[0]), std::abs(form_rates[1] - f[1]),
                   std::abs(form_rates[2] - f[2])});
}
}  // namespace

double nil_sqrt_form_residual(double c1, double c2, double c3,
                           const std::vector<double>& t_grid) {
  double worst = 0.0;
  for (double t : t_grid) {
    const NilMetric m = nil_sqrt_form(c1, c2, c3, t);
    const double w = 2.0 * t + c1;
    const std::array<double, 3> rates{-std::pow(w, -1.5), c2 / std::sqrt(w),
                                      c3 / std::sqrt(w)};
    worst = std::max(worst, residual_of(m, rates));
  }
  return worst;
}

double similarity_form_residual(const NilMetric& m0, const std::vector<double>& t_grid) {
  m0.require_valid();
  const double rate0 = 3.0 * m0.a / (m0.b * m0.c);
  double worst = 0.0;
  for (double t : t_grid) {
    const NilMetric m = nil_similarity_form(m0, t);
    const double u = 1.0 + rate0 * t;
    const std::array<double, 3> rates{
        m0.a * (-1.0 / 3.0) * std::pow(u, -4.0 / 3.0) * rate0,
        m0.b * (1.0 / 3.0) * std::pow(u, -2.0 / 3.0) * rate0,
        m0.c * (1.0 / 3.0) * std::pow(u, -2.0 / 3.0) * rate0};
    worst = std::max(worst, residual_of(m, rates));
  }
  return worst;
}

ClosedFormGate closed_form_residual_gate(double c1, double c2, double c3,
                                         const std::vector<double>& t_grid) {
  ClosedFormGate gate;
  gate.initial = nil_sqrt_form(c1, c2, c3, 0.0);
  gate.sqrt_residual = nil_sqrt_form_residual(c1, c2, c3, t_grid);
  gate.similarity_residual = similarity_form_residual(gate.initial, t_grid);
  gate.sqrt_passes = gate.sqrt_residual < ClosedFormGate::kThreshold;
  gate.similarity_passes = gate.similarity_residual < ClosedFormGate::kThreshold;
  return gate;
}

}  // namespace ghflow
