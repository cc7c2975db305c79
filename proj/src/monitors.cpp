#include "ghflow/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ghflow {

double BoundParams::r_of_t(double t) {
  if (!(t >= 0.0)) throw DomainError("r(t) needs t >= 0");
  return 1.0 / (1.0 + std::sqrt(std::expm1(2.0 * t)));
}

BoundParams BoundParams::derive(double c0, double delta, double horizon) {
  if (!(c0 > 0.0)) throw DomainError("c0 must be positive");
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  BoundParams p;
  p.c0 = c0;
  p.delta = delta;
  p.eta = std::log1p(delta) / (2.0 * c0);
  p.horizon = horizon;
  return p;
}

namespace {

// Flattened per-time coefficient arrays shared by both flow families.
struct CoeffSeries {
  std::vector<double> times;
  std::vector<std::vector<double>> comps;
};

CoeffSeries series_of(const FlowTrace<NilMetric>& trace) {
  CoeffSeries s;
  s.times = trace.times;
  for (const auto& m : trace.states) s.comps.push_back({m.a, m.b, m.c});
  return s;
}

CoeffSeries series_of(const FlowTrace<WarpedSurfaceMetric>& trace) {
  CoeffSeries s;
  s.times = trace.times;
  for (const auto& m : trace.states) {
    std::vector<double> v;
    v.reserve(m.a.size() + m.b.size());
    v.insert(v.end(), m.a.begin(), m.a.end());
    v.insert(v.end(), m.b.begin(), m.b.end());
    s.comps.push_back(std::move(v));
  }
  return s;
}

void require_curvature_bound(double trace_max, double c0) {
  if (trace_max > c0 * (1.0 + 1e-9))
    throw HypothesisError("recorded curvature exceeds the declared bound c0");
}

// items 1 and 2 over all recorded pairs
void ratio_items(const CoeffSeries& s, double c0, double eta, double delta, double tol,
                 EquivalenceReport& rep) {
  const std::size_t nt = s.times.size();
  const std::size_t nc = s.comps.front().size();
  double worst1 = -1.0;
  double worst2 = 0.0;
  int pairs2 = 0;
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = i + 1; j < nt; ++j) {
      const double dt = s.times[j] - s.times[i];
      const double bound = std::exp(2.0 * c0 * dt);
      const bool in_eta = dt < eta;
      if (in_eta) ++pairs2;
      for (std::size_t k = 0; k < nc; ++k) {
        const double ratio = s.comps[j][k] / s.comps[i][k];
        const double spread = std::max(ratio, 1.0 / ratio);
        worst1 = std::max(worst1, spread / bound - (1.0 + tol));
        if (in_eta) worst2 = std::max(worst2, std::abs(ratio - 1.0));
      }
    }
  rep.item1_worst_excess = worst1;
  rep.item1_pass = worst1 <= 0.0;
  rep.item2_pairs = pairs2;
  rep.item2_worst = worst2;
  rep.item2_pass = worst2 <= delta * (1.0 + tol);
}

void distance_item(const RiemannianSample& s0, const RiemannianSample& s1,
                   double delta_pair, int landmark_count, EquivalenceReport& rep) {
  const double kappa = std::max(s0.stencil_anisotropy(), s1.stencil_anisotropy());
  const double h_add = 4.0 * std::max(s0.max_edge_length(), s1.max_edge_length());
  const double root_delta = std::sqrt(delta_pair);
  const auto landmarks = farthest_point_landmarks(s0, landmark_count, 0);
  double worst = -std::numeric_limits<double>::infinity();
  double slack_at_worst = 0.0;
  for (int lm : landmarks) {
    const auto d0 = single_source_distances(s0, lm);
    const auto d1 = single_source_distances(s1, lm);
    for (std::size_t q = 0; q < d0.size(); ++q) {
      const double slack = (kappa - 1.0) * (d0[q] + d1[q]) + h_add;
      const double excess = std::abs(d1[q] - d0[q]) - root_delta * d0[q] - slack;
      if (excess > worst) {
        worst = excess;
        slack_at_worst = slack;
      }
    }
  }
  rep.item3_worst_excess = worst;
  rep.item3_slack = slack_at_worst;
  rep.item3_pass = worst <= 0.0;
}

template <class Trace, class Sampler>
EquivalenceReport equivalence_impl(const Trace& trace, const BoundParams& params,
                                   double t0, double t, const Sampler& sampler,
                                   int landmark_count, double tol) {
  require_curvature_bound(trace.max_curvature(), params.c0);
  EquivalenceReport rep;
  rep.c0 = params.c0;
  rep.ratio_tolerance = tol;
  const auto series = series_of(trace);
  ratio_items(series, params.c0, params.eta, params.delta, tol, rep);

  const int i0 = trace.index_at(t0);
  const int i1 = trace.index_at(t);
  rep.pair_t0 = trace.times[static_cast<std::size_t>(i0)];
  rep.pair_t = trace.times[static_cast<std::size_t>(i1)];
  rep.delta_pair = std::expm1(2.0 * params.c0 * std::abs(rep.pair_t - rep.pair_t0));
  const auto s0 = sampler(trace.states[static_cast<std::size_t>(i0)]);
  const auto s1 = sampler(trace.states[static_cast<std::size_t>(i1)]);
  distance_item(s0, s1, rep.delta_pair, landmark_count, rep);
  return rep;
}

template <class Trace>
LipschitzReport lipschitz_impl(const Trace& trace, double c, double tol) {
  if (!(c > 0.0)) throw DomainError("derivative bound c must be positive");
  LipschitzReport rep;
  rep.c = c;
  rep.c_prime = 2.0 * c;
  const auto series = series_of(trace);
  const std::size_t nt = series.times.size();
  const std::size_t nc = series.comps.front().size();

  // |c(t+dt) - c(t)| <= c dt sup c <= c dt c(t) e^{c dt} under the hypothesis.
  double hyp_worst = 0.0;
  for (std::size_t i = 0; i + 1 < nt; ++i) {
    const double dt = series.times[i + 1] - series.times[i];
    if (!(dt > 0.0)) continue;
    for (std::size_t k = 0; k < nc; ++k) {
      const double allowed = c * dt * series.comps[i][k] * std::exp(c * dt);
      hyp_worst = std::max(hyp_worst,
                           std::abs(series.comps[i + 1][k] - series.comps[i][k]) / allowed);
    }
  }
  rep.hypothesis_worst = hyp_worst;
  if (hyp_worst > 1.0 + 1e-9)
    throw HypothesisError("trace differences exceed |dg/dt| <= c g");

  double worst = -1.0;
  for (std::size_t i = 0; i < nt; ++i) {
    const double bound = std::exp(rep.c_prime * series.times[i]);
    for (std::size_t k = 0; k < nc; ++k) {
      const double ratio = series.comps[i][k] / series.comps[0][k];
      worst = std::max(worst, std::max(ratio, 1.0 / ratio) / bound - (1.0 + tol));
    }
  }
  rep.worst_excess = worst;
  rep.pass = worst <= 0.0;
  return rep;
}

}  // namespace

EquivalenceReport check_metric_equivalence_bounds(const FlowTrace<NilMetric>& trace,
                                                  const BoundParams& params, double t0,
                                                  double t, const NilSampler& sampler,
                                                  int landmark_count,
                                                  double ratio_tolerance) {
  return equivalence_impl(trace, params, t0, t, sampler, landmark_count, ratio_tolerance);
}

EquivalenceReport check_metric_equivalence_bounds(
    const FlowTrace<WarpedSurfaceMetric>& trace, const BoundParams& params, double t0,
    double t, const WarpedSampler& sampler, int landmark_count, double ratio_tolerance) {
  return equivalence_impl(trace, params, t0, t, sampler, landmark_count, ratio_tolerance);
}

ContainmentReport check_ball_containment(const FlowTrace<WarpedSurfaceMetric>& trace,
                                         const WarpedSampler& sampler, double rho,
                                         double t) {
  if (!(rho > 0.0)) throw DomainError("rho must be positive");
  if (trace.max_curvature() > 1.0 + 1e-9)
    throw HypothesisError("ball containment requires curvature bounded by 1");

  ContainmentReport rep;
  rep.rho = rho;
  const int i1 = trace.index_at(t);
  rep.t = trace.times[static_cast<std::size_t>(i1)];
  rep.shrink_factor = BoundParams::r_of_t(rep.t);

  const auto s0 = sampler(trace.states.front());
  const auto s1 = sampler(trace.states[static_cast<std::size_t>(i1)]);
  const double kappa = std::max(s0.stencil_anisotropy(), s1.stencil_anisotropy());
  const double h_add = 2.0 * std::max(s0.max_edge_length(), s1.max_edge_length());
  rep.inner_radius = rep.shrink_factor * (rho - h_add) / kappa;
  if (!(rep.inner_radius > 0.0))
    throw DomainError("rho too small for the sampling resolution");

  const auto d0 = single_source_distances(s0, 0);
  const auto d1 = single_source_distances(s1, 0);
  auto inclusion = [&](const std::vector<double>& inner, const std::vector<double>& outer,
                       int& count, double& margin) {
    count = 0;
    double worst = 0.0;
    for (std::size_t q = 0; q < inner.size(); ++q)
      if (inner[q] < rep.inner_radius) {
        ++count;
        worst = std::max(worst, outer[q]);
      }
    margin = rho - worst;
    return worst < rho;
  };
  rep.forward_pass = inclusion(d1, d0, rep.forward_count, rep.forward_margin);
  rep.backward_pass = inclusion(d0, d1, rep.backward_count, rep.backward_margin);
  return rep;
}

LipschitzReport check_lipschitz_equivalence(const FlowTrace<NilMetric>& trace, double c,
                                            double ratio_tolerance) {
  return lipschitz_impl(trace, c, ratio_tolerance);
}

LipschitzReport check_lipschitz_equivalence(const FlowTrace<WarpedSurfaceMetric>& trace,
                                            double c, double ratio_tolerance) {
  return lipschitz_impl(trace, c, ratio_tolerance);
}

}  // namespace ghflow
