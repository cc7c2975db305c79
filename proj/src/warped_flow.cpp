#include "ghflow/warped_flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ghflow {

namespace {
const double kTwoPi = 2.0 * std::acos(-1.0);
}

void WarpedSurfaceMetric::require_valid() const {
  if (a.size() != b.size() || a.size() < 16)
    throw DomainError("warped metric needs matching a,b arrays with nr >= 16");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] > 0.0) || !(b[i] > 0.0) || !std::isfinite(a[i]) || !std::isfinite(b[i]))
      throw DomainError("warped metric coefficients must be positive and finite");
}

WarpedSurfaceMetric WarpedSurfaceMetric::from_profile(const std::vector<double>& f,
                                                      double lambda) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  WarpedSurfaceMetric m;
  m.a.assign(f.size(), 1.0);
  m.b.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(f[i] > 0.0)) throw DomainError("profile f must be positive");
    const double lf = lambda * f[i];
    m.b[i] = lf * lf;
  }
  m.require_valid();
  return m;
}

std::vector<double> profile_two_plus_cos(int n) {
  std::vector<double> f(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] = 2.0 + std::cos(kTwoPi * i / n);
  return f;
}

std::vector<double> profile_constant(int n, double value) {
  return std::vector<double>(static_cast<std::size_t>(n), value);
}

std::vector<double> gauss_curvature(const WarpedSurfaceMetric& m) {
  m.require_valid();
  const int n = m.nr();
  const double h = kTwoPi / n;
  std::vector<double> root(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    root[static_cast<std::size_t>(i)] =
        std::sqrt(m.a[static_cast<std::size_t>(i)] * m.b[static_cast<std::size_t>(i)]);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1) % n;
    const int im = (i + n - 1) % n;
    v[static_cast<std::size_t>(i)] =
        (m.b[static_cast<std::size_t>(ip)] - m.b[static_cast<std::size_t>(im)]) /
        (2.0 * h * root[static_cast<std::size_t>(i)]);
  }
  std::vector<double> k(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1) % n;
    const int im = (i + n - 1) % n;
    k[static_cast<std::size_t>(i)] =
        -(v[static_cast<std::size_t>(ip)] - v[static_cast<std::size_t>(im)]) /
        (2.0 * h) / (2.0 * root[static_cast<std::size_t>(i)]);
  }
  return k;
}

double curvature_sup(const WarpedSurfaceMetric& m) {
  double sup = 0.0;
  for (double k : gauss_curvature(m)) sup = std::max(sup, std::abs(k));
  return sup;
}

double gauss_bonnet_total(const WarpedSurfaceMetric& m) {
  const auto k = gauss_curvature(m);
  const int n = m.nr();
  const double h = kTwoPi / n;
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    total += k[static_cast<std::size_t>(i)] *
             std::sqrt(m.a[static_cast<std::size_t>(i)] * m.b[static_cast<std::size_t>(i)]);
  return total * h * kTwoPi;
}

double warped_stable_dt(const WarpedSurfaceMetric& m0) {
  const double h = kTwoPi / m0.nr();
  return h * h / (8.0 * std::max(1.0, curvature_sup(m0)));
}

FlowTrace<WarpedSurfaceMetric> integrate_warped_surface(const WarpedSurfaceMetric& m0,
                                                        double horizon, double dt,
                                                        int max_records) {
  m0.require_valid();
  if (!(horizon >= 0.0)) throw DomainError("horizon must be nonnegative");
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  const int n = m0.nr();
  const double h = kTwoPi / n;
  if (dt > warped_stable_dt(m0) * (1.0 + 1e-12))
    throw DomainError("dt violates the parabolic budget h^2/(8 max(1, K_max))");

  FlowTrace<WarpedSurfaceMetric> trace;
  trace.times.push_back(0.0);
  trace.states.push_back(m0);
  trace.k_max.push_back(curvature_sup(m0));
  if (horizon == 0.0) return trace;

  const long long steps = std::max<long long>(1, std::llround(horizon / dt));
  const double step = horizon / static_cast<double>(steps);
  const long long stride = std::max<long long>(1, steps / std::max(1, max_records - 1));

  using Pair = std::vector<double>;  // a followed by b
  auto pack = [n](const WarpedSurfaceMetric& m) {
    Pair u(static_cast<std::size_t>(2 * n));
    std::copy(m.a.begin(), m.a.end(), u.begin());
    std::copy(m.b.begin(), m.b.end(), u.begin() + n);
    return u;
  };
  auto unpack = [n](const Pair& u) {
    WarpedSurfaceMetric m;
    m.a.assign(u.begin(), u.begin() + n);
    m.b.assign(u.begin() + n, u.end());
    return m;
  };
  auto rates = [n](const Pair& u) {
    WarpedSurfaceMetric m;
    m.a.assign(u.begin(), u.begin() + n);
    m.b.assign(u.begin() + n, u.end());
    const auto k = gauss_curvature(m);
    Pair du(static_cast<std::size_t>(2 * n));
    for (int i = 0; i < n; ++i) {
      du[static_cast<std::size_t>(i)] = -2.0 * k[static_cast<std::size_t>(i)] * m.a[static_cast<std::size_t>(i)];
      du[static_cast<std::size_t>(n + i)] = -2.0 * k[static_cast<std::size_t>(i)] * m.b[static_cast<std::size_t>(i)];
    }
    return du;
  };

  Pair u = pack(m0);
  const std::size_t dim = u.size();
  Pair k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  for (long long s = 0; s < steps; ++s) {
    k1 = rates(u);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = u[i] + 0.5 * step * k1[i];
    k2 = rates(tmp);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = u[i] + 0.5 * step * k2[i];
    k3 = rates(tmp);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = u[i] + step * k3[i];
    k4 = rates(tmp);
    for (std::size_t i = 0; i < dim; ++i)
      u[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    const double t = static_cast<double>(s + 1) * step;
    for (double x : u)
      if (!(x > 0.0) || !std::isfinite(x))
        throw FlowError("warped flow left positivity at t=" + std::to_string(t));
    WarpedSurfaceMetric m = unpack(u);
    const double sup = curvature_sup(m);
    if (step > h * h / (8.0 * std::max(1.0, sup)) * (1.0 + 1e-12))
      throw FlowError("curvature grew past the parabolic step budget at t=" +
                      std::to_string(t));
    if ((s + 1) % stride == 0 || s + 1 == steps) {
      trace.times.push_back(t);
      trace.states.push_back(std::move(m));
      trace.k_max.push_back(sup);
    }
  }
  return trace;
}

FlowTrace<WarpedSurfaceMetric> parabolic_rescale(const FlowTrace<WarpedSurfaceMetric>& trace,
                                                 double c2) {
  if (!(c2 > 0.0)) throw DomainError("rescale factor must be positive");
  FlowTrace<WarpedSurfaceMetric> out;
  out.declared_c0 = trace.declared_c0;
  out.times.reserve(trace.times.size());
  out.states.reserve(trace.states.size());
  out.k_max.reserve(trace.k_max.size());
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    out.times.push_back(trace.times[k] * c2);
    WarpedSurfaceMetric m = trace.states[k];
    for (auto& v : m.a) v *= c2;
    for (auto& v : m.b) v *= c2;
    out.states.push_back(std::move(m));
    out.k_max.push_back(trace.k_max[k] / c2);
  }
  return out;
}

double r_circle_length(const WarpedSurfaceMetric& m) {
  const int n = m.nr();
  const double h = kTwoPi / n;
  double len = 0.0;
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1) % n;
    len += std::sqrt(0.5 * (m.a[static_cast<std::size_t>(i)] + m.a[static_cast<std::size_t>(ip)])) * h;
  }
  return len;
}

RiemannianSample sample_state(const WarpedSurfaceMetric& m, int nr, int ns) {
  m.require_valid();
  if (m.nr() % nr != 0)
    throw DomainError("sampling grid nr must divide the flow grid");
  const int stride = m.nr() / nr;
  std::vector<double> a(static_cast<std::size_t>(nr)), b(static_cast<std::size_t>(nr));
  for (int i = 0; i < nr; ++i) {
    a[static_cast<std::size_t>(i)] = m.a[static_cast<std::size_t>(i * stride)];
    b[static_cast<std::size_t>(i)] = m.b[static_cast<std::size_t>(i * stride)];
  }
  return RiemannianSample::torus_grid(a, b, nr, ns, kTwoPi, kTwoPi);
}

}  // namespace ghflow
