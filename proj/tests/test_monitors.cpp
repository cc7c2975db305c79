#include <doctest.h>

#include <cmath>

#include "ghflow/monitors.hpp"

using namespace ghflow;

namespace {

RiemannianSample nil_box(const NilMetric& m) {
  // Diagonal part of a(dz-xdy)^2 + b dy^2 + c dx^2 in (x,y,z) coordinates.
  return RiemannianSample::box3({0, 0, 0}, {1, 1, 1}, 9, 9, 9,
                                [m](double x, double, double) -> std::array<double, 3> {
                                  return {m.c, m.b + m.a * x * x, m.a};
                                });
}

WarpedSampler coarse_sampler(int nr, int ns) {
  return [nr, ns](const WarpedSurfaceMetric& m) { return sample_state(m, nr, ns); };
}

}  // namespace

TEST_SUITE_BEGIN("monitors");

TEST_CASE("shrinkage rate r(t)") {
  CHECK(BoundParams::r_of_t(0.0) == 1.0);
  CHECK(BoundParams::r_of_t(0.5 * std::log(2.0)) == 0.5);  // e^{2t} - 1 = 1
  double prev = 1.0;
  for (int k = 1; k <= 40; ++k) {
    const double r = BoundParams::r_of_t(0.025 * k);
    CHECK(r < prev);
    prev = r;
  }
  CHECK_THROWS_AS(BoundParams::r_of_t(-0.1), DomainError);
}

TEST_CASE("eta matches the log(1+delta) window") {
  const auto p = BoundParams::derive(2.0, 0.1, 1.0);
  CHECK(p.eta == doctest::Approx(std::log1p(0.1) / 4.0).epsilon(1e-15));
  CHECK_THROWS_AS(BoundParams::derive(0.0, 0.1, 1.0), DomainError);
}

TEST_CASE("flat warped trace: all ratios are exactly one") {
  const auto m0 = WarpedSurfaceMetric::from_profile(profile_constant(32, 1.0), 1.0);
  const auto trace = integrate_warped_surface(m0, 0.1, 0.9 * warped_stable_dt(m0), 9);
  const auto params = BoundParams::derive(1e-6, 0.1, 0.1);
  const auto rep = check_metric_equivalence_bounds(trace, params, 0.0, trace.times.back(),
                                                   coarse_sampler(16, 16), 3);
  CHECK(rep.item1_pass);
  CHECK(rep.item2_pass);
  CHECK(rep.item3_pass);
  CHECK(rep.item2_worst <= 1e-12);
}

TEST_CASE("nil trace obeys the coefficient ratio bounds") {
  const double root3 = std::sqrt(3.0);
  const auto trace = integrate_nil({1.0, root3, root3}, 1.0, 1e-3, 65);
  const double c0 = trace.max_curvature();
  const auto params = BoundParams::derive(c0, 0.1, 1.0);
  const double t_mid = trace.times[static_cast<std::size_t>(trace.nearest_index(0.5))];
  const auto rep = check_metric_equivalence_bounds(trace, params, 0.0, t_mid, nil_box, 3);
  CHECK(rep.item1_pass);
  CHECK(rep.item2_pass);
  CHECK(rep.item3_pass);
  CHECK(rep.c0 == c0);

  // Unrecorded probe times are a usage error, not silently snapped.
  CHECK_THROWS_AS(
      check_metric_equivalence_bounds(trace, params, 0.0, t_mid + 1e-4, nil_box, 3),
      UsageError);

  // An understated curvature bound must be rejected, not absorbed.
  const auto lowball = BoundParams::derive(c0 / 4.0, 0.1, 1.0);
  CHECK_THROWS_AS(
      check_metric_equivalence_bounds(trace, lowball, 0.0, t_mid, nil_box, 3),
      HypothesisError);
}

TEST_CASE("warped trace distance change stays inside the item-3 budget") {
  const auto m0 = WarpedSurfaceMetric::from_profile(profile_two_plus_cos(64), 1.0);
  const auto trace = integrate_warped_surface(m0, 0.1, 0.9 * warped_stable_dt(m0), 17);
  const auto params = BoundParams::derive(trace.max_curvature(), 0.1, 0.1);
  const double t = trace.times[static_cast<std::size_t>(trace.nearest_index(0.05))];
  const auto rep = check_metric_equivalence_bounds(trace, params, 0.0, t,
                                                   coarse_sampler(64, 64), 4);
  CHECK(rep.item1_pass);
  CHECK(rep.item3_pass);
  CHECK(rep.delta_pair == doctest::Approx(std::expm1(2.0 * params.c0 * t)));
}

TEST_CASE("ball containment along the cosine flow") {
  // 2 + 0.9 cos keeps |K| <= 0.9/1.1 well inside the curvature-1 hypothesis,
  // discretization wobble included.
  std::vector<double> f(64);
  for (int i = 0; i < 64; ++i)
    f[static_cast<std::size_t>(i)] = 2.0 + 0.9 * std::cos(2.0 * std::acos(-1.0) * i / 64);
  const auto m0 = WarpedSurfaceMetric::from_profile(f, 1.0);
  const auto trace = integrate_warped_surface(m0, 0.25, 0.9 * warped_stable_dt(m0), 17);
  REQUIRE(trace.max_curvature() <= 1.0);
  SUBCASE("t = 0 is an equality of balls") {
    const auto rep = check_ball_containment(trace, coarse_sampler(64, 64), 1.0, 0.0);
    CHECK(rep.pass());
    CHECK(rep.shrink_factor == 1.0);
    CHECK(rep.forward_count > 1);
  }
  SUBCASE("positive time keeps both inclusions") {
    const auto rep =
        check_ball_containment(trace, coarse_sampler(64, 64), 1.0, trace.times.back());
    CHECK(rep.pass());
    CHECK(rep.forward_margin > 0.0);
    CHECK(rep.backward_margin > 0.0);
    CHECK(rep.forward_count > 1);
    CHECK(rep.backward_count > 1);
  }
  SUBCASE("curvature hypothesis is enforced") {
    auto fat = trace;
    fat.k_max[2] = 1.5;
    CHECK_THROWS_AS(check_ball_containment(fat, coarse_sampler(64, 64), 1.0, 0.1),
                    HypothesisError);
  }
  SUBCASE("radii below the sampling step are rejected") {
    const double t_rec = trace.times.back();
    CHECK_THROWS_AS(check_ball_containment(trace, coarse_sampler(64, 64), 1e-6, t_rec),
                    DomainError);
    CHECK_THROWS_AS(check_ball_containment(trace, coarse_sampler(64, 64), -1.0, t_rec),
                    DomainError);
  }
}

TEST_CASE("declared curvature bounds are honored or reported") {
  const auto m0 = WarpedSurfaceMetric::from_profile(profile_two_plus_cos(32), 1.0);
  auto trace = integrate_warped_surface(m0, 0.05, 0.9 * warped_stable_dt(m0), 9);
  CHECK(trace.declared_bound_ok());  // nothing declared
  trace.declared_c0 = 2.0;
  CHECK(trace.declared_bound_ok());
  trace.declared_c0 = 0.5;
  CHECK_FALSE(trace.declared_bound_ok());
}

TEST_CASE("lipschitz two-sided bound with c' = 2c") {
  const double root3 = std::sqrt(3.0);
  const auto trace = integrate_nil({1.0, root3, root3}, 1.0, 1e-3, 65);
  const double c = 2.0 * trace.max_curvature();
  const auto rep = check_lipschitz_equivalence(trace, c);
  CHECK(rep.pass);
  CHECK(rep.c_prime == 2.0 * c);
  CHECK(rep.hypothesis_worst <= 1.0);

  const auto m0 = WarpedSurfaceMetric::from_profile(profile_two_plus_cos(64), 1.0);
  const auto wtrace = integrate_warped_surface(m0, 0.5, 0.9 * warped_stable_dt(m0), 33);
  const auto wrep = check_lipschitz_equivalence(wtrace, 2.0 * wtrace.max_curvature());
  CHECK(wrep.pass);

  CHECK_THROWS_AS(check_lipschitz_equivalence(trace, 1e-4), HypothesisError);
}

TEST_SUITE_END();
