#include <doctest.h>

#include <cmath>

#include "ghflow/grid_sample.hpp"
#include "ghflow/rng.hpp"
#include "ghflow/warped_flow.hpp"

using namespace ghflow;

namespace {
const double kPi = std::acos(-1.0);
const double kTwoPi = 2.0 * kPi;
}

TEST_SUITE_BEGIN("grid_sample");

TEST_CASE("flat unit-square torus has exact axis edges and lines") {
  const auto s = RiemannianSample::flat_torus(1.0, 1.0, 64, 64);
  // horizontally adjacent vertices sit one dyadic step apart
  const auto d = single_source_distances(s, s.index2(0, 0));
  CHECK(d[static_cast<std::size_t>(s.index2(1, 0))] == 1.0 / 64);
  CHECK(d[static_cast<std::size_t>(s.index2(0, 1))] == 1.0 / 64);
  // half-way along an axis line the straight path is optimal and exact
  CHECK(d[static_cast<std::size_t>(s.index2(32, 0))] == doctest::Approx(0.5).epsilon(0.01));
  CHECK(d[static_cast<std::size_t>(s.index2(32, 0))] == 0.5);
}

TEST_CASE("warped torus edges realize the metric at midpoints") {
  const int nr = 64, ns = 48;
  SUBCASE("flat product") {
    const auto s = sample_warped_torus(profile_constant(nr, 1.0), 1.0, nr, ns);
    const auto d = single_source_distances(s, 0);
    CHECK(d[static_cast<std::size_t>(s.index2(1, 0))] == doctest::Approx(kTwoPi / nr).epsilon(1e-14));
    CHECK(d[static_cast<std::size_t>(s.index2(0, 1))] == doctest::Approx(kTwoPi / ns).epsilon(1e-14));
  }
  SUBCASE("fiber scale divides s-edges only") {
    const auto s1 = sample_warped_torus(profile_constant(nr, 1.0), 1.0, nr, ns);
    const auto s2 = sample_warped_torus(profile_constant(nr, 1.0), 0.1, nr, ns);
    const auto d1 = single_source_distances(s1, 0);
    const auto d2 = single_source_distances(s2, 0);
    CHECK(d2[static_cast<std::size_t>(s1.index2(0, 1))] ==
          doctest::Approx(0.1 * d1[static_cast<std::size_t>(s1.index2(0, 1))]).epsilon(1e-12));
    CHECK(d2[static_cast<std::size_t>(s1.index2(1, 0))] ==
          doctest::Approx(d1[static_cast<std::size_t>(s1.index2(1, 0))]).epsilon(1e-12));
  }
  SUBCASE("s-edge at r=0 sees f(0) = 3 exactly on the grid") {
    const auto s = sample_warped_torus(profile_two_plus_cos(nr), 1.0, nr, ns);
    const auto d = single_source_distances(s, 0);
    CHECK(d[static_cast<std::size_t>(s.index2(0, 1))] ==
          doctest::Approx(3.0 * kTwoPi / ns).epsilon(1e-13));
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(sample_warped_torus(profile_constant(nr, -1.0), 1.0, nr, ns), DomainError);
    CHECK_THROWS_AS(sample_warped_torus(profile_constant(nr, 1.0), 0.0, nr, ns), DomainError);
    CHECK_THROWS_AS(sample_warped_torus(profile_constant(4, 1.0), 1.0, 4, 4), DomainError);
  }
}

TEST_CASE("flat torus axis-aligned distance on the unit square") {
  const auto s = RiemannianSample::flat_torus(1.0, 1.0, 64, 64);
  const auto d = single_source_distances(s, 0);
  // (0,0) -> (1/2, 0): axis path, exact within 1%
  CHECK(std::abs(d[static_cast<std::size_t>(s.index2(32, 0))] - 0.5) <= 0.005);
}

TEST_CASE("geodesic distances form a valid pointed space") {
  const auto s = sample_warped_torus(profile_two_plus_cos(16), 0.5, 16, 16);
  const auto x = geodesic_distances(s, 3);
  CHECK(x.size() == 256);
  CHECK(x.basepoint() == 3);
  x.validate();
  CHECK(x.labels.size() == 256);
}

TEST_CASE("distances grow monotonically with edge lengths") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> a(16), b(16), a2(16), b2(16);
    for (int i = 0; i < 16; ++i) {
      a[static_cast<std::size_t>(i)] = 0.5 + rng.next_unit();
      b[static_cast<std::size_t>(i)] = 0.5 + rng.next_unit();
      a2[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] * (1.0 + rng.next_unit());
      b2[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] * (1.0 + rng.next_unit());
    }
    const auto s = RiemannianSample::torus_grid(a, b, 16, 16, kTwoPi, kTwoPi);
    const auto s2 = RiemannianSample::torus_grid(a2, b2, 16, 16, kTwoPi, kTwoPi);
    const auto d = single_source_distances(s, 0);
    const auto d2 = single_source_distances(s2, 0);
    for (std::size_t v = 0; v < d.size(); ++v) CHECK(d2[v] >= d[v] * (1.0 - 1e-12));
  }
}

TEST_CASE("warped distance pins down under grid refinement") {
  // Target vertex (pi, pi) exists at even resolutions; refine and require
  // Cauchy decay, then pin the finest value as the regression number.
  auto dist_at = [](int n) {
    const auto s = sample_warped_torus(profile_two_plus_cos(n), 1.0, n, n);
    const auto d = single_source_distances(s, 0);
    return d[static_cast<std::size_t>(s.index2(n / 2, n / 2))];
  };
  const double d128 = dist_at(128);
  const double d256 = dist_at(256);
  const double d512 = dist_at(512);
  CHECK(std::abs(d512 - d256) < std::abs(d256 - d128));
  CHECK(std::abs(d512 - d256) < 5e-3);
  CHECK(d512 == doctest::Approx(5.7806297710026735).epsilon(1e-9));  // pinned at 512^2
}

TEST_CASE("landmark machinery is deterministic") {
  const auto s = sample_warped_torus(profile_two_plus_cos(32), 0.5, 32, 32);
  const auto lm = farthest_point_landmarks(s, 4, 0);
  CHECK(lm.size() == 4);
  CHECK(lm[0] == 0);
  CHECK(farthest_point_landmarks(s, 4, 0) == lm);
  const auto net = landmark_space(s, lm);
  CHECK(net.size() == 4);
  CHECK(net.basepoint() == 0);
  net.validate();
}

TEST_CASE("periodic seams carry the same midpoint coefficients") {
  // Edge lengths across the wraparound must follow the same rule as the
  // interior, so distances measured through the seam agree with distances
  // measured away from it.
  const int nr = 16, ns = 16;
  std::vector<double> a(nr), b(nr);
  for (int i = 0; i < nr; ++i) {
    a[static_cast<std::size_t>(i)] = 1.0 + 0.25 * std::cos(kTwoPi * i / nr);
    b[static_cast<std::size_t>(i)] = 2.0 + std::sin(kTwoPi * i / nr);
  }
  const auto s = RiemannianSample::torus_grid(a, b, nr, ns, kTwoPi, kTwoPi);
  const double h = kTwoPi / nr;
  // r-edge across the seam (nr-1 -> 0) uses the a-midpoint of its endpoints
  const auto d = single_source_distances(s, s.index2(nr - 1, 0));
  const double expect = std::sqrt(0.5 * (a[static_cast<std::size_t>(nr - 1)] + a[0])) * h;
  CHECK(d[static_cast<std::size_t>(s.index2(0, 0))] == doctest::Approx(expect).epsilon(1e-12));
  // s-edges wrap identically at every r
  const auto ds = single_source_distances(s, s.index2(3, ns - 1));
  CHECK(ds[static_cast<std::size_t>(s.index2(3, 0))] ==
        doctest::Approx(std::sqrt(b[3]) * (kTwoPi / ns)).epsilon(1e-12));
}

TEST_CASE("ring and segment samples") {
  std::vector<double> edges(12, 0.25);
  const auto ring = RiemannianSample::ring(edges);
  const auto dr = single_source_distances(ring, 0);
  CHECK(dr[6] == doctest::Approx(1.5).epsilon(1e-14));
  const auto seg = RiemannianSample::segment(edges);
  const auto ds = single_source_distances(seg, 0);
  CHECK(ds[12] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(ring.stencil_anisotropy() == 1.0);
  CHECK_THROWS_AS(RiemannianSample::ring({1.0, -1.0, 1.0}), DomainError);
}

TEST_CASE("dense matrices stay capped") {
  const auto big = RiemannianSample::flat_torus(1.0, 1.0, 128, 128);
  CHECK_THROWS_AS(geodesic_distances(big, 0), DomainError);
  CHECK_NOTHROW(single_source_distances(big, 0));
}

TEST_SUITE_END();
