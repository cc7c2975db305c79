#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ghflow/metric_space.hpp"

using namespace ghflow;

namespace {
const double kTwoPi = 2.0 * std::acos(-1.0);
}

TEST_SUITE_BEGIN("metric_space");

TEST_CASE("circle sample distances follow the arc formula") {
  const auto c = sample_circle(kTwoPi, 360);
  c.validate();
  CHECK(c.basepoint() == 0);
  CHECK(c(0, 1) == doctest::Approx(kTwoPi / 360).epsilon(1e-15));
  CHECK(c(0, 180) == doctest::Approx(kTwoPi / 2).epsilon(1e-15));
  for (int k = 0; k < 360; ++k) {
    const double expect = kTwoPi * (std::min(k, 360 - k) / 360.0);
    CHECK(c(0, k) == expect);
  }
}

TEST_CASE("strict ball about a circle point excludes the boundary") {
  const auto c = sample_circle(kTwoPi, 360);
  const auto ball = metric_ball(c, 0, std::acos(-1.0) / 2.0);
  CHECK(ball.size() == 179);
  CHECK(ball(ball.basepoint(), ball.basepoint()) == 0.0);
}

TEST_CASE("ball edge cases") {
  const auto c = sample_circle(1.0, 8);
  CHECK(metric_ball(c, 0, 10.0).size() == 8);   // rho > diameter keeps everything
  CHECK(metric_ball(c, 3, 1e-12).size() == 1);  // center always qualifies
  CHECK(metric_ball(c, 3, 1e-12).basepoint() == 0);
  CHECK_THROWS_AS(metric_ball(c, 0, 0.0), DomainError);
  CHECK_THROWS_AS(metric_ball(c, 0, -1.0), DomainError);
}

TEST_CASE("balls nest with radius") {
  const auto c = sample_circle(kTwoPi, 64);
  for (double r1 : {0.3, 0.9, 1.8}) {
    const auto small = metric_ball(c, 5, r1);
    const auto big = metric_ball(c, 5, r1 + 0.7);
    CHECK(small.size() <= big.size());
    // every small-ball point appears in the big ball at the same distance
    for (int i = 0; i < small.size(); ++i)
      CHECK(small(small.basepoint(), i) <= r1);
  }
}

TEST_CASE("rebase keeps the matrix and round-trips") {
  const auto c = sample_circle(kTwoPi, 12);
  const auto moved = rebase(c, 7);
  CHECK(moved.basepoint() == 7);
  CHECK(moved.matrix() == c.matrix());
  CHECK(rebase(moved, 0) == c);
  CHECK(rebase(c, c.basepoint()) == c);
  CHECK_THROWS_AS(rebase(c, 12), DomainError);
}

TEST_CASE("validate rejects broken matrices") {
  std::vector<double> ok{0, 1, 1, 0};
  CHECK_NOTHROW(FiniteMetricSpace(2, ok, 0).validate());

  std::vector<double> asym{0, 1, 2, 0};
  CHECK_THROWS_AS(FiniteMetricSpace(2, asym, 0).validate(), DomainError);

  std::vector<double> diag{0.5, 1, 1, 0};
  CHECK_THROWS_AS(FiniteMetricSpace(2, diag, 0).validate(), DomainError);

  // d(0,2) = 3 > 1 + 1
  std::vector<double> tri{0, 1, 3, 1, 0, 1, 3, 1, 0};
  CHECK_THROWS_AS(FiniteMetricSpace(3, tri, 0).validate(), DomainError);
  CHECK(FiniteMetricSpace(3, tri, 0).max_triangle_defect() == doctest::Approx(1.0));
  CHECK_NOTHROW(FiniteMetricSpace(3, tri, 0, 1.0).validate());

  CHECK_THROWS_AS(FiniteMetricSpace(2, {0, -1, -1, 0}, 0), DomainError);
  CHECK_THROWS_AS(FiniteMetricSpace(2, ok, 5), DomainError);
  CHECK_THROWS_AS(FiniteMetricSpace(0, {}, 0), DomainError);
}

TEST_CASE("matrix file round-trips bitwise") {
  const auto c = sample_circle(2.0 * std::acos(-1.0) * 1.0000001, 17);
  std::stringstream ss;
  write_distance_matrix(ss, c);
  const auto back = read_distance_matrix(ss);
  CHECK(back.size() == c.size());
  CHECK(back.basepoint() == c.basepoint());
  CHECK(back.matrix() == c.matrix());

  std::stringstream bad("m 3 base 0\n");
  CHECK_THROWS_AS(read_distance_matrix(bad), DomainError);
}

TEST_CASE("radius and windowed eccentricity") {
  const auto c = sample_circle(kTwoPi, 8);
  CHECK(c.radius() == doctest::Approx(kTwoPi / 2));
  CHECK(c.eccentricity_below(1.0) < 1.0);
  CHECK(c.eccentricity_below(1e9) == c.radius());
}

TEST_SUITE_END();
