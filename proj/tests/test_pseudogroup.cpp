#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "ghflow/nil_flow.hpp"
#include "ghflow/pseudogroup.hpp"

using namespace ghflow;

namespace {
const double kPi = std::acos(-1.0);
const double kTwoPi = 2.0 * kPi;

// Line segment [-3pi, 3pi] sampled at step 2pi/360, with the 2pi-translation.
struct LineCover {
  CoverChart chart;
  Pseudogroup group;
  int zero_index;

  static LineCover make() {
    const int per_period = 360;
    const double h = kTwoPi / per_period;
    const int edges = 3 * per_period;  // 1081 vertices
    std::vector<double> lengths(static_cast<std::size_t>(edges), h);
    std::vector<double> pos(static_cast<std::size_t>(edges + 1));
    for (int k = 0; k <= edges; ++k)
      pos[static_cast<std::size_t>(k)] = -3.0 * kPi + h * k;
    auto cover = RiemannianSample::segment(lengths, pos);
    const int zero = edges / 2;
    const double tol = 2.0 * h;
    LocalIsometry shift = shift_generator(cover, 0, per_period, tol);
    CoverChart chart(std::move(cover), zero, 4.4 * kPi);
    return LineCover{std::move(chart), Pseudogroup{{shift}}, zero};
  }
};
}  // namespace

TEST_SUITE_BEGIN("pseudogroup");

TEST_CASE("trivial group leaves the chart unchanged") {
  std::vector<double> edges(24, 0.3);
  auto cover = RiemannianSample::ring(edges);
  CoverChart chart(std::move(cover), 0, 40.0);
  const auto q = quotient_distance(chart, Pseudogroup{});
  CHECK(q.space.size() == 24);
  CHECK(q.space.basepoint() == 0);
  for (int i = 0; i < 24; ++i)
    for (int j = 0; j < 24; ++j)
      CHECK(q.space(i, j) == chart.distances()(q.representative[static_cast<std::size_t>(i)],
                                               q.representative[static_cast<std::size_t>(j)]));
  // and GH-wise the quotient is the chart itself, at the grid floor
  const auto rep = verify_quotient_isometry(q, make_space(chart.distances()), 300, 7,
                                            default_eps_grid().front());
  CHECK(rep.pass);
  CHECK(rep.estimate.upper == default_eps_grid().front());
}

TEST_CASE("line modulo 2pi translations is a circle") {
  auto line = LineCover::make();
  const auto check = check_equivalence_relation(line.chart, line.group,
                                                line.chart.domain_radius() / 4.0,
                                                line.group.tolerance());
  CHECK(check.ok);

  const auto q = quotient_distance(line.chart, line.group);
  CHECK(q.space.size() == 360);
  q.space.validate();

  // class of 3pi/2 carries representative -pi/2; distance to the basepoint
  // class is exactly a quarter turn
  const int idx_3pi2 = line.zero_index + 270;
  const int cls = q.class_of[static_cast<std::size_t>(idx_3pi2)];
  REQUIRE(cls >= 0);
  CHECK(q.space(q.space.basepoint(), cls) == doctest::Approx(kPi / 2).epsilon(1e-12));

  // quotient distance never exceeds the cover distance of representatives
  for (int a = 0; a < 40; ++a)
    for (int b = 0; b < 40; ++b) {
      const int va = q.representative[static_cast<std::size_t>(a)];
      const int vb = q.representative[static_cast<std::size_t>(b)];
      CHECK(q.space(a, b) <= line.chart.distances()(va, vb) + 1e-12);
    }

  // the whole matrix is the circle metric, computed from positions
  for (int a = 0; a < q.space.size(); ++a) {
    const double pa =
        line.chart.cover().coord(q.representative[static_cast<std::size_t>(a)])[0];
    for (int b = 0; b < q.space.size(); ++b) {
      const double pb =
          line.chart.cover().coord(q.representative[static_cast<std::size_t>(b)])[0];
      double arc = std::fmod(std::abs(pa - pb), kTwoPi);
      arc = std::min(arc, kTwoPi - arc);
      CHECK(q.space(a, b) == doctest::Approx(arc).epsilon(1e-9));
    }
  }
}

TEST_CASE("line quotient matches the circle sample in GH") {
  auto line = LineCover::make();
  const auto q = quotient_distance(line.chart, line.group);
  const auto circle = make_space(sample_circle(kTwoPi, 360));
  const double h = kTwoPi / 360;

  // explicit matching: class representative position -> nearest circle index
  std::vector<int> seed(static_cast<std::size_t>(q.space.size()));
  for (int c = 0; c < q.space.size(); ++c) {
    const double pos =
        line.chart.cover().coord(q.representative[static_cast<std::size_t>(c)])[0];
    double wrapped = std::fmod(pos, kTwoPi);
    if (wrapped < 0) wrapped += kTwoPi;
    seed[static_cast<std::size_t>(c)] = static_cast<int>(std::lround(wrapped / h)) % 360;
  }
  std::vector<int> seed_back(360, 0);
  for (int c = 0; c < q.space.size(); ++c)
    seed_back[static_cast<std::size_t>(seed[static_cast<std::size_t>(c)])] = c;

  const double grid_step = default_eps_grid()[1] - default_eps_grid()[0];
  const auto rep = verify_quotient_isometry(q, circle, 400, 9, 2.0 * h + grid_step,
                                            {seed}, {seed_back});
  CHECK(rep.pass);
  CHECK(rep.estimate.upper == default_eps_grid().front());
  CHECK(rep.estimate.witnesses_ok());
}

TEST_CASE("corrupted generator is reported with a witness") {
  auto line = LineCover::make();
  auto broken = line.group;
  // remap one interior vertex far away
  broken.generators[0].image[static_cast<std::size_t>(line.zero_index + 5)] =
      line.zero_index + 200;
  const auto check = check_equivalence_relation(line.chart, broken,
                                                line.chart.domain_radius() / 4.0,
                                                broken.tolerance());
  CHECK_FALSE(check.ok);
  REQUIRE(check.witness.has_value());
  CHECK(check.witness->measured > broken.tolerance());
  CHECK_THROWS_AS(quotient_distance(line.chart, broken), DomainError);
}

TEST_CASE("preimage of closed base balls") {
  // cover = three unrolled periods of a 12-point circle
  const int n = 12;
  const double h = kTwoPi / n;
  std::vector<double> lengths(static_cast<std::size_t>(3 * n), h);
  auto cover = RiemannianSample::segment(lengths);
  std::vector<int> projection(static_cast<std::size_t>(3 * n + 1));
  for (int v = 0; v <= 3 * n; ++v) projection[static_cast<std::size_t>(v)] = v % n;
  CoverChart chart(std::move(cover), 18, 4.0 * kPi, projection);
  const auto base = sample_circle(kTwoPi, n);

  const auto all = chart_preimage_ball(chart, base, 10.0);
  CHECK(static_cast<int>(all.size()) == 3 * n + 1);

  const auto fiber = chart_preimage_ball(chart, base, 0.0);
  CHECK(fiber == std::vector<int>{0, 12, 24, 36});

  const auto small = chart_preimage_ball(chart, base, 1.0);
  const auto bigger = chart_preimage_ball(chart, base, 2.0);
  CHECK(small.size() <= bigger.size());
  for (int v : small) CHECK(std::count(bigger.begin(), bigger.end(), v) == 1);

  CHECK_THROWS_AS(chart_preimage_ball(chart, base, -1.0), DomainError);
}

TEST_CASE("quotient matrices are invariant under generator relabeling") {
  std::vector<double> edges(12, 0.4);
  auto ring = RiemannianSample::ring(edges);
  const double tol = 0.8;
  const LocalIsometry rot = shift_generator(ring, 0, 3, tol);
  auto ring2 = ring;
  CoverChart chart_a(std::move(ring), 0, 30.0);
  CoverChart chart_b(std::move(ring2), rot.image[0], 30.0);
  const auto qa = quotient_distance(chart_a, Pseudogroup{{rot}});
  const auto qb = quotient_distance(chart_b, Pseudogroup{{rot}});
  CHECK(qa.space.size() == qb.space.size());
  CHECK(qa.space.matrix() == qb.space.matrix());
  CHECK(qa.space.basepoint() == qb.space.basepoint());
}

TEST_CASE("lattice translations stay isometries along the flow") {
  // z-translation with period (2i+c1)^{-1/2}, acting on boxes
  // sampled from the metric at two different flow times.
  const double c1 = 1.0, i = 10.0;
  const double period = std::pow(2.0 * i + c1, -0.5);
  const auto check_at = [&](double tau) {
    const NilMetric m = nil_similarity_form(nil_sqrt_form(c1, 1.0, 1.0, 0.0), tau);
    auto box = RiemannianSample::box3(
        {0, 0, 0}, {0.5, 0.5, 2.0 * period}, 7, 7, 9,
        [&m](double x, double, double) -> std::array<double, 3> {
          return {m.c, m.b + m.a * x * x, m.a};
        });
    const double tol = 2.0 * box.max_edge_length();
    const LocalIsometry shift = shift_generator(box, 2, 4, tol);
    CoverChart chart(std::move(box), 0, 1e3);
    return std::make_pair(
        check_equivalence_relation(chart, Pseudogroup{{shift}}, 10.0, tol).ok,
        shift.image);
  };
  const auto [ok0, image0] = check_at(0.0);
  const auto [ok1, image1] = check_at(0.3);
  CHECK(ok0);
  CHECK(ok1);
  CHECK(image0 == image1);  // vertex maps do not depend on t

  // quotienting by the full period collapses each z-fiber to classes no
  // farther apart than half the period
  const NilMetric m = nil_sqrt_form(c1, 1.0, 1.0, 0.0);
  auto box = RiemannianSample::box3(
      {0, 0, 0}, {0.5, 0.5, 2.0 * period}, 7, 7, 9,
      [&m](double x, double, double) -> std::array<double, 3> {
        return {m.c, m.b + m.a * x * x, m.a};
      });
  const double tol = 2.0 * box.max_edge_length();
  const LocalIsometry shift = shift_generator(box, 2, 4, tol);
  const int center = box.index3(3, 3, 4);
  const auto probe = single_source_distances(box, center);
  const double reach = *std::max_element(probe.begin(), probe.end());
  CoverChart chart(std::move(box), center, 4.0 * (reach + 1.0));
  const auto q = quotient_distance(chart, Pseudogroup{{shift}});
  double fiber_diam = 0.0;
  for (int ka = 0; ka < 9; ++ka)
    for (int kb = 0; kb < 9; ++kb) {
      const int ca = q.class_of[static_cast<std::size_t>(chart.cover().index3(3, 3, ka))];
      const int cb = q.class_of[static_cast<std::size_t>(chart.cover().index3(3, 3, kb))];
      fiber_diam = std::max(fiber_diam, q.space(ca, cb));
    }
  CHECK(fiber_diam <= 0.5 * period * std::sqrt(m.a) * (1.0 + 1e-9));
  CHECK(fiber_diam > 0.0);
}

TEST_CASE("unrolled warped cover collapses onto the circle") {
  // R acting on the fiber factor of the universal cover at lambda = 1/8.
  const double lambda = 0.125;
  const int nr = 49, ns = 17;
  std::vector<double> a(static_cast<std::size_t>(nr), 1.0);
  std::vector<double> b(static_cast<std::size_t>(nr));
  for (int k = 0; k < nr; ++k) {
    const double r = -kPi + kTwoPi * k / (nr - 1);
    const double lf = lambda * (2.0 + std::cos(r));
    b[static_cast<std::size_t>(k)] = lf * lf;
  }
  auto cover = RiemannianSample::plane_grid(a, b, -kPi, kPi, nr, -kPi, kPi, ns);
  const double slack = cover.grid_slack(kPi);
  const double tol = 2.0 * cover.max_edge_length();
  const LocalIsometry fiber_shift = shift_generator(cover, 1, 1, tol);
  const int center = cover.index2(nr / 2, ns / 2);
  const auto probe = single_source_distances(cover, center);
  const double reach = *std::max_element(probe.begin(), probe.end());
  CoverChart chart(std::move(cover), center, 4.0 * (reach + 1.0));
  const auto q = quotient_distance(chart, Pseudogroup{{fiber_shift}});
  CHECK(q.space.size() == nr);

  const auto circle = make_space(sample_circle(kTwoPi, nr));
  // wrap the r-interval onto the circle: representative r -> nearest sample
  std::vector<int> seed(static_cast<std::size_t>(nr));
  for (int c = 0; c < nr; ++c) {
    const double r = chart.cover().coord(q.representative[static_cast<std::size_t>(c)])[0];
    double wrapped = std::fmod(r + kTwoPi, kTwoPi);
    seed[static_cast<std::size_t>(c)] =
        static_cast<int>(std::lround(wrapped / (kTwoPi / nr))) % nr;
  }
  std::vector<int> seed_back(static_cast<std::size_t>(nr), 0);
  for (int c = 0; c < nr; ++c)
    seed_back[static_cast<std::size_t>(seed[static_cast<std::size_t>(c)])] = c;
  const auto rep = verify_quotient_isometry(q, circle, 600, 3,
                                            kPi * 3.0 * lambda + slack, {seed}, {seed_back});
  CHECK(rep.pass);
  CHECK(rep.estimate.upper <= kPi * 3.0 * lambda + slack);
}

TEST_CASE("quotient pseudometric invariants") {
  auto line = LineCover::make();
  const auto q = quotient_distance(line.chart, line.group);
  CHECK(q.space.tol_tri() == 2.0 * line.group.tolerance());
  CHECK(q.space.max_triangle_defect() <= q.space.tol_tri());
  // resampling representatives: distances recomputed from any member agree
  for (int c = 0; c < 10; ++c) {
    const int rep_v = q.representative[static_cast<std::size_t>(c)];
    for (int v = 0; v < line.chart.cover().vertex_count(); ++v) {
      if (q.class_of[static_cast<std::size_t>(v)] != c || v == rep_v) continue;
      for (int d = 0; d < q.space.size(); d += 37)
        CHECK(q.space(c, d) ==
              q.space(q.class_of[static_cast<std::size_t>(v)], d));
    }
  }
}

TEST_CASE("plane modulo a unit lattice reproduces flat torus distances") {
  // three periods per axis, quotient by both unit translations
  const int per = 8;
  const int n = 3 * per + 1;  // 25 vertices per axis
  std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
  auto plane = RiemannianSample::plane_grid(ones, ones, 0.0, 3.0, n, 0.0, 3.0, n);
  const double tol = 2.0 * plane.max_edge_length();
  const LocalIsometry shift_x = shift_generator(plane, 0, per, tol);
  const LocalIsometry shift_y = shift_generator(plane, 1, per, tol);
  const int center = plane.index2(n / 2, n / 2);
  CoverChart chart(std::move(plane), center, 4.8);
  const auto q = quotient_distance(chart, Pseudogroup{{shift_x, shift_y}});
  REQUIRE(q.space.size() == per * per);

  // the same grid metric on the closed-up torus, as an independent oracle
  const auto torus = RiemannianSample::flat_torus(1.0, 1.0, per, per);
  const auto reference = geodesic_distances(torus, 0);
  auto torus_vertex = [&](int cls) {
    const auto& c = chart.cover().coord(q.representative[static_cast<std::size_t>(cls)]);
    const int ix = static_cast<int>(std::lround(std::fmod(c[0], 1.0) * per)) % per;
    const int iy = static_cast<int>(std::lround(std::fmod(c[1], 1.0) * per)) % per;
    return torus.index2(ix, iy);
  };
  for (int a = 0; a < q.space.size(); ++a)
    for (int b = 0; b < q.space.size(); ++b)
      CHECK(q.space(a, b) ==
            doctest::Approx(reference(torus_vertex(a), torus_vertex(b))).epsilon(1e-12));
}

TEST_CASE("projection must send edges to matching base edges") {
  const int n = 12;
  const double h = kTwoPi / n;
  std::vector<double> lengths(static_cast<std::size_t>(3 * n), h);
  auto cover = RiemannianSample::segment(lengths);
  std::vector<int> projection(static_cast<std::size_t>(3 * n + 1));
  for (int v = 0; v <= 3 * n; ++v) projection[static_cast<std::size_t>(v)] = v % n;
  const auto base = RiemannianSample::ring(std::vector<double>(n, h));
  CoverChart chart(std::move(cover), 18, 4.0 * kPi, projection);
  CHECK_NOTHROW(chart.validate_projection(base, 1e-12));

  auto broken = projection;
  broken[5] = 9;  // no longer adjacent to the images of its neighbors
  std::vector<double> lengths2(static_cast<std::size_t>(3 * n), h);
  CoverChart bad(RiemannianSample::segment(lengths2), 18, 4.0 * kPi, broken);
  CHECK_THROWS_AS(bad.validate_projection(base, 1e-12), DomainError);
}

TEST_CASE("pseudogroup spec files round-trip") {
  std::vector<double> edges(12, 0.4);
  auto ring = RiemannianSample::ring(edges);
  const Pseudogroup group{{shift_generator(ring, 0, 3, 0.05)}};
  const auto j = pseudogroup_to_json(group);
  const auto back = pseudogroup_from_json(j);
  REQUIRE(back.generators.size() == 1);
  CHECK(back.generators[0].image == group.generators[0].image);
  CHECK(back.generators[0].tolerance == group.generators[0].tolerance);
  CHECK(back.generators[0].continuous == group.generators[0].continuous);

  const std::string path = "pseudogroup_roundtrip.json";
  save_pseudogroup(path, group);
  const auto loaded = load_pseudogroup(path);
  CHECK(pseudogroup_to_json(loaded).dump() == j.dump());
  std::remove(path.c_str());

  CHECK_THROWS_AS(pseudogroup_from_json(nlohmann::json::parse("{}")), DomainError);
  CHECK_THROWS_AS(
      pseudogroup_from_json(nlohmann::json::parse(
          R"({"generators": [{"image": [0], "tolerance": -1}]})")),
      DomainError);
}

TEST_CASE("composition and inversion of partial maps") {
  std::vector<double> edges(10, 1.0);
  auto seg = RiemannianSample::segment(edges);
  const LocalIsometry fwd = shift_generator(seg, 0, 3, 0.1);
  const LocalIsometry back = invert(fwd);
  for (int v = 0; v <= 10; ++v) {
    const int w = fwd.image[static_cast<std::size_t>(v)];
    if (w >= 0) CHECK(back.image[static_cast<std::size_t>(w)] == v);
  }
  const LocalIsometry two = compose(fwd, fwd);
  CHECK(two.image[0] == 6);
  CHECK(two.image[5] == -1);  // exits the segment
  const LocalIsometry id_on_domain = compose(back, fwd);
  for (int v = 0; v <= 10; ++v) {
    const int w = id_on_domain.image[static_cast<std::size_t>(v)];
    if (w >= 0) CHECK(w == v);
  }
  CHECK_THROWS_AS(invert(LocalIsometry{{0, 0, 0}, 0.1, true}), DomainError);
}

TEST_SUITE_END();
