#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ghflow/gh.hpp"
#include "ghflow/grid_sample.hpp"
#include "ghflow/metric_space.hpp"

namespace ghflow {

// Partial self-map of a cover sample acting as a discrete local isometry:
// injective where defined, edge-length preserving within `tolerance`, and
// mapping the half-radius ball into the full-radius ball of its chart.
struct LocalIsometry {
  std::vector<int> image;  // cover vertex -> cover vertex, -1 where undefined
  double tolerance = 0.0;
  bool continuous = true;  // Lie-germ metadata; recorded, never verified

  int apply(int v) const {
    const int w = image[static_cast<std::size_t>(v)];
    return w;
  }
};

struct Pseudogroup {
  std::vector<LocalIsometry> generators;

  double tolerance() const;
};

// Spec-file format: {"generators": [{"image": [...], "tolerance": t,
// "continuous": bool}, ...]} with -1 marking undefined vertices.
nlohmann::ordered_json pseudogroup_to_json(const Pseudogroup& group);
Pseudogroup pseudogroup_from_json(const nlohmann::json& j);
void save_pseudogroup(const std::string& path, const Pseudogroup& group);
Pseudogroup load_pseudogroup(const std::string& path);

// Chart domain: a cover sample with a center vertex and a declared action
// radius r. Dense in-chart distances are precomputed at construction.
// `projection` (optional) sends cover vertices to base-space vertices.
class CoverChart {
 public:
  CoverChart(RiemannianSample cover, int center, double domain_radius,
             std::vector<int> projection = {}, int jobs = 0);

  const RiemannianSample& cover() const { return cover_; }
  const FiniteMetricSpace& distances() const { return distances_; }
  int center() const { return center_; }
  double domain_radius() const { return domain_radius_; }
  const std::vector<int>& projection() const { return projection_; }

  // Verifies that projected edges have matching lengths within tol.
  void validate_projection(const RiemannianSample& base, double tol) const;

 private:
  RiemannianSample cover_;
  int center_;
  double domain_radius_;
  std::vector<int> projection_;
  FiniteMetricSpace distances_;
};

// Translation along a grid axis by a number of steps; undefined where the
// shifted vertex leaves the sample.
LocalIsometry shift_generator(const RiemannianSample& cover, int axis, int steps,
                              double tolerance);

// Partial-map composition a(b(x)) and inversion.
LocalIsometry compose(const LocalIsometry& a, const LocalIsometry& b);
LocalIsometry invert(const LocalIsometry& gamma);

struct EquivalenceWitness {
  std::string what;
  int generator = -1;
  int vertex_a = -1;
  int vertex_b = -1;
  double measured = 0.0;
};

struct EquivalenceCheck {
  bool ok = true;
  std::optional<EquivalenceWitness> witness;
};

// Reflexivity/symmetry/transitivity of x ~ gamma x on the region ball:
// generators must be injective, edge-isometric within tol, ball-respecting,
// invertible on the region, and length-2 words must stay isometric within
// 2 tol. Returns the first counterexample on failure.
EquivalenceCheck check_equivalence_relation(const CoverChart& chart,
                                            const Pseudogroup& group,
                                            double region_radius, double tol);

struct QuotientSpace {
  FiniteMetricSpace space;
  std::vector<int> class_of;        // cover vertex -> class, -1 outside region
  std::vector<int> representative;  // class -> smallest cover vertex
};

// Quotient of the r/4 region by the orbit closure of the generators (word
// length capped at 8 inside domains); class distance is the minimum of cover
// distances over sampled orbit representatives. Refuses when the equivalence
// check fails, quoting the witness.
QuotientSpace quotient_distance(const CoverChart& chart, const Pseudogroup& group);

// Cover vertices whose projection lands in the closed base ball.
std::vector<int> chart_preimage_ball(const CoverChart& chart,
                                     const FiniteMetricSpace& base_distances,
                                     double radius);

struct QuotientIsometryReport {
  GhEstimate estimate;
  double bound = 0.0;
  double margin = 0.0;
  bool pass = false;
};

// GH upper bound between a quotient and a reference space, seeded with greedy
// matching plus any caller-provided class matchings; asserts it under the
// caller's slack bound.
QuotientIsometryReport verify_quotient_isometry(
    const QuotientSpace& quotient, const SpaceRef& reference, int budget,
    std::uint64_t seed, double bound,
    const std::vector<std::vector<int>>& seed_maps_fwd = {},
    const std::vector<std::vector<int>>& seed_maps_bwd = {});

}  // namespace ghflow
