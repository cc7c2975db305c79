#include "ghflow/pseudogroup.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>

namespace ghflow {

namespace {
constexpr int kWordCap = 8;  // orbit words longer than this exit the domain
}

double Pseudogroup::tolerance() const {
  double t = 0.0;
  for (const auto& g : generators) t = std::max(t, g.tolerance);
  return t;
}

nlohmann::ordered_json pseudogroup_to_json(const Pseudogroup& group) {
  nlohmann::ordered_json j;
  auto gens = nlohmann::ordered_json::array();
  for (const auto& g : group.generators) {
    nlohmann::ordered_json gj;
    gj["image"] = g.image;
    gj["tolerance"] = g.tolerance;
    gj["continuous"] = g.continuous;
    gens.push_back(std::move(gj));
  }
  j["generators"] = gens;
  return j;
}

Pseudogroup pseudogroup_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("generators") || !j["generators"].is_array())
    throw DomainError("pseudogroup spec needs a generators array");
  Pseudogroup group;
  for (const auto& gj : j["generators"]) {
    LocalIsometry g;
    if (!gj.contains("image") || !gj["image"].is_array())
      throw DomainError("generator needs an image array");
    for (const auto& v : gj["image"]) {
      if (!v.is_number_integer()) throw DomainError("generator image must hold integers");
      g.image.push_back(v.get<int>());
    }
    g.tolerance = gj.value("tolerance", 0.0);
    if (!(g.tolerance >= 0.0)) throw DomainError("generator tolerance must be nonnegative");
    g.continuous = gj.value("continuous", true);
    group.generators.push_back(std::move(g));
  }
  return group;
}

void save_pseudogroup(const std::string& path, const Pseudogroup& group) {
  std::ofstream f(path);
  if (!f) throw DomainError("cannot open " + path + " for writing");
  f << pseudogroup_to_json(group).dump(2) << "\n";
}

Pseudogroup load_pseudogroup(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("pseudogroup spec is not valid JSON: ") + e.what());
  }
  return pseudogroup_from_json(j);
}

CoverChart::CoverChart(RiemannianSample cover, int center, double domain_radius,
                       std::vector<int> projection, int jobs)
    : cover_(std::move(cover)),
      center_(center),
      domain_radius_(domain_radius),
      projection_(std::move(projection)),
      distances_(geodesic_distances(cover_, center, jobs)) {
  if (!(domain_radius_ > 0.0)) throw DomainError("chart radius must be positive");
  if (!projection_.empty() &&
      static_cast<int>(projection_.size()) != cover_.vertex_count())
    throw UsageError("projection size must match the cover sample");
}

void CoverChart::validate_projection(const RiemannianSample& base, double tol) const {
  if (projection_.empty()) throw UsageError("chart has no projection");
  for (int v = 0; v < cover_.vertex_count(); ++v) {
    const int pv = projection_[static_cast<std::size_t>(v)];
    if (pv < 0 || pv >= base.vertex_count()) throw UsageError("projection index mismatch");
    for (const auto* e = cover_.begin(v); e != cover_.end(v); ++e) {
      if (e->to < v) continue;
      const int pw = projection_[static_cast<std::size_t>(e->to)];
      bool found = false;
      for (const auto* be = base.begin(pv); be != base.end(pv); ++be)
        if (be->to == pw && std::abs(be->length - e->length) <= tol) {
          found = true;
          break;
        }
      if (!found && pv != pw)
        throw DomainError("projected edge has no matching base edge");
    }
  }
}

LocalIsometry shift_generator(const RiemannianSample& cover, int axis, int steps,
                              double tolerance) {
  const auto& shape = cover.shape();
  if (axis < 0 || axis >= static_cast<int>(shape.size()))
    throw DomainError("shift axis out of range");
  LocalIsometry g;
  g.tolerance = tolerance;
  g.image.assign(static_cast<std::size_t>(cover.vertex_count()), -1);
  // Row-major index arithmetic over the sample's shape.
  std::vector<int> strides(shape.size(), 1);
  for (int a = static_cast<int>(shape.size()) - 2; a >= 0; --a)
    strides[static_cast<std::size_t>(a)] =
        strides[static_cast<std::size_t>(a + 1)] * shape[static_cast<std::size_t>(a + 1)];
  const bool wrap = cover.periodic()[static_cast<std::size_t>(axis)];
  for (int v = 0; v < cover.vertex_count(); ++v) {
    int rest = v;
    std::vector<int> idx(shape.size());
    for (std::size_t a = 0; a < shape.size(); ++a) {
      idx[a] = rest / strides[a];
      rest %= strides[a];
    }
    int moved = idx[static_cast<std::size_t>(axis)] + steps;
    if (wrap) {
      moved %= shape[static_cast<std::size_t>(axis)];
      if (moved < 0) moved += shape[static_cast<std::size_t>(axis)];
    } else if (moved < 0 || moved >= shape[static_cast<std::size_t>(axis)]) {
      continue;
    }
    idx[static_cast<std::size_t>(axis)] = moved;
    int w = 0;
    for (std::size_t a = 0; a < shape.size(); ++a) w += idx[a] * strides[a];
    g.image[static_cast<std::size_t>(v)] = w;
  }
  return g;
}

LocalIsometry compose(const LocalIsometry& a, const LocalIsometry& b) {
  if (a.image.size() != b.image.size())
    throw UsageError("composing isometries of different covers");
  LocalIsometry out;
  out.tolerance = a.tolerance + b.tolerance;
  out.continuous = a.continuous && b.continuous;
  out.image.assign(a.image.size(), -1);
  for (std::size_t v = 0; v < b.image.size(); ++v) {
    const int mid = b.image[v];
    if (mid >= 0) out.image[v] = a.image[static_cast<std::size_t>(mid)];
  }
  return out;
}

LocalIsometry invert(const LocalIsometry& gamma) {
  LocalIsometry out;
  out.tolerance = gamma.tolerance;
  out.continuous = gamma.continuous;
  out.image.assign(gamma.image.size(), -1);
  for (std::size_t v = 0; v < gamma.image.size(); ++v) {
    const int w = gamma.image[v];
    if (w < 0) continue;
    if (out.image[static_cast<std::size_t>(w)] != -1)
      throw DomainError("cannot invert a non-injective vertex map");
    out.image[static_cast<std::size_t>(w)] = static_cast<int>(v);
  }
  return out;
}

namespace {

// Isometry condition for a partial map: cover-distance preservation on edges
// of the sample, checked against the chart's dense distances.
std::optional<EquivalenceWitness> isometry_defect(const CoverChart& chart,
                                                  const LocalIsometry& g, int index,
                                                  double tol) {
  const auto& d = chart.distances();
  const auto& cover = chart.cover();
  std::vector<char> hit(static_cast<std::size_t>(cover.vertex_count()), 0);
  const double half = chart.domain_radius() / 2.0;
  for (int v = 0; v < cover.vertex_count(); ++v) {
    const int w = g.image[static_cast<std::size_t>(v)];
    if (w < 0) continue;
    if (hit[static_cast<std::size_t>(w)])
      return EquivalenceWitness{"generator not injective", index, v, w, 0.0};
    hit[static_cast<std::size_t>(w)] = 1;
    if (d(chart.center(), v) < half && !(d(chart.center(), w) < chart.domain_radius()))
      return EquivalenceWitness{"image leaves the chart ball", index, v, w,
                                d(chart.center(), w)};
    for (const auto* e = cover.begin(v); e != cover.end(v); ++e) {
      if (e->to < v) continue;
      const int w2 = g.image[static_cast<std::size_t>(e->to)];
      if (w2 < 0) continue;
      // Compare geodesic lengths rather than raw edge weights; an edge that
      // is not itself a shortest path would otherwise flag exact isometries.
      const double defect = std::abs(d(w, w2) - d(v, e->to));
      if (defect > tol)
        return EquivalenceWitness{"edge length distorted", index, v, e->to, defect};
    }
  }
  return std::nullopt;
}

std::vector<int> region_vertices(const CoverChart& chart, double radius) {
  std::vector<int> r;
  for (int v = 0; v < chart.cover().vertex_count(); ++v)
    if (chart.distances()(chart.center(), v) < radius) r.push_back(v);
  return r;
}

// Orbit of a set of seed vertices under generators and inverses, words
// capped at kWordCap.
std::vector<int> orbit_of(const std::vector<LocalIsometry>& action,
                          const std::vector<int>& seeds, int vertex_count) {
  std::vector<int> depth(static_cast<std::size_t>(vertex_count), -1);
  std::queue<int> queue;
  for (int s : seeds) {
    if (depth[static_cast<std::size_t>(s)] == -1) {
      depth[static_cast<std::size_t>(s)] = 0;
      queue.push(s);
    }
  }
  std::vector<int> out;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop();
    out.push_back(v);
    if (depth[static_cast<std::size_t>(v)] >= kWordCap) continue;
    for (const auto& g : action) {
      const int w = g.image[static_cast<std::size_t>(v)];
      if (w >= 0 && depth[static_cast<std::size_t>(w)] == -1) {
        depth[static_cast<std::size_t>(w)] = depth[static_cast<std::size_t>(v)] + 1;
        queue.push(w);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<LocalIsometry> with_inverses(const Pseudogroup& group) {
  std::vector<LocalIsometry> action = group.generators;
  for (const auto& g : group.generators) action.push_back(invert(g));
  return action;
}

}  // namespace

EquivalenceCheck check_equivalence_relation(const CoverChart& chart,
                                            const Pseudogroup& group,
                                            double region_radius, double tol) {
  EquivalenceCheck result;
  const auto region = region_vertices(chart, region_radius);
  // Reflexivity is the implicit identity element; nothing to verify.
  for (std::size_t gi = 0; gi < group.generators.size(); ++gi) {
    const auto& g = group.generators[gi];
    if (g.image.size() != static_cast<std::size_t>(chart.cover().vertex_count())) {
      result.ok = false;
      result.witness = EquivalenceWitness{"generator size mismatch", static_cast<int>(gi)};
      return result;
    }
    if (auto w = isometry_defect(chart, g, static_cast<int>(gi), tol)) {
      result.ok = false;
      result.witness = w;
      return result;
    }
    // Symmetry: the inverse must be defined wherever the generator lands in
    // the region (guaranteed by injectivity, which isometry_defect verified).
  }
  // Transitivity at sample scale: length-2 words stay isometric within 2 tol.
  const auto action = with_inverses(group);
  for (std::size_t i = 0; i < action.size(); ++i)
    for (std::size_t j = 0; j < action.size(); ++j) {
      const LocalIsometry prod = compose(action[i], action[j]);
      if (auto w = isometry_defect(chart, prod, static_cast<int>(i * action.size() + j),
                                   2.0 * tol)) {
        w->what = "length-2 word breaks closure: " + w->what;
        result.ok = false;
        result.witness = w;
        return result;
      }
    }
  // Associativity on triple-defined products holds for vertex-map
  // composition by construction; spot-check one representative triple.
  if (!action.empty() && !region.empty()) {
    const auto& g = action.front();
    const LocalIsometry left = compose(compose(g, g), g);
    const LocalIsometry right = compose(g, compose(g, g));
    for (int v : region)
      if (left.image[static_cast<std::size_t>(v)] != right.image[static_cast<std::size_t>(v)]) {
        result.ok = false;
        result.witness = EquivalenceWitness{"associativity defect", 0, v,
                                            left.image[static_cast<std::size_t>(v)], 0.0};
        return result;
      }
  }
  return result;
}

QuotientSpace quotient_distance(const CoverChart& chart, const Pseudogroup& group) {
  const double quarter = chart.domain_radius() / 4.0;
  const double tol = std::max(group.tolerance(), 0.0);
  const auto check = check_equivalence_relation(chart, group, quarter, tol);
  if (!check.ok) {
    std::string what = "equivalence relation fails";
    if (check.witness)
      what += ": " + check.witness->what + " (generator " +
              std::to_string(check.witness->generator) + ", vertices " +
              std::to_string(check.witness->vertex_a) + "," +
              std::to_string(check.witness->vertex_b) + ")";
    throw DomainError(what);
  }

  const int n = chart.cover().vertex_count();
  const auto region = region_vertices(chart, quarter);
  const auto action = with_inverses(group);

  std::vector<int> class_of(static_cast<std::size_t>(n), -1);
  std::vector<int> representative;
  std::vector<std::vector<int>> orbits;
  for (int v : region) {
    if (class_of[static_cast<std::size_t>(v)] != -1) continue;
    const int cls = static_cast<int>(orbits.size());
    auto orbit = orbit_of(action, {v}, n);
    // Grow the orbit from every region member so the sampled orbit does not
    // depend on which representative seeded it.
    std::vector<int> members;
    for (int w : orbit)
      if (chart.distances()(chart.center(), w) < quarter) members.push_back(w);
    orbit = orbit_of(action, members, n);
    // Label every sampled orbit member; out-of-region vertices keep their
    // first label if word capping ever reaches them twice.
    for (int w : orbit)
      if (class_of[static_cast<std::size_t>(w)] == -1)
        class_of[static_cast<std::size_t>(w)] = cls;
    orbits.push_back(std::move(orbit));
    representative.push_back(v);
  }

  const int m = static_cast<int>(orbits.size());
  if (m > FiniteMetricSpace::kMaxPoints) throw DomainError("quotient exceeds the point cap");
  std::vector<double> dist(static_cast<std::size_t>(m) * m, 0.0);
  const auto& d = chart.distances();
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      double best = std::numeric_limits<double>::infinity();
      for (int x : orbits[static_cast<std::size_t>(a)])
        for (int y : orbits[static_cast<std::size_t>(b)]) best = std::min(best, d(x, y));
      dist[static_cast<std::size_t>(a) * m + b] = dist[static_cast<std::size_t>(b) * m + a] = best;
    }
  const int base_class = class_of[static_cast<std::size_t>(chart.center())];
  if (base_class < 0) throw DomainError("chart center left the quotient region");
  return QuotientSpace{FiniteMetricSpace(m, std::move(dist), base_class, 2.0 * tol),
                       std::move(class_of), std::move(representative)};
}

std::vector<int> chart_preimage_ball(const CoverChart& chart,
                                     const FiniteMetricSpace& base_distances,
                                     double radius) {
  if (chart.projection().empty()) throw UsageError("chart has no projection");
  if (!(radius >= 0.0)) throw DomainError("radius must be nonnegative");
  std::vector<int> out;
  const int base = base_distances.basepoint();
  for (int v = 0; v < chart.cover().vertex_count(); ++v) {
    const int pv = chart.projection()[static_cast<std::size_t>(v)];
    if (pv < 0 || pv >= base_distances.size()) throw UsageError("projection index mismatch");
    if (base_distances(base, pv) <= radius) out.push_back(v);
  }
  return out;
}

QuotientIsometryReport verify_quotient_isometry(
    const QuotientSpace& quotient, const SpaceRef& reference, int budget,
    std::uint64_t seed, double bound, const std::vector<std::vector<int>>& seed_maps_fwd,
    const std::vector<std::vector<int>>& seed_maps_bwd) {
  QuotientIsometryReport rep;
  rep.bound = bound;
  const auto q = make_space(quotient.space);
  rep.estimate =
      gh_upper_bound(q, reference, budget, seed, default_eps_grid(), seed_maps_fwd,
                     seed_maps_bwd);
  rep.margin = bound - rep.estimate.upper;
  rep.pass = rep.estimate.upper <= bound;
  return rep;
}

}  // namespace ghflow
