#include "ghflow/gh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "ghflow/rng.hpp"

namespace ghflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw DomainError("eps grid must be nonempty");
  double prev = 0.0;
  for (double e : grid) {
    if (!(e > 0.0) || !std::isfinite(e)) throw DomainError("eps grid entries must be positive");
    if (e <= prev) throw DomainError("eps grid must be strictly ascending");
    prev = e;
  }
}

std::uint64_t fingerprint(const FiniteMetricSpace& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ULL;
  };
  mix(static_cast<std::uint64_t>(s.size()));
  mix(static_cast<std::uint64_t>(s.basepoint()));
  for (double d : s.matrix()) {
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof d);
    std::memcpy(&bits, &d, sizeof bits);
    mix(bits);
  }
  return h;
}

std::vector<int> window_indices(const FiniteMetricSpace& s, double radius) {
  std::vector<int> w;
  const int base = s.basepoint();
  for (int i = 0; i < s.size(); ++i)
    if (s(base, i) < radius) w.push_back(i);
  return w;
}

// One direction of the approximation predicate on a raw image array.
bool direction_feasible(const FiniteMetricSpace& S, const FiniteMetricSpace& T,
                        const std::vector<int>& im, double eps,
                        ApproxDetail* detail = nullptr) {
  const double window = 1.0 / eps;
  const std::vector<int> w = window_indices(S, window);
  bool ok = true;
  double worst_dist = 0.0;
  for (std::size_t a = 0; a < w.size() && (ok || detail); ++a) {
    for (std::size_t b = a + 1; b < w.size(); ++b) {
      const double ds = S(w[a], w[b]);
      const double dt = T(im[static_cast<std::size_t>(w[a])], im[static_cast<std::size_t>(w[b])]);
      const double dev = std::abs(ds - dt);
      if (detail) worst_dist = std::max(worst_dist, dev);
      if (dev >= eps) {
        ok = false;
        if (!detail) return false;
      }
    }
  }
  const double cover_radius = window - eps;
  bool vacuous = !(cover_radius > 0.0);
  double worst_gap = 0.0;
  if (!vacuous) {
    const int tbase = T.basepoint();
    for (int y = 0; y < T.size(); ++y) {
      if (!(T(tbase, y) < cover_radius)) continue;
      double best = kInf;
      for (int x : w) {
        best = std::min(best, T(y, im[static_cast<std::size_t>(x)]));
        if (best < eps && !detail) break;
      }
      if (detail) worst_gap = std::max(worst_gap, best);
      if (!(best < eps)) {
        ok = false;
        if (!detail) return false;
      }
    }
  }
  if (detail) {
    detail->ok = ok;
    detail->worst_distortion = worst_dist;
    detail->worst_coverage_gap = worst_gap;
    detail->coverage_vacuous = vacuous;
  }
  return ok;
}

// Lexicographically first feasible map, by full enumeration (basepoint slot
// pinned). nullopt when the direction is infeasible at eps.
std::optional<std::vector<int>> first_feasible_exhaustive(const FiniteMetricSpace& S,
                                                          const FiniteMetricSpace& T,
                                                          double eps) {
  const int n = S.size();
  const int m = T.size();
  std::vector<int> im(static_cast<std::size_t>(n), 0);
  im[static_cast<std::size_t>(S.basepoint())] = T.basepoint();
  std::vector<int> slots;
  for (int i = 0; i < n; ++i)
    if (i != S.basepoint()) slots.push_back(i);
  for (;;) {
    if (direction_feasible(S, T, im, eps)) return im;
    int k = static_cast<int>(slots.size()) - 1;
    while (k >= 0) {
      int& v = im[static_cast<std::size_t>(slots[static_cast<std::size_t>(k)])];
      if (++v < m) break;
      v = 0;
      --k;
    }
    if (k < 0) return std::nullopt;
  }
}

std::vector<int> fps_landmarks(const FiniteMetricSpace& s, int count) {
  std::vector<int> lm{s.basepoint()};
  std::vector<double> best(static_cast<std::size_t>(s.size()));
  for (int i = 0; i < s.size(); ++i) best[static_cast<std::size_t>(i)] = s(s.basepoint(), i);
  while (static_cast<int>(lm.size()) < count && static_cast<int>(lm.size()) < s.size()) {
    int arg = 0;
    double far = -1.0;
    for (int i = 0; i < s.size(); ++i)
      if (best[static_cast<std::size_t>(i)] > far) {
        far = best[static_cast<std::size_t>(i)];
        arg = i;
      }
    lm.push_back(arg);
    for (int i = 0; i < s.size(); ++i)
      best[static_cast<std::size_t>(i)] = std::min(best[static_cast<std::size_t>(i)], s(arg, i));
  }
  return lm;
}

// Match points by radial profiles against 3 landmarks; ties to the smallest
// target index.
std::vector<int> greedy_signature_map(const FiniteMetricSpace& S, const FiniteMetricSpace& T) {
  const auto lm_s = fps_landmarks(S, 3);
  const auto lm_t = fps_landmarks(T, 3);
  const std::size_t L = std::min(lm_s.size(), lm_t.size());
  std::vector<int> im(static_cast<std::size_t>(S.size()), T.basepoint());
  for (int x = 0; x < S.size(); ++x) {
    if (x == S.basepoint()) continue;
    double best = kInf;
    int pick = T.basepoint();
    for (int t = 0; t < T.size(); ++t) {
      double cost = 0.0;
      for (std::size_t l = 0; l < L; ++l)
        cost += std::abs(S(lm_s[l], x) - T(lm_t[l], t));
      if (cost < best) {
        best = cost;
        pick = t;
      }
    }
    im[static_cast<std::size_t>(x)] = pick;
  }
  return im;
}

double distortion_score(const FiniteMetricSpace& S, const FiniteMetricSpace& T,
                        const std::vector<int>& im, const std::vector<int>& w, double eps) {
  double score = 0.0;
  for (std::size_t a = 0; a < w.size(); ++a)
    for (std::size_t b = a + 1; b < w.size(); ++b) {
      const double dev =
          std::abs(S(w[a], w[b]) - T(im[static_cast<std::size_t>(w[a])], im[static_cast<std::size_t>(w[b])]));
      const double excess = dev - eps;
      if (excess >= 0.0) {
        const double e = excess + 1e-9 * eps;
        score += e * e;
      }
    }
  return score;
}

class DirectionSearch {
 public:
  DirectionSearch(const FiniteMetricSpace& s, const FiniteMetricSpace& t, int budget,
                  std::uint64_t dir_seed, const std::vector<std::vector<int>>& seeds,
                  bool structured)
      : s_(s), t_(t), budget_(budget), seed_(dir_seed) {
    // The constant map gives the universal fallback; greedy profile matching
    // joins the pool only in free-search mode, structured mode keeps just the
    // caller's witness family.
    pool_.emplace_back(static_cast<std::size_t>(s.size()), t.basepoint());
    if (!structured && s.size() > 1 && t.size() > 1)
      pool_.push_back(greedy_signature_map(s, t));
    for (const auto& im : seeds) {
      if (static_cast<int>(im.size()) != s.size())
        throw UsageError("seed map has wrong source size");
      for (int v : im)
        if (v < 0 || v >= t.size()) throw UsageError("seed map image out of range");
      if (im[static_cast<std::size_t>(s.basepoint())] != t.basepoint())
        throw UsageError("seed map is not pointed");
      pool_.push_back(im);
    }
    const double log_budget = std::log(std::max(budget, 1) + 0.5);
    exhaustive_ = (s.size() - 1) * std::log(static_cast<double>(t.size())) <= log_budget;
  }

  bool exhaustive() const { return exhaustive_; }

  std::optional<std::vector<int>> feasible(double eps, int eps_index, bool allow_sa) {
    if (exhaustive_) return first_feasible_exhaustive(s_, t_, eps);
    for (const auto& im : pool_)
      if (direction_feasible(s_, t_, im, eps)) return im;
    if (!allow_sa) return std::nullopt;
    return anneal(eps, eps_index);
  }

 private:
  std::optional<std::vector<int>> anneal(double eps, int eps_index) {
    const std::vector<int> w = window_indices(s_, 1.0 / eps);
    if (w.size() <= 1) return std::nullopt;  // pool already failed (coverage)
    Rng rng(derive_seed(seed_, 0x5a5a, static_cast<std::uint64_t>(eps_index)));

    std::vector<int> cur = pool_.front();
    double cur_score = kInf;
    for (const auto& im : pool_) {
      const double sc = distortion_score(s_, t_, im, w, eps);
      if (sc < cur_score) {
        cur_score = sc;
        cur = im;
      }
    }
    std::vector<int> best = cur;
    double best_score = cur_score;

    const double t0 = std::max(cur_score / static_cast<double>(w.size()), 1e-12);
    const double t_end = 1e-6 * t0;
    const double decay = std::pow(t_end / t0, 1.0 / std::max(budget_, 1));
    double temp = t0;
    for (int step = 0; step < budget_ && best_score > 0.0; ++step, temp *= decay) {
      const int x = w[static_cast<std::size_t>(rng.next_below(static_cast<int>(w.size())))];
      if (x == s_.basepoint()) continue;
      const int fresh = rng.next_below(t_.size());
      const int old = cur[static_cast<std::size_t>(x)];
      if (fresh == old) continue;
      double delta = 0.0;
      for (int j : w) {
        if (j == x) continue;
        const double ds = s_(x, j);
        const int imj = cur[static_cast<std::size_t>(j)];
        const double dev_old = std::abs(ds - t_(old, imj));
        const double dev_new = std::abs(ds - t_(fresh, imj));
        const double eo = dev_old - eps;
        const double en = dev_new - eps;
        if (eo >= 0.0) {
          const double e = eo + 1e-9 * eps;
          delta -= e * e;
        }
        if (en >= 0.0) {
          const double e = en + 1e-9 * eps;
          delta += e * e;
        }
      }
      if (delta < 0.0 || rng.next_unit() < std::exp(-delta / temp)) {
        cur[static_cast<std::size_t>(x)] = fresh;
        cur_score += delta;
        if (cur_score < best_score) {
          best_score = cur_score;
          best = cur;
        }
      }
    }
    if (direction_feasible(s_, t_, best, eps)) {
      pool_.push_back(best);  // warm start for neighboring grid points
      return best;
    }
    return std::nullopt;
  }

  const FiniteMetricSpace& s_;
  const FiniteMetricSpace& t_;
  int budget_;
  std::uint64_t seed_;
  bool exhaustive_ = false;
  std::vector<std::vector<int>> pool_;
};

}  // namespace

void validate_map(const PointedMap& map) {
  if (!map.source || !map.target) throw UsageError("pointed map without space references");
  if (static_cast<int>(map.image.size()) != map.source->size())
    throw UsageError("pointed map image size mismatch");
  for (int v : map.image)
    if (v < 0 || v >= map.target->size()) throw UsageError("pointed map image out of range");
  if (map.image[static_cast<std::size_t>(map.source->basepoint())] != map.target->basepoint())
    throw UsageError("pointed map must send basepoint to basepoint");
}

bool check_eps_approximation(const PointedMap& map, double eps) {
  validate_map(map);
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  return direction_feasible(*map.source, *map.target, map.image, eps);
}

ApproxDetail check_eps_approximation_detail(const PointedMap& map, double eps) {
  validate_map(map);
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  ApproxDetail detail;
  direction_feasible(*map.source, *map.target, map.image, eps, &detail);
  return detail;
}

bool GhEstimate::witnesses_ok() const {
  if (!std::isfinite(upper)) return false;
  return check_eps_approximation(witness_fwd, upper) &&
         check_eps_approximation(witness_bwd, upper);
}

std::vector<double> default_eps_grid() {
  std::vector<double> grid(64);
  for (int k = 0; k < 64; ++k)
    grid[static_cast<std::size_t>(k)] = 1e-3 * std::pow(1.5e3, k / 63.0);
  return grid;
}

GhEstimate gh_brute_force(const SpaceRef& x, const SpaceRef& y,
                          const std::vector<double>& eps_grid) {
  if (!x || !y) throw UsageError("gh_brute_force needs both spaces");
  if (x->size() > 6 || y->size() > 6)
    throw DomainError("gh_brute_force refused: |Y|^|X| map enumeration blows up above 6 points");
  validate_grid(eps_grid);
  GhEstimate est;
  est.eps_grid = eps_grid;
  est.method = "brute";
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    const double eps = eps_grid[k];
    auto fwd = first_feasible_exhaustive(*x, *y, eps);
    if (!fwd) continue;
    auto bwd = first_feasible_exhaustive(*y, *x, eps);
    if (!bwd) continue;
    est.upper = eps;
    est.lower = k == 0 ? 0.0 : eps_grid[k - 1];
    est.witness_fwd = {x, y, std::move(*fwd)};
    est.witness_bwd = {y, x, std::move(*bwd)};
    return est;
  }
  est.upper = kInf;
  est.lower = eps_grid.back();
  return est;
}

double gh_lower_bound(const SpaceRef& x, const SpaceRef& y,
                      const std::vector<double>& eps_grid) {
  if (!x || !y) throw UsageError("gh_lower_bound needs both spaces");
  validate_grid(eps_grid);
  const double rad_x = x->radius();
  const double rad_y = y->radius();
  std::size_t first_ok = eps_grid.size();
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    const double eps = eps_grid[k];
    const double window = 1.0 / eps;
    const bool holds = x->eccentricity_below(window) - eps <= rad_y &&
                       y->eccentricity_below(window) - eps <= rad_x;
    if (holds) {
      first_ok = k;
      break;
    }
  }
  if (first_ok == 0) return 0.0;
  return eps_grid[std::min(first_ok, eps_grid.size() - 1)];
}

GhEstimate gh_upper_bound(const SpaceRef& x, const SpaceRef& y, int budget,
                          std::uint64_t seed, const std::vector<double>& eps_grid,
                          const std::vector<std::vector<int>>& seed_maps_fwd,
                          const std::vector<std::vector<int>>& seed_maps_bwd,
                          bool refine) {
  if (!x || !y) throw UsageError("gh_upper_bound needs both spaces");
  if (budget < 1) throw DomainError("budget must be >= 1");
  validate_grid(eps_grid);

  const std::uint64_t fx = fingerprint(*x);
  const std::uint64_t fy = fingerprint(*y);
  DirectionSearch fwd(*x, *y, budget, derive_seed(seed, fx, fy), seed_maps_fwd, !refine);
  DirectionSearch bwd(*y, *x, budget, derive_seed(seed, fy, fx), seed_maps_bwd, !refine);

  GhEstimate est;
  est.eps_grid = eps_grid;
  est.method = fwd.exhaustive() && bwd.exhaustive() ? "exhaustive" : "search";

  std::size_t found = eps_grid.size();
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    auto f = fwd.feasible(eps_grid[k], static_cast<int>(k), false);
    if (!f) continue;
    auto b = bwd.feasible(eps_grid[k], static_cast<int>(k), false);
    if (!b) continue;
    found = k;
    est.witness_fwd = {x, y, std::move(*f)};
    est.witness_bwd = {y, x, std::move(*b)};
    break;
  }
  if (found == eps_grid.size()) {
    est.upper = kInf;
    est.lower = gh_lower_bound(x, y, eps_grid);
    return est;
  }
  if (est.method == "search" && refine) {
    for (std::size_t k = found; k-- > 0;) {
      auto f = fwd.feasible(eps_grid[k], static_cast<int>(k), true);
      if (!f) break;
      auto b = bwd.feasible(eps_grid[k], static_cast<int>(k), true);
      if (!b) break;
      found = k;
      est.witness_fwd = {x, y, std::move(*f)};
      est.witness_bwd = {y, x, std::move(*b)};
    }
  }
  est.upper = eps_grid[found];
  est.lower = std::min(gh_lower_bound(x, y, eps_grid), est.upper);
  return est;
}

TriangleFactor2Report check_triangle_factor2(const SpaceRef& x1, const SpaceRef& x2,
                                             const SpaceRef& x3,
                                             const std::vector<double>& eps_grid) {
  TriangleFactor2Report rep;
  rep.d12 = gh_brute_force(x1, x2, eps_grid).upper;
  rep.d23 = gh_brute_force(x2, x3, eps_grid).upper;
  rep.d13 = gh_brute_force(x1, x3, eps_grid).upper;
  rep.hypothesis_met = rep.d12 <= 0.5 && rep.d23 <= 0.5;
  rep.bound_sum = 2.0 * (rep.d12 + rep.d23);
  rep.bound_max = 2.0 * std::max(rep.d12, rep.d23);
  rep.margin_sum = rep.bound_sum - rep.d13;
  rep.margin_max = rep.bound_max - rep.d13;
  rep.pass = !rep.hypothesis_met || rep.d13 <= rep.bound_sum;
  return rep;
}

AssociativityReport check_associativity(const std::vector<SpaceRef>& xs,
                                        const std::vector<SpaceRef>& xs_prime, double eps,
                                        double slack, const std::vector<double>& eps_grid) {
  if (xs.size() != xs_prime.size() || xs.empty())
    throw UsageError("associativity check needs two same-length nonempty lists");
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  AssociativityReport rep;
  rep.hypothesis_met = true;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = gh_brute_force(xs[i], xs_prime[i], eps_grid).upper;
    rep.pair_distances.push_back(d);
    if (!(d <= eps)) rep.hypothesis_met = false;
  }
  rep.limit_distance = rep.pair_distances.back();
  rep.bound = 4.0 * eps + slack;
  rep.margin = rep.bound - rep.limit_distance;
  rep.pass = !rep.hypothesis_met || rep.limit_distance <= rep.bound;
  return rep;
}

MetricsCloseReport verify_metrics_close_bound(const RiemannianSample& sample,
                                              const RiemannianSample& perturbed,
                                              double delta, int budget, std::uint64_t seed,
                                              double slack_multiplier) {
  if (!(delta >= 0.0)) throw DomainError("delta must be nonnegative");
  if (sample.vertex_count() != perturbed.vertex_count() ||
      sample.shape() != perturbed.shape())
    throw UsageError("samples must share a grid");
  MetricsCloseReport rep;
  rep.delta = delta;

  const double hi = std::sqrt(1.0 + delta);
  const double guard = 1.0 + 1e-12;
  double worst = 1.0;
  for (int v = 0; v < sample.vertex_count(); ++v) {
    const auto* e0 = sample.begin(v);
    const auto* e1 = perturbed.begin(v);
    const auto n0 = sample.end(v) - e0;
    const auto n1 = perturbed.end(v) - e1;
    if (n0 != n1) throw UsageError("samples must share a grid");
    for (std::ptrdiff_t i = 0; i < n0; ++i) {
      if (e0[i].to != e1[i].to) throw UsageError("samples must share a grid");
      const double r = e1[i].length / e0[i].length;
      worst = std::max(worst, std::max(r, 1.0 / r));
      if (r > hi * guard || 1.0 / r > hi * guard)
        throw HypothesisError("edge-length ratios exceed (1+delta)^{1/2}: the bound does not apply");
    }
  }
  rep.worst_edge_ratio = worst;

  const auto xg = make_space(geodesic_distances(sample, 0));
  const auto xh = make_space(geodesic_distances(perturbed, 0));
  const double scale = std::min(xg->diameter(), xh->diameter());
  rep.slack = slack_multiplier *
              std::max(sample.grid_slack(scale), perturbed.grid_slack(scale));
  rep.gh_upper = gh_upper_bound(xg, xh, budget, seed).upper;
  rep.bound = 2.0 * std::pow(delta, 0.25) * std::sqrt(1.0 + delta);
  rep.margin = rep.bound + rep.slack - rep.gh_upper;
  rep.pass = rep.gh_upper <= rep.bound + rep.slack;
  return rep;
}

}  // namespace ghflow
