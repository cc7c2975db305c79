#include "ghflow/grid_sample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>

#include "ghflow/parallel.hpp"

namespace ghflow {

namespace {
constexpr double kAnisotropy8 = 1.0823922002923940;  // sqrt(4 - 2*sqrt(2))
const double kAnisotropy6 = std::sqrt(3.0);

void require_positive_finite(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError(std::string(what) + " must be positive and finite");
}
}  // namespace

struct RiemannianSample::Builder {
  int n;
  std::vector<std::vector<Neighbor>> adj;
  explicit Builder(int count) : n(count), adj(static_cast<std::size_t>(count)) {}

  void edge(int u, int v, double len) {
    if (!(len > 0.0) || !std::isfinite(len))
      throw DomainError("edge length must be positive and finite");
    adj[static_cast<std::size_t>(u)].push_back({v, len});
    adj[static_cast<std::size_t>(v)].push_back({u, len});
  }

  void finish(RiemannianSample& s) {
    s.offsets_.assign(1, 0);
    s.offsets_.reserve(static_cast<std::size_t>(n) + 1);
    double worst = 0.0;
    for (auto& list : adj) {
      std::sort(list.begin(), list.end(),
                [](const Neighbor& a, const Neighbor& b) { return a.to < b.to; });
      for (const Neighbor& nb : list) {
        s.nbr_.push_back(nb);
        s.targets_.push_back(nb.to);
        worst = std::max(worst, nb.length);
      }
      s.offsets_.push_back(s.nbr_.size());
    }
    s.max_edge_ = worst;
  }
};

RiemannianSample RiemannianSample::ring(const std::vector<double>& edge_lengths,
                                        const std::vector<double>& positions) {
  const int n = static_cast<int>(edge_lengths.size());
  if (n < 3) throw DomainError("ring needs at least 3 edges");
  RiemannianSample s;
  Builder b(n);
  for (int i = 0; i < n; ++i) b.edge(i, (i + 1) % n, edge_lengths[static_cast<std::size_t>(i)]);
  b.finish(s);
  s.shape_ = {n};
  s.periodic_ = {true};
  s.coords_.resize(static_cast<std::size_t>(n), {0.0, 0.0, 0.0});
  for (int i = 0; i < n; ++i)
    s.coords_[static_cast<std::size_t>(i)][0] =
        positions.empty() ? static_cast<double>(i) : positions[static_cast<std::size_t>(i)];
  s.anisotropy_ = 1.0;
  return s;
}

RiemannianSample RiemannianSample::segment(const std::vector<double>& edge_lengths,
                                           const std::vector<double>& positions) {
  const int ne = static_cast<int>(edge_lengths.size());
  if (ne < 1) throw DomainError("segment needs at least 1 edge");
  const int n = ne + 1;
  RiemannianSample s;
  Builder b(n);
  for (int i = 0; i < ne; ++i) b.edge(i, i + 1, edge_lengths[static_cast<std::size_t>(i)]);
  b.finish(s);
  s.shape_ = {n};
  s.periodic_ = {false};
  s.coords_.resize(static_cast<std::size_t>(n), {0.0, 0.0, 0.0});
  for (int i = 0; i < n; ++i)
    s.coords_[static_cast<std::size_t>(i)][0] =
        positions.empty() ? static_cast<double>(i) : positions[static_cast<std::size_t>(i)];
  s.anisotropy_ = 1.0;
  return s;
}

RiemannianSample RiemannianSample::torus_grid(const std::vector<double>& a,
                                              const std::vector<double>& b, int nr, int ns,
                                              double period_r, double period_s) {
  if (nr < 8 || ns < 8) throw DomainError("torus grid needs nr, ns >= 8");
  if (static_cast<int>(a.size()) != nr || static_cast<int>(b.size()) != nr)
    throw DomainError("coefficient arrays must have nr entries");
  for (double x : a) require_positive_finite(x, "dr^2 coefficient");
  for (double x : b) require_positive_finite(x, "ds^2 coefficient");
  require_positive_finite(period_r, "period_r");
  require_positive_finite(period_s, "period_s");

  const double hr = period_r / nr;
  const double hs = period_s / ns;
  RiemannianSample s;
  Builder bld(nr * ns);
  auto vid = [ns](int i, int j) { return i * ns + j; };
  for (int i = 0; i < nr; ++i) {
    const int ip = (i + 1) % nr;
    const double a_mid = 0.5 * (a[static_cast<std::size_t>(i)] + a[static_cast<std::size_t>(ip)]);
    const double b_mid = 0.5 * (b[static_cast<std::size_t>(i)] + b[static_cast<std::size_t>(ip)]);
    const double len_r = std::sqrt(a_mid) * hr;
    const double len_s = std::sqrt(b[static_cast<std::size_t>(i)]) * hs;
    const double len_diag = std::sqrt(a_mid * hr * hr + b_mid * hs * hs);
    for (int j = 0; j < ns; ++j) {
      const int jp = (j + 1) % ns;
      bld.edge(vid(i, j), vid(ip, j), len_r);
      bld.edge(vid(i, j), vid(i, jp), len_s);
      bld.edge(vid(i, j), vid(ip, jp), len_diag);
      bld.edge(vid(ip, j), vid(i, jp), len_diag);
    }
  }
  bld.finish(s);
  s.shape_ = {nr, ns};
  s.periodic_ = {true, true};
  s.coords_.resize(static_cast<std::size_t>(nr) * ns);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < ns; ++j)
      s.coords_[static_cast<std::size_t>(vid(i, j))] = {i * hr, j * hs, 0.0};
  s.anisotropy_ = kAnisotropy8;
  return s;
}

RiemannianSample RiemannianSample::flat_torus(double lx, double ly, int nx, int ny) {
  require_positive_finite(lx, "lx");
  require_positive_finite(ly, "ly");
  // Unit coefficients; periods give the edge lengths directly.
  std::vector<double> a(static_cast<std::size_t>(nx), 1.0);
  std::vector<double> b(static_cast<std::size_t>(nx), 1.0);
  return torus_grid(a, b, nx, ny, lx, ly);
}

RiemannianSample RiemannianSample::plane_grid(const std::vector<double>& a,
                                              const std::vector<double>& b, double r0,
                                              double r1, int nr, double s0, double s1,
                                              int ns) {
  if (nr < 2 || ns < 2) throw DomainError("plane grid needs >= 2 vertices per axis");
  if (static_cast<int>(a.size()) != nr || static_cast<int>(b.size()) != nr)
    throw DomainError("coefficient arrays must have nr entries");
  for (double x : a) require_positive_finite(x, "dr^2 coefficient");
  for (double x : b) require_positive_finite(x, "ds^2 coefficient");
  const double hr = (r1 - r0) / (nr - 1);
  const double hs = (s1 - s0) / (ns - 1);
  require_positive_finite(hr, "r extent");
  require_positive_finite(hs, "s extent");

  RiemannianSample s;
  Builder bld(nr * ns);
  auto vid = [ns](int i, int j) { return i * ns + j; };
  for (int i = 0; i < nr; ++i) {
    const double len_s = std::sqrt(b[static_cast<std::size_t>(i)]) * hs;
    for (int j = 0; j + 1 < ns; ++j) bld.edge(vid(i, j), vid(i, j + 1), len_s);
    if (i + 1 == nr) continue;
    const double a_mid =
        0.5 * (a[static_cast<std::size_t>(i)] + a[static_cast<std::size_t>(i + 1)]);
    const double b_mid =
        0.5 * (b[static_cast<std::size_t>(i)] + b[static_cast<std::size_t>(i + 1)]);
    const double len_r = std::sqrt(a_mid) * hr;
    const double len_diag = std::sqrt(a_mid * hr * hr + b_mid * hs * hs);
    for (int j = 0; j < ns; ++j) {
      bld.edge(vid(i, j), vid(i + 1, j), len_r);
      if (j + 1 < ns) {
        bld.edge(vid(i, j), vid(i + 1, j + 1), len_diag);
        bld.edge(vid(i + 1, j), vid(i, j + 1), len_diag);
      }
    }
  }
  bld.finish(s);
  s.shape_ = {nr, ns};
  s.periodic_ = {false, false};
  s.coords_.resize(static_cast<std::size_t>(nr) * ns);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < ns; ++j)
      s.coords_[static_cast<std::size_t>(vid(i, j))] = {r0 + i * hr, s0 + j * hs, 0.0};
  s.anisotropy_ = kAnisotropy8;
  return s;
}

RiemannianSample RiemannianSample::box3(
    const std::array<double, 3>& lo, const std::array<double, 3>& hi, int nx, int ny, int nz,
    const std::function<std::array<double, 3>(double, double, double)>& metric) {
  if (nx < 2 || ny < 2 || nz < 2) throw DomainError("box grid needs >= 2 vertices per axis");
  const double hx = (hi[0] - lo[0]) / (nx - 1);
  const double hy = (hi[1] - lo[1]) / (ny - 1);
  const double hz = (hi[2] - lo[2]) / (nz - 1);
  require_positive_finite(hx, "x extent");
  require_positive_finite(hy, "y extent");
  require_positive_finite(hz, "z extent");

  RiemannianSample s;
  Builder bld(nx * ny * nz);
  auto vid = [ny, nz](int i, int j, int k) { return (i * ny + j) * nz + k; };
  auto at = [&](int i, int j, int k) -> std::array<double, 3> {
    return {lo[0] + i * hx, lo[1] + j * hy, lo[2] + k * hz};
  };
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nz; ++k) {
        const auto p = at(i, j, k);
        if (i + 1 < nx) {
          auto g = metric(p[0] + 0.5 * hx, p[1], p[2]);
          bld.edge(vid(i, j, k), vid(i + 1, j, k), std::sqrt(g[0]) * hx);
        }
        if (j + 1 < ny) {
          auto g = metric(p[0], p[1] + 0.5 * hy, p[2]);
          bld.edge(vid(i, j, k), vid(i, j + 1, k), std::sqrt(g[1]) * hy);
        }
        if (k + 1 < nz) {
          auto g = metric(p[0], p[1], p[2] + 0.5 * hz);
          bld.edge(vid(i, j, k), vid(i, j, k + 1), std::sqrt(g[2]) * hz);
        }
      }
  bld.finish(s);
  s.shape_ = {nx, ny, nz};
  s.periodic_ = {false, false, false};
  s.coords_.resize(static_cast<std::size_t>(nx) * ny * nz);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nz; ++k) s.coords_[static_cast<std::size_t>(vid(i, j, k))] = at(i, j, k);
  s.anisotropy_ = kAnisotropy6;
  return s;
}

RiemannianSample sample_warped_torus(const std::vector<double>& f, double lambda,
                                     int nr, int ns) {
  if (static_cast<int>(f.size()) != nr) throw DomainError("f must have nr grid values");
  for (double x : f) require_positive_finite(x, "f");
  require_positive_finite(lambda, "lambda");
  if (nr < 8 || ns < 8) throw DomainError("warped torus needs nr, ns >= 8");
  std::vector<double> a(static_cast<std::size_t>(nr), 1.0);
  std::vector<double> b(static_cast<std::size_t>(nr));
  for (int i = 0; i < nr; ++i) {
    const double lf = lambda * f[static_cast<std::size_t>(i)];
    b[static_cast<std::size_t>(i)] = lf * lf;
  }
  const double two_pi = 2.0 * std::acos(-1.0);
  return RiemannianSample::torus_grid(a, b, nr, ns, two_pi, two_pi);
}

std::vector<double> single_source_distances(const RiemannianSample& sample, int source) {
  const int n = sample.vertex_count();
  if (source < 0 || source >= n) throw DomainError("source vertex out of range");
  std::vector<double> dist(static_cast<std::size_t>(n),
                           std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[static_cast<std::size_t>(source)] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[static_cast<std::size_t>(v)]) continue;
    for (const auto* e = sample.begin(v); e != sample.end(v); ++e) {
      const double nd = d + e->length;
      if (nd < dist[static_cast<std::size_t>(e->to)]) {
        dist[static_cast<std::size_t>(e->to)] = nd;
        heap.emplace(nd, e->to);
      }
    }
  }
  return dist;
}

FiniteMetricSpace geodesic_distances(const RiemannianSample& sample, int basepoint,
                                     int jobs) {
  const int n = sample.vertex_count();
  if (n > FiniteMetricSpace::kMaxPoints)
    throw DomainError("sample too large for a dense matrix; use single-source distances");
  if (basepoint < 0 || basepoint >= n) throw DomainError("basepoint out of range");
  std::vector<double> dist(static_cast<std::size_t>(n) * n);
  parallel_for(n, jobs, [&](int src) {
    auto row = single_source_distances(sample, src);
    std::copy(row.begin(), row.end(), dist.begin() + static_cast<std::size_t>(src) * n);
  });
  // Forward and reverse path sums can differ by ulps; take the pairwise min.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const std::size_t ij = static_cast<std::size_t>(i) * n + j;
      const std::size_t ji = static_cast<std::size_t>(j) * n + i;
      const double d = std::min(dist[ij], dist[ji]);
      if (!std::isfinite(d)) throw DomainError("sample graph is disconnected");
      dist[ij] = dist[ji] = d;
    }
  FiniteMetricSpace out(n, std::move(dist), basepoint, 0.0);
  out.labels.resize(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) out.labels[static_cast<std::size_t>(v)] = sample.coord(v);
  return out;
}

std::vector<int> farthest_point_landmarks(const RiemannianSample& sample, int count,
                                          int start) {
  const int n = sample.vertex_count();
  if (count < 1 || count > n) throw DomainError("landmark count out of range");
  std::vector<int> picks{start};
  std::vector<double> best = single_source_distances(sample, start);
  while (static_cast<int>(picks.size()) < count) {
    int arg = 0;
    double far = -1.0;
    for (int v = 0; v < n; ++v)
      if (best[static_cast<std::size_t>(v)] > far) {
        far = best[static_cast<std::size_t>(v)];
        arg = v;
      }
    picks.push_back(arg);
    auto d = single_source_distances(sample, arg);
    for (int v = 0; v < n; ++v)
      best[static_cast<std::size_t>(v)] = std::min(best[static_cast<std::size_t>(v)],
                                                   d[static_cast<std::size_t>(v)]);
  }
  return picks;
}

FiniteMetricSpace landmark_space(const RiemannianSample& sample,
                                 const std::vector<int>& landmarks) {
  const int k = static_cast<int>(landmarks.size());
  if (k < 1) throw DomainError("need at least one landmark");
  std::vector<double> dist(static_cast<std::size_t>(k) * k, 0.0);
  for (int a = 0; a < k; ++a) {
    auto row = single_source_distances(sample, landmarks[static_cast<std::size_t>(a)]);
    for (int b = 0; b < k; ++b)
      dist[static_cast<std::size_t>(a) * k + b] = row[static_cast<std::size_t>(landmarks[static_cast<std::size_t>(b)])];
  }
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      const double d = std::min(dist[static_cast<std::size_t>(a) * k + b],
                                dist[static_cast<std::size_t>(b) * k + a]);
      dist[static_cast<std::size_t>(a) * k + b] = dist[static_cast<std::size_t>(b) * k + a] = d;
    }
  FiniteMetricSpace out(k, std::move(dist), 0, 0.0);
  out.labels.reserve(landmarks.size());
  for (int v : landmarks) out.labels.push_back(sample.coord(v));
  return out;
}

}  // namespace ghflow
