#include "ghflow/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace ghflow {

FiniteMetricSpace::FiniteMetricSpace(int n, std::vector<double> dist, int basepoint,
                                     double tol_tri)
    : n_(n), basepoint_(basepoint), tol_tri_(tol_tri), dist_(std::move(dist)) {
  if (n_ < 1) throw DomainError("metric space needs at least one point");
  if (n_ > kMaxPoints)
    throw DomainError("metric space exceeds the " + std::to_string(kMaxPoints) +
                      "-point cap (n=" + std::to_string(n_) + ")");
  if (basepoint_ < 0 || basepoint_ >= n_)
    throw DomainError("basepoint out of range");
  if (dist_.size() != static_cast<std::size_t>(n_) * n_)
    throw DomainError("distance matrix size does not match point count");
  for (double d : dist_)
    if (!std::isfinite(d) || d < 0.0)
      throw DomainError("distance entries must be finite and nonnegative");
}

double FiniteMetricSpace::radius() const {
  double r = 0.0;
  for (int i = 0; i < n_; ++i) r = std::max(r, (*this)(basepoint_, i));
  return r;
}

double FiniteMetricSpace::eccentricity_below(double limit) const {
  double r = 0.0;
  for (int i = 0; i < n_; ++i) {
    double d = (*this)(basepoint_, i);
    if (d < limit) r = std::max(r, d);
  }
  return r;
}

double FiniteMetricSpace::diameter() const {
  double d = 0.0;
  for (double x : dist_) d = std::max(d, x);
  return d;
}

void FiniteMetricSpace::validate() const {
  double scale = 0.0;
  for (double d : dist_) scale = std::max(scale, d);
  const double guard = 4.0 * std::numeric_limits<double>::epsilon() * scale;
  for (int i = 0; i < n_; ++i) {
    if ((*this)(i, i) != 0.0)
      throw DomainError("nonzero diagonal at point " + std::to_string(i));
    for (int j = i + 1; j < n_; ++j)
      if ((*this)(i, j) != (*this)(j, i))
        throw DomainError("asymmetry at pair (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
  }
  const double tol = tol_tri_ + guard;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      const double dij = (*this)(i, j);
      for (int k = 0; k < n_; ++k)
        if (dij > (*this)(i, k) + (*this)(k, j) + tol)
          throw DomainError("triangle inequality fails at (" + std::to_string(i) +
                            "," + std::to_string(j) + "," + std::to_string(k) + ")");
    }
}

double FiniteMetricSpace::max_triangle_defect() const {
  double worst = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      const double dij = (*this)(i, j);
      for (int k = 0; k < n_; ++k)
        worst = std::max(worst, dij - (*this)(i, k) - (*this)(k, j));
    }
  return worst;
}

FiniteMetricSpace metric_ball(const FiniteMetricSpace& space, int center, double rho) {
  if (center < 0 || center >= space.size()) throw DomainError("ball center out of range");
  if (!(rho > 0.0)) throw DomainError("ball radius must be positive");
  std::vector<int> keep;
  for (int i = 0; i < space.size(); ++i)
    if (space(center, i) < rho) keep.push_back(i);
  const int m = static_cast<int>(keep.size());
  std::vector<double> dist(static_cast<std::size_t>(m) * m);
  int new_base = 0;
  for (int a = 0; a < m; ++a) {
    if (keep[a] == center) new_base = a;
    for (int b = 0; b < m; ++b)
      dist[static_cast<std::size_t>(a) * m + b] = space(keep[a], keep[b]);
  }
  FiniteMetricSpace out(m, std::move(dist), new_base, space.tol_tri());
  if (!space.labels.empty()) {
    out.labels.reserve(keep.size());
    for (int idx : keep) out.labels.push_back(space.labels[static_cast<std::size_t>(idx)]);
  }
  return out;
}

FiniteMetricSpace rebase(const FiniteMetricSpace& space, int new_basepoint) {
  if (new_basepoint < 0 || new_basepoint >= space.size())
    throw DomainError("rebase index out of range");
  FiniteMetricSpace out(space.size(), space.matrix(), new_basepoint, space.tol_tri());
  out.labels = space.labels;
  return out;
}

FiniteMetricSpace sample_circle(double circumference, int n) {
  if (!(circumference > 0.0)) throw DomainError("circumference must be positive");
  if (n < 3) throw DomainError("circle sample needs at least 3 points");
  std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int k = std::abs(i - j);
      k = std::min(k, n - k);
      // L*(k/n) rather than (L/n)*k: exact whenever k/n is dyadic, which is
      // what keeps boundary points at exactly rho out of strict balls.
      dist[static_cast<std::size_t>(i) * n + j] =
          circumference * (static_cast<double>(k) / n);
    }
  return FiniteMetricSpace(n, std::move(dist), 0, 0.0);
}

void write_distance_matrix(std::ostream& out, const FiniteMetricSpace& space) {
  out << "n " << space.size() << " basepoint " << space.basepoint() << "\n";
  char buf[64];
  for (int i = 0; i < space.size(); ++i) {
    for (int j = 0; j < space.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", space(i, j));
      out << buf << (j + 1 == space.size() ? "" : " ");
    }
    out << "\n";
  }
}

FiniteMetricSpace read_distance_matrix(std::istream& in) {
  std::string tag_n, tag_base;
  int n = 0, base = 0;
  if (!(in >> tag_n >> n >> tag_base >> base) || tag_n != "n" || tag_base != "basepoint")
    throw DomainError("distance matrix header malformed");
  if (n < 1 || n > FiniteMetricSpace::kMaxPoints)
    throw DomainError("distance matrix count out of range");
  std::vector<double> dist(static_cast<std::size_t>(n) * n);
  for (auto& d : dist)
    if (!(in >> d)) throw DomainError("distance matrix truncated");
  return FiniteMetricSpace(n, std::move(dist), base);
}

void save_distance_matrix(const std::string& path, const FiniteMetricSpace& space) {
  std::ofstream f(path);
  if (!f) throw DomainError("cannot open " + path + " for writing");
  write_distance_matrix(f, space);
}

FiniteMetricSpace load_distance_matrix(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open " + path);
  return read_distance_matrix(f);
}

}  // namespace ghflow
