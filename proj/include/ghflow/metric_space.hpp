#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "ghflow/errors.hpp"

namespace ghflow {

// Pointed finite metric space stored as a dense distance matrix. This is the
// common currency of every Gromov-Hausdorff computation here.
//
// Invariants (see validate): zero diagonal, symmetry, triangle inequality
// within tol_tri, basepoint < n, 1 <= n <= kMaxPoints.
class FiniteMetricSpace {
 public:
  static constexpr int kMaxPoints = 4096;

  FiniteMetricSpace(int n, std::vector<double> dist, int basepoint,
                    double tol_tri = 0.0);

  int size() const { return n_; }
  int basepoint() const { return basepoint_; }
  double tol_tri() const { return tol_tri_; }

  double operator()(int i, int j) const {
    return dist_[static_cast<std::size_t>(i) * n_ + j];
  }
  const std::vector<double>& matrix() const { return dist_; }

  // Optional per-point coordinates, for provenance only. Empty or size n.
  std::vector<std::array<double, 3>> labels;

  // Largest distance from the basepoint.
  double radius() const;
  // sup{ d(basepoint, z) : d(basepoint, z) < limit }, the windowed radius.
  double eccentricity_below(double limit) const;
  double diameter() const;

  // Full invariant suite. Throws DomainError naming the offending entry or
  // triple. The triangle check allows tol_tri plus a 4-ulp numeric guard
  // scaled by the largest entry; float path sums are not associative, so a
  // literal zero tolerance would reject honest shortest-path matrices.
  void validate() const;
  double max_triangle_defect() const;

  friend bool operator==(const FiniteMetricSpace&, const FiniteMetricSpace&) = default;

 private:
  int n_;
  int basepoint_;
  double tol_tri_;
  std::vector<double> dist_;
};

// Open ball about `center`: keeps points with d(center, q) < rho strictly,
// restricts distances, and rebases at the center.
FiniteMetricSpace metric_ball(const FiniteMetricSpace& space, int center, double rho);

// Same matrix, new basepoint.
FiniteMetricSpace rebase(const FiniteMetricSpace& space, int new_basepoint);

// n evenly spaced points on a circle of circumference L; d(i,j) is exact arc
// length, basepoint 0.
FiniteMetricSpace sample_circle(double circumference, int n);

// Text format: line 1 "n <count> basepoint <index>", then n rows of n floats
// at 17 significant digits (bit-round-trippable).
void write_distance_matrix(std::ostream& out, const FiniteMetricSpace& space);
FiniteMetricSpace read_distance_matrix(std::istream& in);
void save_distance_matrix(const std::string& path, const FiniteMetricSpace& space);
FiniteMetricSpace load_distance_matrix(const std::string& path);

}  // namespace ghflow
