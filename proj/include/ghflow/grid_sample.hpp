#pragma once

#include <array>
#include <functional>
#include <vector>

#include "ghflow/errors.hpp"
#include "ghflow/metric_space.hpp"

namespace ghflow {

// A Riemannian metric sampled as a weighted grid graph. Distances are graph
// shortest paths: 8-neighbor stencil on 2D grids, 6-neighbor on 3D, plain
// chains/rings in 1D. Edge coefficients use midpoint evaluation.
class RiemannianSample {
 public:
  int vertex_count() const { return static_cast<int>(offsets_.size()) - 1; }
  int edge_count() const { return static_cast<int>(targets_.size()) / 2; }

  // Grid shape (one entry per axis) and per-axis periodicity.
  const std::vector<int>& shape() const { return shape_; }
  const std::vector<bool>& periodic() const { return periodic_; }
  int index2(int i, int j) const { return i * shape_[1] + j; }
  int index3(int i, int j, int k) const { return (i * shape_[1] + j) * shape_[2] + k; }

  const std::array<double, 3>& coord(int v) const { return coords_[static_cast<std::size_t>(v)]; }
  double max_edge_length() const { return max_edge_; }

  // Worst-case grid-path/geodesic ratio of the stencil (1 in 1D, ~1.0824 for
  // 8-neighbor 2D, sqrt(3) for 6-neighbor 3D).
  double stencil_anisotropy() const { return anisotropy_; }

  // Additive + multiplicative discretization budget for distances up to
  // `scale`: (anisotropy - 1) * scale + 2 * max edge length.
  double grid_slack(double scale) const {
    return (anisotropy_ - 1.0) * scale + 2.0 * max_edge_;
  }

  struct Neighbor {
    int to;
    double length;
  };
  // Neighbors of v as a contiguous span.
  const Neighbor* begin(int v) const { return nbr_.data() + offsets_[static_cast<std::size_t>(v)]; }
  const Neighbor* end(int v) const { return nbr_.data() + offsets_[static_cast<std::size_t>(v) + 1]; }

  // Builders. All throw DomainError on nonpositive/non-finite inputs.
  // 1D ring of n vertices; edge_lengths[i] joins i and (i+1) mod n.
  static RiemannianSample ring(const std::vector<double>& edge_lengths,
                               const std::vector<double>& positions = {});
  // 1D open chain of n+1 vertices from n edge lengths.
  static RiemannianSample segment(const std::vector<double>& edge_lengths,
                                  const std::vector<double>& positions = {});
  // Doubly periodic 2D grid with diagonal metric a(r) dr^2 + b(r) ds^2 on
  // [0,Lr) x [0,Ls); a and b are sampled on the r-grid (size nr).
  static RiemannianSample torus_grid(const std::vector<double>& a,
                                     const std::vector<double>& b, int nr, int ns,
                                     double period_r, double period_s);
  // Flat rectangular torus with unit metric on [0,Lx) x [0,Ly).
  static RiemannianSample flat_torus(double lx, double ly, int nx, int ny);
  // Open rectangle [r0,r1] x [s0,s1] with metric a(r) dr^2 + b(r) ds^2;
  // a and b are sampled at the nr r-vertices.
  static RiemannianSample plane_grid(const std::vector<double>& a,
                                     const std::vector<double>& b, double r0, double r1,
                                     int nr, double s0, double s1, int ns);
  // Open 3D box [lo,hi]^3 with diagonal metric given pointwise as
  // (gxx, gyy, gzz); nx,ny,nz are vertex counts per axis.
  static RiemannianSample box3(const std::array<double, 3>& lo,
                               const std::array<double, 3>& hi, int nx, int ny, int nz,
                               const std::function<std::array<double, 3>(double, double, double)>& metric);

 private:
  struct Builder;
  std::vector<int> shape_;
  std::vector<bool> periodic_;
  std::vector<std::size_t> offsets_;
  std::vector<int> targets_;  // kept for edge_count bookkeeping
  std::vector<Neighbor> nbr_;
  std::vector<std::array<double, 3>> coords_;
  double max_edge_ = 0.0;
  double anisotropy_ = 1.0;
};

// Sampled realization of dr^2 + lambda^2 f(r)^2 ds^2 on [0,2pi)^2.
// f holds grid values on the r-grid; nr, ns >= 8.
RiemannianSample sample_warped_torus(const std::vector<double>& f, double lambda,
                                     int nr, int ns);

// Exact single-source shortest paths.
std::vector<double> single_source_distances(const RiemannianSample& sample, int source);

// Dense all-pairs shortest paths as a pointed metric space (vertex cap 4096).
// Rows are Dijkstra runs, independent per source; the matrix is symmetrized
// by the pairwise min so the result does not depend on scheduling.
FiniteMetricSpace geodesic_distances(const RiemannianSample& sample, int basepoint,
                                     int jobs = 0);

// Maximin landmark selection starting at `start`; ties break to the smallest
// vertex index. Returns `count` vertex ids, start first.
std::vector<int> farthest_point_landmarks(const RiemannianSample& sample, int count,
                                          int start);

// Pointed space on the given landmark vertices (landmarks[0] is basepoint).
FiniteMetricSpace landmark_space(const RiemannianSample& sample,
                                 const std::vector<int>& landmarks);

}  // namespace ghflow
