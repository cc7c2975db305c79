#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "ghflow/errors.hpp"

namespace ghflow {

// Recorded history of an integrated flow: states at ascending times starting
// at 0, with the curvature sup-norm alongside each state.
template <class State>
struct FlowTrace {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<double> k_max;
  std::optional<double> declared_c0;

  double max_curvature() const {
    double m = 0.0;
    for (double k : k_max) m = std::max(m, k);
    return m;
  }

  // When a target bound was declared, every recorded K_max must respect it.
  bool declared_bound_ok() const {
    return !declared_c0 || max_curvature() <= *declared_c0;
  }

  // Index of the recorded time closest to t.
  int nearest_index(double t) const {
    int best = 0;
    double err = std::abs(times[0] - t);
    for (int i = 1; i < static_cast<int>(times.size()); ++i) {
      const double e = std::abs(times[static_cast<std::size_t>(i)] - t);
      if (e < err) {
        err = e;
        best = i;
      }
    }
    return best;
  }

  // Same, but the recorded time must match within `tol`.
  int index_at(double t, double tol = 1e-9) const {
    const int best = nearest_index(t);
    if (std::abs(times[static_cast<std::size_t>(best)] - t) > tol)
      throw UsageError("time not recorded in trace");
    return best;
  }
};

}  // namespace ghflow
