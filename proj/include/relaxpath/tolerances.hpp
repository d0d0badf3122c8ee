#pragma once

#include <algorithm>
#include <cmath>

namespace relaxpath {

/// Numerical tolerances shared by every solver and tracker.
///
/// `geom` is an absolute tolerance for comparisons against the caps +-1 and
/// between breakpoint positions; callers scale it by max(1, |nu|).
template <typename Scalar = double>
struct Tolerances {
  Scalar geom = Scalar(1e-12);
  Scalar simplex = Scalar(1e-9);
  Scalar feas = Scalar(1e-10);
  // Residual of G(nu, mu) accepted by primal/dual reconstruction, scaled by max(1, nu).
  Scalar residual = Scalar(1e-8);
  // Lines whose slope difference is below this (relative) are treated as parallel.
  Scalar parallel = Scalar(1e-12);
  // |v_j| within this (relative) of 1 makes a parallel line coincide with l0.
  Scalar coincide = Scalar(1e-9);
  int bisection_iterations = 200;

  Scalar scaled_geom(Scalar nu) const { return geom * std::max(Scalar(1), std::abs(nu)); }
};

}  // namespace relaxpath
