#pragma once

#include <cmath>
#include <limits>

#include "relaxpath/path.hpp"

namespace relaxpath {

/// Squared-loss view of the segment sums: the segment line is nu R + mu B + M = 0.
template <typename Scalar>
struct SqSegmentSums {
  Scalar R = 0;  // sum over I_0 of m (u - q)
  Scalar B = 0;  // sum over I_0 of m
  Scalar M = 0;

  Scalar mu_at(Scalar nu) const { return -(nu * R + M) / B; }
};

/// The generic sums use a = 1, c = q - u, so U = B and Q = -R.
template <typename Scalar>
SqSegmentSums<Scalar> sq_sums(const SegmentSums<Scalar>& s) {
  return {-s.Q, s.U, s.M};
}

template <typename Scalar>
Scalar evaluate_sq_G(const ProblemInstance<Scalar>& inst, Scalar nu, Scalar mu) {
  Scalar g = 0;
  for (Index j = 0; j < inst.n(); ++j)
    g += inst.m()[j] * theta(nu * (inst.u()[j] - inst.q()[j]) + mu);
  return g;
}

/// Path of the projection of u onto Delta(m) intersected with the box |p - q| <= 1/nu.
template <typename Scalar>
RelaxationPath<Scalar> sq_track_local(const ProblemInstance<Scalar>& inst,
                                      const Tolerances<Scalar>& tol = {}) {
  const LineSet<Scalar> L = make_lines(inst, Objective::Squared);
  return detail::track_lines_local(L, tol);
}

/// p_j = q_j + theta(nu (u_j - q_j) + mu) / nu.
template <typename Scalar>
Vector<Scalar> sq_primal_from(const ProblemInstance<Scalar>& inst, Scalar nu, Scalar mu,
                              const Tolerances<Scalar>& tol = {}) {
  if (!(nu > 0) || !std::isfinite(nu)) throw Error(Errc::InvalidNu, "nu must be positive");
  const Scalar g = evaluate_sq_G(inst, nu, mu);
  if (!(std::abs(g) <= tol.residual * std::max(Scalar(1), nu)))
    throw Error(Errc::InfeasiblePoint, "point is not on the squared-loss path");
  Vector<Scalar> p(inst.n());
  for (Index j = 0; j < inst.n(); ++j)
    p[j] = inst.q()[j] + theta(nu * (inst.u()[j] - inst.q()[j]) + mu) / nu;
  return p;
}

/// Bisection for a zero of the squared-loss master equation at nu.
template <typename Scalar>
Scalar sq_solve_mu_at(const ProblemInstance<Scalar>& inst, Scalar nu,
                      const Tolerances<Scalar>& tol = {}) {
  if (!(nu > 0) || !std::isfinite(nu)) throw Error(Errc::InvalidNu, "nu must be positive");
  const Vector<Scalar> d = nu * (inst.u() - inst.q());
  Scalar lo = -1 - d.maxCoeff();
  Scalar hi = 1 - d.minCoeff();
  for (int it = 0; it < tol.bisection_iterations; ++it) {
    const Scalar mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    if (evaluate_sq_G(inst, nu, mid) < 0)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

/// Primal point of a squared-loss path at nu.
template <typename Scalar>
Vector<Scalar> sq_path_primal(const ProblemInstance<Scalar>& inst,
                              const RelaxationPath<Scalar>& path, Scalar nu,
                              const Tolerances<Scalar>& tol = {}) {
  return sq_primal_from(inst, nu, path_mu(path, nu), tol);
}

/// Projection by bisection on the hyperplane multiplier eta:
/// p_j = clamp(u_j + eta, q_j - 1/nu, q_j + 1/nu) with m.p = 1.
template <typename Scalar>
Vector<Scalar> sq_projection_oracle(const ProblemInstance<Scalar>& inst, Scalar nu,
                                    int iterations = 400) {
  if (!(nu > 0) || !std::isfinite(nu)) throw Error(Errc::InvalidNu, "nu must be positive");
  const auto& u = inst.u();
  const auto& q = inst.q();
  const Scalar w = 1 / nu;
  auto project = [&](Scalar eta) {
    Vector<Scalar> p(inst.n());
    for (Index j = 0; j < inst.n(); ++j) p[j] = std::clamp(u[j] + eta, q[j] - w, q[j] + w);
    return p;
  };
  Scalar lo = ((q.array() - w) - u.array()).minCoeff();
  Scalar hi = ((q.array() + w) - u.array()).maxCoeff();
  for (int it = 0; it < iterations; ++it) {
    const Scalar mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    if (inst.m().dot(project(mid)) < 1)
      lo = mid;
    else
      hi = mid;
  }
  return project(lo + (hi - lo) / 2);
}

template <typename Scalar>
Scalar sq_objective(const ProblemInstance<Scalar>& inst, const Vector<Scalar>& p) {
  return inst.m().dot((p - inst.u()).cwiseAbs2()) / 2;
}

}  // namespace relaxpath
