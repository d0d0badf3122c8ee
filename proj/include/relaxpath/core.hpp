#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "relaxpath/errors.hpp"
#include "relaxpath/tolerances.hpp"

namespace relaxpath {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Partition of the coordinates: -1 for I_-, 0 for I_0, +1 for I_+.
using SignVector = Eigen::VectorXi;

/// A validated relaxed maximum entropy instance: prior u, observed q and
/// multiplicities m, with m.u = m.q = 1.
template <typename Scalar>
class ProblemInstance {
 public:
  const Vector<Scalar>& u() const { return u_; }
  const Vector<Scalar>& q() const { return q_; }
  const Vector<Scalar>& m() const { return m_; }
  Index n() const { return u_.size(); }
  Scalar total_multiplicity() const { return m_.sum(); }

  static ProblemInstance validated(Vector<Scalar> u, Vector<Scalar> q, Vector<Scalar> m,
                                   const Tolerances<Scalar>& tol = {});

 private:
  ProblemInstance(Vector<Scalar> u, Vector<Scalar> q, Vector<Scalar> m)
      : u_(std::move(u)), q_(std::move(q)), m_(std::move(m)) {}

  Vector<Scalar> u_;
  Vector<Scalar> q_;
  Vector<Scalar> m_;
};

template <typename Scalar>
ProblemInstance<Scalar> ProblemInstance<Scalar>::validated(Vector<Scalar> u, Vector<Scalar> q,
                                                           Vector<Scalar> m,
                                                           const Tolerances<Scalar>& tol) {
  if (u.size() != q.size() || u.size() != m.size())
    throw Error(Errc::DimensionMismatch, "u, q and m must have equal length");
  if (u.size() < 1) throw Error(Errc::DimensionMismatch, "dimension must be at least 1");
  for (Index j = 0; j < u.size(); ++j) {
    if (!std::isfinite(u[j]) || !std::isfinite(q[j]) || !std::isfinite(m[j]))
      throw Error(Errc::InvalidInstance, "non-finite entry at coordinate " + std::to_string(j));
    if (!(u[j] > 0)) throw Error(Errc::NonPositivePrior, "u_" + std::to_string(j) + " <= 0");
    if (!(m[j] > 0)) throw Error(Errc::NonPositivePrior, "m_" + std::to_string(j) + " <= 0");
    if (q[j] < 0) throw Error(Errc::NegativeObserved, "q_" + std::to_string(j) + " < 0");
  }
  const Scalar mu_sum = m.dot(u);
  const Scalar mq_sum = m.dot(q);
  if (std::abs(mu_sum - 1) > tol.simplex)
    throw Error(Errc::NotNormalized, "m.u = " + std::to_string(double(mu_sum)));
  if (std::abs(mq_sum - 1) > tol.simplex)
    throw Error(Errc::NotNormalized, "m.q = " + std::to_string(double(mq_sum)));
  return ProblemInstance(std::move(u), std::move(q), std::move(m));
}

template <typename Scalar>
ProblemInstance<Scalar> validate_instance(const Vector<Scalar>& u, const Vector<Scalar>& q,
                                          const Vector<Scalar>& m,
                                          const Tolerances<Scalar>& tol = {}) {
  return ProblemInstance<Scalar>::validated(u, q, m, tol);
}

/// Signed multiplicity mass M of I_+ minus I_-, and the m-weighted u- and
/// q-mass U, Q of I_0. The current path segment lies on mu*U - nu*Q + M = 0.
template <typename Scalar>
struct SegmentSums {
  Scalar M = 0;
  Scalar U = 0;
  Scalar Q = 0;

  /// mu on the segment line at nu; requires U > 0.
  Scalar mu_at(Scalar nu) const { return (nu * Q - M) / U; }
  Scalar slope() const { return Q / U; }

  friend bool operator==(const SegmentSums&, const SegmentSums&) = default;
};

template <typename Scalar>
struct PrimalDualPoint {
  Scalar nu = 0;
  Scalar mu = 0;
  Vector<Scalar> p;
  Vector<Scalar> alpha;
  Scalar Z = 1;
  Scalar eta = 0;
  SignVector s;
};

template <typename Scalar>
constexpr Scalar theta(Scalar x) {
  return std::max(Scalar(-1), std::min(Scalar(1), x));
}

template <typename Scalar>
Scalar evaluate_G(const ProblemInstance<Scalar>& inst, Scalar nu, Scalar mu) {
  const auto& u = inst.u();
  const auto& q = inst.q();
  const auto& m = inst.m();
  Scalar g = 0;
  for (Index j = 0; j < inst.n(); ++j) g += m[j] * theta(mu * u[j] - nu * q[j]);
  return g;
}

/// Classifies each coordinate at (nu, mu) by comparing mu*u_j - nu*q_j with +-1.
template <typename Scalar>
SignVector partition_at(const ProblemInstance<Scalar>& inst, Scalar nu, Scalar mu,
                        Scalar tol = Tolerances<Scalar>{}.geom) {
  const Scalar band = tol * std::max(Scalar(1), std::abs(nu));
  SignVector s(inst.n());
  for (Index j = 0; j < inst.n(); ++j) {
    const Scalar v = mu * inst.u()[j] - nu * inst.q()[j];
    s[j] = v >= 1 - band ? 1 : (v <= -1 + band ? -1 : 0);
  }
  return s;
}

/// Direct evaluation of the segment sums for a given partition.
template <typename Scalar>
SegmentSums<Scalar> direct_sums(const ProblemInstance<Scalar>& inst, const SignVector& s) {
  SegmentSums<Scalar> sums;
  for (Index j = 0; j < inst.n(); ++j) {
    const Scalar mj = inst.m()[j];
    if (s[j] == 0) {
      sums.U += mj * inst.u()[j];
      sums.Q += mj * inst.q()[j];
    } else {
      sums.M += s[j] * mj;
    }
  }
  return sums;
}

template <typename Scalar>
struct MuSolution {
  Scalar mu;
  SignVector s;
};

/// Solves G(nu, .) = 0 for mu by bisection on [0, max_j (1 + nu q_j) / u_j].
///
/// When the zero set is an interval (nu >= nu_inf) any point of it is
/// returned; the primal solution does not depend on the choice.
template <typename Scalar>
MuSolution<Scalar> solve_mu_at(const ProblemInstance<Scalar>& inst, Scalar nu,
                               const Tolerances<Scalar>& tol = {}) {
  if (!(nu > 0) || !std::isfinite(nu)) throw Error(Errc::InvalidNu, "nu must be positive");
  Scalar lo = 0;
  Scalar hi = 0;
  for (Index j = 0; j < inst.n(); ++j)
    hi = std::max(hi, (1 + nu * inst.q()[j]) / inst.u()[j]);

  int it = 0;
  for (; it < tol.bisection_iterations; ++it) {
    const Scalar mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= std::numeric_limits<Scalar>::epsilon() * hi) break;
    if (evaluate_G(inst, nu, mid) < 0)
      lo = mid;
    else
      hi = mid;
  }
  if (it == tol.bisection_iterations)
    throw Error(Errc::NoConvergence, "bisection on mu did not converge");

  Scalar mu = hi;
  SignVector s = partition_at(inst, nu, mu, tol.geom);
  // Snap onto the segment line of the detected partition.
  const SegmentSums<Scalar> sums = direct_sums(inst, s);
  if (sums.U > 0) {
    const Scalar linear = sums.mu_at(nu);
    if (std::isfinite(linear) &&
        std::abs(evaluate_G(inst, nu, linear)) <= std::abs(evaluate_G(inst, nu, mu))) {
      mu = linear;
      s = partition_at(inst, nu, mu, tol.geom);
    }
  }
  return {mu, s};
}

namespace detail {

template <typename Scalar>
void require_on_path(const ProblemInstance<Scalar>& inst, Scalar nu, Scalar mu,
                     const Tolerances<Scalar>& tol) {
  if (!(nu > 0) || !std::isfinite(nu)) throw Error(Errc::InvalidNu, "nu must be positive");
  const Scalar g = evaluate_G(inst, nu, mu);
  if (!(std::abs(g) <= tol.residual * std::max(Scalar(1), nu)))
    throw Error(Errc::InfeasiblePoint,
                "G(nu, mu) = " + std::to_string(double(g)) + " is not zero");
}

}  // namespace detail

/// p_j = q_j + theta(mu u_j - nu q_j) / nu.
template <typename Scalar>
Vector<Scalar> primal_from(const ProblemInstance<Scalar>& inst, Scalar nu, Scalar mu,
                           const Tolerances<Scalar>& tol = {}) {
  detail::require_on_path(inst, nu, mu, tol);
  Vector<Scalar> p(inst.n());
  for (Index j = 0; j < inst.n(); ++j)
    p[j] = inst.q()[j] + theta(mu * inst.u()[j] - nu * inst.q()[j]) / nu;
  return p;
}

template <typename Scalar>
struct DualSolution {
  Vector<Scalar> alpha;
  Scalar Z;
  Scalar eta;
  SignVector s;
};

/// Sparse exponential tilt with p_j = u_j exp(alpha_j) / Z and alpha = 0 on I_0.
template <typename Scalar>
DualSolution<Scalar> dual_from(const ProblemInstance<Scalar>& inst, Scalar nu, Scalar mu,
                               const Tolerances<Scalar>& tol = {}) {
  const Vector<Scalar> p = primal_from(inst, nu, mu, tol);
  if (!(mu > 0)) throw Error(Errc::ZeroPrimal, "mu must be positive for a dual tilt");
  DualSolution<Scalar> d;
  d.s = partition_at(inst, nu, mu, tol.geom);
  d.Z = nu / mu;
  d.eta = std::log(mu / nu) + 1;
  d.alpha = Vector<Scalar>::Zero(inst.n());
  for (Index j = 0; j < inst.n(); ++j) {
    if (!(p[j] > 0))
      throw Error(Errc::ZeroPrimal, "p_" + std::to_string(j) + " is not positive");
    if (d.s[j] == 0) continue;
    const Scalar a = std::log(p[j] * d.Z / inst.u()[j]);
    // The sign is fixed by the binding side; only rounding can flip it.
    d.alpha[j] = d.s[j] > 0 ? std::min(a, Scalar(0)) : std::max(a, Scalar(0));
  }
  return d;
}

/// Solves at a single nu and assembles the full primal/dual record.
template <typename Scalar>
PrimalDualPoint<Scalar> solve_point(const ProblemInstance<Scalar>& inst, Scalar nu,
                                    const Tolerances<Scalar>& tol = {}) {
  const MuSolution<Scalar> sol = solve_mu_at(inst, nu, tol);
  PrimalDualPoint<Scalar> pt;
  pt.nu = nu;
  pt.mu = sol.mu;
  pt.p = primal_from(inst, nu, sol.mu, tol);
  DualSolution<Scalar> d = dual_from(inst, nu, sol.mu, tol);
  pt.alpha = std::move(d.alpha);
  pt.Z = d.Z;
  pt.eta = d.eta;
  pt.s = std::move(d.s);
  return pt;
}

enum class KktCondition { LowerBound, Interior, UpperBound, Infeasible };

template <typename Scalar>
struct KktReport {
  std::vector<KktCondition> condition;
  std::vector<bool> pass;
  Scalar worst_violation = 0;
  Index worst_coordinate = -1;

  bool ok() const { return std::all_of(pass.begin(), pass.end(), [](bool b) { return b; }); }
};

/// Checks the three optimality conditions for the entropy objective, with
/// d_j phi = m_j (log(p_j / u_j) + 1) compared against point.eta * m_j.
template <typename Scalar>
KktReport<Scalar> kkt_check(const ProblemInstance<Scalar>& inst,
                            const PrimalDualPoint<Scalar>& point, Scalar tol) {
  const Index n = inst.n();
  if (point.p.size() != n) throw Error(Errc::DimensionMismatch, "point has wrong dimension");
  const Scalar nu = point.nu;
  KktReport<Scalar> rep;
  rep.condition.resize(n);
  rep.pass.resize(n);
  for (Index j = 0; j < n; ++j) {
    const Scalar pj = point.p[j];
    if (!(pj > 0)) throw Error(Errc::ZeroPrimal, "p_" + std::to_string(j) + " is not positive");
    // Both sides divided by m_j > 0.
    const Scalar grad = std::log(pj / inst.u()[j]) + 1;
    const Scalar w = (pj - inst.q()[j]) * nu;
    const Scalar band = tol * std::max(Scalar(1), nu * inst.q()[j]);
    Scalar violation;
    KktCondition c;
    if (std::abs(w + 1) <= band) {
      c = KktCondition::LowerBound;
      violation = std::max(Scalar(0), point.eta - grad);
    } else if (std::abs(w - 1) <= band) {
      c = KktCondition::UpperBound;
      violation = std::max(Scalar(0), grad - point.eta);
    } else if (std::abs(w) < 1) {
      c = KktCondition::Interior;
      violation = std::abs(grad - point.eta);
    } else {
      c = KktCondition::Infeasible;
      violation = (std::abs(w) - 1) / nu;
    }
    rep.condition[j] = c;
    rep.pass[j] = c != KktCondition::Infeasible && violation <= tol;
    if (rep.worst_coordinate < 0 || violation > rep.worst_violation) {
      rep.worst_violation = violation;
      rep.worst_coordinate = j;
    }
  }
  return rep;
}

/// Per-coordinate accuracy weights: |p_j - q_j| <= delta_j / nu is the box of
/// the instance (u / delta, q / delta, m = delta). Recover p_j = delta_j * p~_j.
template <typename Scalar>
ProblemInstance<Scalar> weighted_transform(const Vector<Scalar>& u, const Vector<Scalar>& q,
                                           const Vector<Scalar>& delta,
                                           const Tolerances<Scalar>& tol = {}) {
  if (u.size() != q.size() || u.size() != delta.size())
    throw Error(Errc::DimensionMismatch, "u, q and delta must have equal length");
  for (Index j = 0; j < delta.size(); ++j)
    if (!(delta[j] > 0))
      throw Error(Errc::NonPositivePrior, "delta_" + std::to_string(j) + " <= 0");
  if (std::abs(u.sum() - 1) > tol.simplex || std::abs(q.sum() - 1) > tol.simplex)
    throw Error(Errc::NotNormalized, "u and q must lie in the plain simplex");
  return validate_instance<Scalar>(u.cwiseQuotient(delta), q.cwiseQuotient(delta), delta, tol);
}

}  // namespace relaxpath
