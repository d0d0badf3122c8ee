#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "relaxpath/core.hpp"

namespace relaxpath {

/// Sparse tilt of one cascade stage: p_j = prior_j exp(alpha_j) / Z.
template <typename Scalar>
struct CascadeStage {
  std::vector<std::pair<Index, Scalar>> alpha;
  Scalar Z = 1;
  Scalar nu = 0;
  Index support() const { return Index(alpha.size()); }
};

template <typename Scalar>
struct CascadeResult {
  Vector<Scalar> p;
  CascadeStage<Scalar> stage;
};

/// Solves the stage instance (u = prior, q, m) at nu and records its tilt.
template <typename Scalar>
CascadeResult<Scalar> cascade_step(const Vector<Scalar>& prior, const Vector<Scalar>& q,
                                   const Vector<Scalar>& m, Scalar nu,
                                   const Tolerances<Scalar>& tol = {}) {
  const auto inst = validate_instance(prior, q, m, tol);
  const auto pt = solve_point(inst, nu, tol);
  CascadeResult<Scalar> out;
  out.p = pt.p;
  out.stage.Z = pt.Z;
  out.stage.nu = nu;
  for (Index j = 0; j < inst.n(); ++j)
    if (pt.s[j] != 0) out.stage.alpha.emplace_back(j, pt.alpha[j]);
  return out;
}

/// Rebuilds the last distribution of a chain from u and the stored tilts.
template <typename Scalar>
Vector<Scalar> cascade_eval(const Vector<Scalar>& u, const std::vector<CascadeStage<Scalar>>& stages,
                            const Vector<Scalar>& m, const Tolerances<Scalar>& tol = {}) {
  if (m.size() != u.size()) throw Error(Errc::DimensionMismatch, "u and m must have equal length");
  if (stages.empty()) {
    if (!(std::abs(m.dot(u) - 1) <= tol.simplex)) throw Error(Errc::InconsistentChain, "u is not normalized");
    return u;
  }
  Vector<Scalar> log_p = u.array().log().matrix();
  Scalar log_z = 0;
  for (const auto& st : stages) {
    if (!(st.Z > 0)) throw Error(Errc::InconsistentChain, "stage normalizer must be positive");
    for (const auto& [j, a] : st.alpha) {
      if (j < 0 || j >= u.size()) throw Error(Errc::InconsistentChain, "tilt index out of range");
      log_p[j] += a;
    }
    log_z += std::log(st.Z);
  }
  Vector<Scalar> p = (log_p.array() - log_z).exp().matrix();
  const Scalar mass = m.dot(p);
  if (!(std::abs(mass - 1) <= tol.simplex))
    throw Error(Errc::InconsistentChain, "reconstruction has mass " + std::to_string(double(mass)));
  return p;
}

template <typename Scalar>
Vector<Scalar> cascade_eval(const Vector<Scalar>& u, const std::vector<CascadeStage<Scalar>>& stages) {
  const Vector<Scalar> m = Vector<Scalar>::Ones(u.size());
  return cascade_eval(u, stages, m);
}

}  // namespace relaxpath
