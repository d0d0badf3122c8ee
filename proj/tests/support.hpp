#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "relaxpath/relaxpath.hpp"

namespace testing {

using relaxpath::Index;
using Vec = Eigen::VectorXd;
using Instance = relaxpath::ProblemInstance<double>;
using Path = relaxpath::RelaxationPath<double>;

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(Index(xs.size()));
  Index j = 0;
  for (double x : xs) v[j++] = x;
  return v;
}

inline Instance toy() {
  return relaxpath::validate_instance<double>(vec({1. / 2, 1. / 8, 1. / 12}), vec({1. / 4, 1. / 3, 1. / 36}),
                                              vec({1, 2, 3}));
}

inline Instance pair() {
  return relaxpath::validate_instance<double>(vec({0.5, 0.5}), vec({0.7, 0.3}), vec({1, 1}));
}

inline Instance thirds() {
  return relaxpath::validate_instance<double>(vec({1. / 3, 1. / 3, 1. / 3}), vec({0.5, 0.3, 0.2}),
                                              vec({1, 1, 1}));
}

inline Instance sparse4() {
  return relaxpath::validate_instance<double>(vec({0.4, 0.25, 0.2, 0.15}), vec({0.7, 0.3, 0, 0}),
                                              vec({1, 1, 1, 1}));
}

enum class Family { Dense, Sparse, Uniform };

/// Seeded random instances. Masses are drawn away from zero and normalized
/// against the multiplicities.
class InstanceSampler {
 public:
  explicit InstanceSampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  Index integer(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng_); }

  Instance draw(Family f, Index n) {
    Vec m(n), u(n), q(n);
    for (Index j = 0; j < n; ++j) m[j] = f == Family::Uniform ? double(integer(1, 3)) : uniform(0.5, 2);
    for (Index j = 0; j < n; ++j) u[j] = f == Family::Uniform ? 1 : uniform(0.05, 1);
    if (f == Family::Sparse) {
      q.setZero();
      const Index k = integer(1, std::max<Index>(1, n / 4));
      for (Index t = 0; t < k; ++t) q[integer(0, n - 1)] = uniform(0.05, 1);
    } else {
      for (Index j = 0; j < n; ++j) q[j] = uniform(0, 1);
    }
    u /= m.dot(u);
    q /= m.dot(q);
    return relaxpath::validate_instance<double>(u, q, m);
  }

  Instance draw(Family f) { return draw(f, integer(2, 64)); }

  /// nu spread over the whole path, log-uniform in [1e-2, 1e4].
  double nu() { return std::pow(10.0, uniform(-2, 4)); }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Entropy minimizer on the box by bisection on the log multiplier:
/// p_j = clamp(u_j e^t, max(0, q_j - 1/nu), q_j + 1/nu) with m.p = 1.
inline Vec entropy_oracle(const Instance& inst, double nu) {
  using L = long double;
  const Index n = inst.n();
  const L w = 1.0L / nu;
  std::vector<L> lo_b(n), hi_b(n);
  L t_lo = 1e300, t_hi = -1e300;
  for (Index j = 0; j < n; ++j) {
    lo_b[j] = std::max(L(0), L(inst.q()[j]) - w);
    hi_b[j] = L(inst.q()[j]) + w;
    const L u = inst.u()[j];
    t_lo = std::min(t_lo, std::log(std::max(lo_b[j], L(1e-300)) / u));
    t_hi = std::max(t_hi, std::log(hi_b[j] / u));
  }
  t_lo -= 1;
  t_hi += 1;
  auto eval = [&](L t, Vec* out) {
    L mass = 0;
    for (Index j = 0; j < n; ++j) {
      const L p = std::clamp(L(inst.u()[j]) * std::exp(t), lo_b[j], hi_b[j]);
      mass += L(inst.m()[j]) * p;
      if (out) (*out)[j] = double(p);
    }
    return mass;
  };
  for (int it = 0; it < 300; ++it) {
    const L mid = (t_lo + t_hi) / 2;
    if (eval(mid, nullptr) < 1)
      t_lo = mid;
    else
      t_hi = mid;
  }
  Vec p(n);
  eval((t_lo + t_hi) / 2, &p);
  return p;
}

inline bool same_breakpoints(const Path& a, const Path& b, double tol) {
  if (a.kappa() != b.kappa()) return false;
  for (Index k = 0; k < a.kappa(); ++k) {
    const auto& x = a.breakpoints[std::size_t(k)];
    const auto& y = b.breakpoints[std::size_t(k)];
    const double scale = std::max(1.0, std::abs(x.nu));
    if (std::abs(x.nu - y.nu) > tol * scale) return false;
    if (std::abs(x.mu - y.mu) > tol * std::max(1.0, std::abs(x.mu))) return false;
    if (x.transitions != y.transitions) return false;
  }
  return true;
}

}  // namespace testing
