#pragma once

#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "relaxpath/core.hpp"

namespace relaxpath {

enum class Objective { Entropy, Squared };

constexpr std::string_view to_string(Objective o) {
  return o == Objective::Entropy ? "entropy" : "squared";
}

/// The 2n lines a_j mu - c_j nu = +-1 of a path problem, with weights m_j.
///
/// Entropy: a = u, c = q. Squared loss: a = 1, c = q - u.
template <typename Scalar>
struct LineSet {
  Objective objective = Objective::Entropy;
  Vector<Scalar> a;
  Vector<Scalar> c;
  Vector<Scalar> m;
  Scalar a_scale = 0;  // sum m |a|
  Scalar c_scale = 0;  // sum m |c|

  Index n() const { return a.size(); }

  Scalar value(Index j, Scalar nu, Scalar mu) const { return mu * a[j] - nu * c[j]; }
};

template <typename Scalar>
LineSet<Scalar> make_lines(const ProblemInstance<Scalar>& inst, Objective objective) {
  LineSet<Scalar> L;
  L.objective = objective;
  L.m = inst.m();
  if (objective == Objective::Entropy) {
    L.a = inst.u();
    L.c = inst.q();
  } else {
    L.a = Vector<Scalar>::Ones(inst.n());
    L.c = inst.q() - inst.u();
  }
  L.a_scale = L.m.dot(L.a.cwiseAbs());
  L.c_scale = L.m.dot(L.c.cwiseAbs());
  return L;
}

enum class Direction { ToPlus, ToMinus, ToZeroFromPlus, ToZeroFromMinus };

constexpr std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::ToPlus: return "to_plus";
    case Direction::ToMinus: return "to_minus";
    case Direction::ToZeroFromPlus: return "to_zero_from_plus";
    case Direction::ToZeroFromMinus: return "to_zero_from_minus";
  }
  return "?";
}

constexpr int from_sign(Direction d) {
  return d == Direction::ToZeroFromPlus ? 1 : (d == Direction::ToZeroFromMinus ? -1 : 0);
}

constexpr int to_sign(Direction d) {
  return d == Direction::ToPlus ? 1 : (d == Direction::ToMinus ? -1 : 0);
}

/// Sign of the line +-j a transition lies on.
constexpr int line_sign(Direction d) {
  return (d == Direction::ToPlus || d == Direction::ToZeroFromPlus) ? 1 : -1;
}

struct Transition {
  Index coord;
  Direction direction;

  friend bool operator==(const Transition&, const Transition&) = default;
};

template <typename Scalar>
SegmentSums<Scalar> direct_sums(const LineSet<Scalar>& L, const SignVector& s) {
  SegmentSums<Scalar> sums;
  for (Index j = 0; j < L.n(); ++j) {
    if (s[j] == 0) {
      sums.U += L.m[j] * L.a[j];
      sums.Q += L.m[j] * L.c[j];
    } else {
      sums.M += s[j] * L.m[j];
    }
  }
  return sums;
}

/// Moves coordinate j across one cap and updates M, U, Q incrementally.
template <typename Scalar>
void apply_transition_inplace(const LineSet<Scalar>& L, SegmentSums<Scalar>& sums, SignVector& s,
                              Index j, Direction d) {
  if (j < 0 || j >= L.n()) throw Error(Errc::IllegalTransition, "coordinate out of range");
  const int from = from_sign(d);
  const int to = to_sign(d);
  if (s[j] != from)
    throw Error(Errc::IllegalTransition, "coordinate " + std::to_string(j) + " has sign " +
                                             std::to_string(s[j]) + ", expected " +
                                             std::to_string(from));
  const Scalar mj = L.m[j];
  sums.M += (to - from) * mj;
  if (from == 0) {
    sums.U -= mj * L.a[j];
    sums.Q -= mj * L.c[j];
  } else {
    sums.U += mj * L.a[j];
    sums.Q += mj * L.c[j];
  }
  s[j] = to;
}

template <typename Scalar>
struct Candidate {
  Scalar nu;
  Index coord;
  Direction direction;
  bool coincident = false;

  int sign() const { return line_sign(direction); }
};

/// Intersection of the current l0 segment with the line sigma*(j+1), if the
/// crossing is a legal transition at or after (nu_cur, mu_cur).
template <typename Scalar>
std::optional<Candidate<Scalar>> line_candidate(const LineSet<Scalar>& L,
                                                const SegmentSums<Scalar>& sums, int sj, Index j,
                                                int sigma, Scalar nu_cur, Scalar mu_cur,
                                                const Tolerances<Scalar>& tol) {
  if (sj == -sigma) return std::nullopt;
  const Scalar a = L.a[j];
  const Scalar c = L.c[j];
  const Scalar den = sums.Q * a - sums.U * c;
  const Scalar scale = a * L.c_scale + std::abs(c) * L.a_scale;
  if (std::abs(den) <= tol.parallel * scale) {
    if (sj != 0) return std::nullopt;
    const Scalar v = mu_cur * a - nu_cur * c;
    const Scalar band = tol.coincide * (1 + std::abs(mu_cur * a) + std::abs(nu_cur * c));
    if (std::abs(v - sigma) > band) return std::nullopt;
    return Candidate<Scalar>{nu_cur, j, sigma > 0 ? Direction::ToPlus : Direction::ToMinus, true};
  }
  Direction d;
  if (sigma > 0) {
    if (sj == 0 && den > 0)
      d = Direction::ToPlus;
    else if (sj == 1 && den < 0)
      d = Direction::ToZeroFromPlus;
    else
      return std::nullopt;
  } else {
    if (sj == 0 && den < 0)
      d = Direction::ToMinus;
    else if (sj == -1 && den > 0)
      d = Direction::ToZeroFromMinus;
    else
      return std::nullopt;
  }
  const Scalar nu = (sums.M * a + sums.U * sigma) / den;
  if (!std::isfinite(nu) || nu < nu_cur - tol.scaled_geom(nu_cur)) return std::nullopt;
  return Candidate<Scalar>{nu, j, d, false};
}

/// Picks the candidate with the smallest nu; candidates within tolerance of
/// the minimum are tied and resolved by smaller coordinate, then negative line.
template <typename Scalar>
std::optional<Candidate<Scalar>> pick_candidate(const std::vector<Candidate<Scalar>>& cs,
                                                const Tolerances<Scalar>& tol) {
  if (cs.empty()) return std::nullopt;
  Scalar lo = cs.front().nu;
  for (const auto& c : cs) lo = std::min(lo, c.nu);
  const Scalar band = tol.scaled_geom(lo);
  const Candidate<Scalar>* best = nullptr;
  for (const auto& c : cs) {
    if (c.nu > lo + band) continue;
    if (!best || c.coord < best->coord || (c.coord == best->coord && c.sign() < best->sign()))
      best = &c;
  }
  return *best;
}

}  // namespace relaxpath
