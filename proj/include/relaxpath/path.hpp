#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "relaxpath/core.hpp"
#include "relaxpath/lines.hpp"

namespace relaxpath {

template <typename Scalar>
struct Breakpoint {
  Scalar nu = 0;
  Scalar mu = 0;
  std::vector<Transition> transitions;
};

/// Piecewise-linear mu(nu). Segment k lies between breakpoints k-1 and k
/// (segment 0 starts at the origin) and has sums segment(k).
template <typename Scalar>
struct RelaxationPath {
  Objective objective = Objective::Entropy;
  Index n = 0;
  SegmentSums<Scalar> initial_sums;
  std::vector<Breakpoint<Scalar>> breakpoints;
  std::vector<SegmentSums<Scalar>> segment_sums;  // sums after each breakpoint
  Scalar nu_inf = std::numeric_limits<Scalar>::infinity();
  Scalar mu_inf = std::numeric_limits<Scalar>::infinity();
  // Per coordinate, the (segment, sign) pairs where its sign changes.
  std::vector<std::vector<std::pair<Index, int>>> history;

  Index kappa() const { return Index(breakpoints.size()); }
  Index segments() const { return kappa() + 1; }

  const SegmentSums<Scalar>& segment(Index k) const {
    return k == 0 ? initial_sums : segment_sums[std::size_t(k - 1)];
  }

  /// Index of the last segment with a non-empty interior.
  Index terminal_segment() const {
    Index k = kappa();
    while (k > 0 && !(segment(k).U > 0)) --k;
    return k;
  }

  Scalar segment_start(Index k) const { return k == 0 ? Scalar(0) : breakpoints[k - 1].nu; }
  Scalar segment_end(Index k) const {
    return k < kappa() ? breakpoints[k].nu : std::numeric_limits<Scalar>::infinity();
  }
};

/// Rebuilds the per-coordinate sign history from the transition records.
template <typename Scalar>
void index_history(RelaxationPath<Scalar>& path) {
  path.history.assign(std::size_t(path.n), {});
  for (Index k = 0; k < path.kappa(); ++k)
    for (const Transition& t : path.breakpoints[k].transitions)
      path.history[std::size_t(t.coord)].emplace_back(k + 1, to_sign(t.direction));
}

/// Sign vector on segment k, in O(n log kappa).
template <typename Scalar>
SignVector segment_partition(const RelaxationPath<Scalar>& path, Index k) {
  SignVector s = SignVector::Zero(path.n);
  for (Index j = 0; j < path.n; ++j) {
    const auto& h = path.history[std::size_t(j)];
    auto it = std::upper_bound(h.begin(), h.end(), k,
                               [](Index key, const std::pair<Index, int>& e) { return key < e.first; });
    if (it != h.begin()) s[j] = std::prev(it)->second;
  }
  return s;
}

namespace detail {

/// Shared state of the trackers: current partition, sums, node and the
/// breakpoints recorded so far.
template <typename Scalar>
class PathBuilder {
 public:
  PathBuilder(LineSet<Scalar> lines, const Tolerances<Scalar>& tol)
      : L_(std::move(lines)), tol_(tol), s_(SignVector::Zero(L_.n())), i0_(L_.n()) {
    sums_ = direct_sums(L_, s_);
    path_.objective = L_.objective;
    path_.n = L_.n();
    path_.initial_sums = sums_;
    const Index n = L_.n();
    cap_ = 4 * n * n + 16;
    refresh_every_ = 10 * n;
  }

  const LineSet<Scalar>& lines() const { return L_; }
  const Tolerances<Scalar>& tol() const { return tol_; }
  const SignVector& s() const { return s_; }
  const SegmentSums<Scalar>& sums() const { return sums_; }
  Scalar nu() const { return nu_; }
  Scalar mu() const { return mu_; }
  bool interior_empty() const { return i0_ == 0; }

  std::optional<Candidate<Scalar>> candidate(Index j, int sigma) const {
    return line_candidate(L_, sums_, s_[j], j, sigma, nu_, mu_, tol_);
  }

  void apply(const Candidate<Scalar>& c) {
    if (++count_ > cap_)
      throw Error(Errc::IterationCapExceeded, "more than " + std::to_string(cap_) + " transitions");
    if (L_.objective == Objective::Entropy && to_sign(c.direction) < 0 && L_.c[c.coord] == 0)
      throw Error(Errc::IllegalTransition, "a zero-q coordinate cannot enter I_-");
    auto& bps = path_.breakpoints;
    if (!bps.empty() && c.nu <= bps.back().nu + tol_.scaled_geom(bps.back().nu)) {
      bps.back().transitions.push_back({c.coord, c.direction});
    } else {
      const Scalar nu = std::max(c.nu, nu_);
      const Scalar mu = sums_.mu_at(nu);
      bps.push_back({nu, mu, {{c.coord, c.direction}}});
      path_.segment_sums.push_back(sums_);
      nu_ = nu;
      mu_ = mu;
    }
    i0_ += (to_sign(c.direction) == 0) - (from_sign(c.direction) == 0);
    apply_transition_inplace(L_, sums_, s_, c.coord, c.direction);
    if (i0_ == 0 || count_ % refresh_every_ == 0) sums_ = direct_sums(L_, s_);
    path_.segment_sums.back() = sums_;
  }

  RelaxationPath<Scalar> finish() {
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    for (auto& bp : path_.breakpoints)
      std::sort(bp.transitions.begin(), bp.transitions.end(),
                [](const Transition& x, const Transition& y) {
                  return x.coord < y.coord ||
                         (x.coord == y.coord && from_sign(x.direction) < from_sign(y.direction));
                });
    if (i0_ == 0) {
      path_.nu_inf = path_.breakpoints.back().nu;
      path_.mu_inf = path_.breakpoints.back().mu;
    } else {
      const auto& last = path_.segment(path_.kappa());
      path_.nu_inf = inf;
      if (std::abs(last.Q) <= tol_.parallel * L_.c_scale)
        path_.mu_inf = -last.M / last.U;
      else
        path_.mu_inf = last.Q > 0 ? inf : -inf;
    }
    index_history(path_);
    return std::move(path_);
  }

 private:
  LineSet<Scalar> L_;
  Tolerances<Scalar> tol_;
  SignVector s_;
  SegmentSums<Scalar> sums_;
  Index i0_;
  Scalar nu_ = 0;
  Scalar mu_ = 0;
  Index count_ = 0;
  Index cap_ = 0;
  Index refresh_every_ = 1;
  RelaxationPath<Scalar> path_;
};

template <typename Scalar>
RelaxationPath<Scalar> track_lines_local(const LineSet<Scalar>& L, const Tolerances<Scalar>& tol) {
  PathBuilder<Scalar> b(L, tol);
  std::vector<Candidate<Scalar>> cs;
  while (!b.interior_empty()) {
    cs.clear();
    for (Index j = 0; j < L.n(); ++j)
      for (int sigma : {-1, 1})
        if (auto c = b.candidate(j, sigma)) cs.push_back(*c);
    const auto best = pick_candidate(cs, tol);
    if (!best) break;
    b.apply(*best);
  }
  return b.finish();
}

}  // namespace detail

/// Algorithm 1: scans all 2n lines for the nearest legal crossing of l0.
template <typename Scalar>
RelaxationPath<Scalar> track_local(const ProblemInstance<Scalar>& inst,
                                   const Tolerances<Scalar>& tol = {}) {
  const LineSet<Scalar> L = make_lines(inst, Objective::Entropy);
  return detail::track_lines_local(L, tol);
}

/// Same path as track_local. Zero-q coordinates give horizontal lines
/// mu = 1/u_j that l0 meets in decreasing u_j order, so only the next one is scanned.
template <typename Scalar>
RelaxationPath<Scalar> track_sparse(const ProblemInstance<Scalar>& inst,
                                    const Tolerances<Scalar>& tol = {}) {
  const LineSet<Scalar> L = make_lines(inst, Objective::Entropy);
  std::vector<Index> dense;
  std::vector<Index> flat;
  for (Index j = 0; j < inst.n(); ++j) (L.c[j] != 0 ? dense : flat).push_back(j);
  std::sort(flat.begin(), flat.end(), [&](Index x, Index y) {
    return L.a[x] > L.a[y] || (L.a[x] == L.a[y] && x < y);
  });

  detail::PathBuilder<Scalar> b(L, tol);
  std::vector<Candidate<Scalar>> cs;
  std::size_t next = 0;
  while (!b.interior_empty()) {
    cs.clear();
    for (Index j : dense)
      for (int sigma : {-1, 1})
        if (auto c = b.candidate(j, sigma)) cs.push_back(*c);
    while (next < flat.size() && b.s()[flat[next]] != 0) ++next;
    Scalar lo = std::numeric_limits<Scalar>::infinity();
    for (const auto& c : cs) lo = std::min(lo, c.nu);
    for (std::size_t k = next; k < flat.size(); ++k) {
      const Index j = flat[k];
      if (b.s()[j] != 0) continue;
      auto c = b.candidate(j, 1);
      if (!c) break;
      if (k > next && c->nu > lo + tol.scaled_geom(lo)) break;
      lo = std::min(lo, c->nu);
      cs.push_back(*c);
    }
    const auto best = pick_candidate(cs, tol);
    if (!best) break;
    b.apply(*best);
  }
  return b.finish();
}

template <typename Scalar>
bool is_uniform_prior(const ProblemInstance<Scalar>& inst, const Tolerances<Scalar>& tol = {}) {
  const Scalar u0 = 1 / inst.total_multiplicity();
  for (Index j = 0; j < inst.n(); ++j)
    if (std::abs(inst.u()[j] - u0) > tol.geom) return false;
  return true;
}

/// Uniform prior: l0 meets the -j lines in decreasing q order and the +j
/// lines in increasing q order, so only the two frontier coordinates compete.
template <typename Scalar>
RelaxationPath<Scalar> track_uniform(const ProblemInstance<Scalar>& inst,
                                     const Tolerances<Scalar>& tol = {}) {
  if (!is_uniform_prior(inst, tol))
    throw Error(Errc::NonUniformPrior, "track_uniform requires u_j = 1 / sum(m)");
  const LineSet<Scalar> L = make_lines(inst, Objective::Entropy);
  std::vector<Index> order(std::size_t(inst.n()));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return inst.q()[x] > inst.q()[y]; });

  detail::PathBuilder<Scalar> b(L, tol);
  std::vector<Candidate<Scalar>> cs;
  std::ptrdiff_t lo = 0;
  std::ptrdiff_t hi = std::ptrdiff_t(order.size()) - 1;
  while (!b.interior_empty()) {
    while (lo <= hi && b.s()[order[lo]] != 0) ++lo;
    while (hi >= lo && b.s()[order[hi]] != 0) --hi;
    if (lo > hi) break;
    cs.clear();
    if (auto c = b.candidate(order[lo], -1)) cs.push_back(*c);
    if (auto c = b.candidate(order[hi], 1)) cs.push_back(*c);
    const auto best = pick_candidate(cs, tol);
    if (!best) break;
    b.apply(*best);
  }
  return b.finish();
}

/// Nearest legal crossing of the current segment, as scanned by track_local.
template <typename Scalar>
std::optional<Candidate<Scalar>> next_intersection(const SegmentSums<Scalar>& sums,
                                                   const SignVector& s,
                                                   const ProblemInstance<Scalar>& inst,
                                                   Scalar nu_current,
                                                   const Tolerances<Scalar>& tol = {}) {
  if (s.size() != inst.n()) throw Error(Errc::DimensionMismatch, "sign vector length");
  if (!(s.array() == 0).any() || !(sums.U > 0))
    throw Error(Errc::EmptyInterior, "I_0 is empty; the path has terminated");
  const LineSet<Scalar> L = make_lines(inst, Objective::Entropy);
  const Scalar mu_current = sums.mu_at(nu_current);
  std::vector<Candidate<Scalar>> cs;
  for (Index j = 0; j < inst.n(); ++j)
    for (int sigma : {-1, 1})
      if (auto c = line_candidate(L, sums, s[j], j, sigma, nu_current, mu_current, tol))
        cs.push_back(*c);
  return pick_candidate(cs, tol);
}

/// One transition of Algorithm 1 on a copy of (sums, s).
template <typename Scalar>
std::pair<SegmentSums<Scalar>, SignVector> apply_transition(SegmentSums<Scalar> sums,
                                                            SignVector s,
                                                            const ProblemInstance<Scalar>& inst,
                                                            Index j, Direction d) {
  if (s.size() != inst.n()) throw Error(Errc::DimensionMismatch, "sign vector length");
  const LineSet<Scalar> L = make_lines(inst, Objective::Entropy);
  apply_transition_inplace(L, sums, s, j, d);
  return {sums, std::move(s)};
}

template <typename Scalar>
struct PathPoint {
  Scalar mu;
  SignVector s;
  SegmentSums<Scalar> sums;
  Index segment;
};

/// Segment containing nu; a breakpoint belongs to the segment it opens.
template <typename Scalar>
Index locate_segment(const RelaxationPath<Scalar>& path, Scalar nu) {
  auto it = std::upper_bound(path.breakpoints.begin(), path.breakpoints.end(), nu,
                             [](Scalar v, const Breakpoint<Scalar>& bp) { return v < bp.nu; });
  return Index(it - path.breakpoints.begin());
}

/// mu(nu) in O(log kappa). Beyond nu_inf the terminal line is used.
template <typename Scalar>
Scalar path_mu(const RelaxationPath<Scalar>& path, Scalar nu) {
  const Index k = locate_segment(path, nu);
  const auto& sums = path.segment(k);
  if (sums.U > 0) return sums.mu_at(nu);
  return path.segment(path.terminal_segment()).mu_at(nu);
}

template <typename Scalar>
PathPoint<Scalar> path_eval(const RelaxationPath<Scalar>& path, Scalar nu) {
  if (!(nu >= 0)) throw Error(Errc::InvalidNu, "nu must be nonnegative");
  const Index k = locate_segment(path, nu);
  return {path_mu(path, nu), segment_partition(path, k), path.segment(k), k};
}

/// 1 / max_j |u_j - q_j|, the first breakpoint of every path.
template <typename Scalar>
Scalar first_breakpoint_check(const ProblemInstance<Scalar>& inst) {
  const Scalar d = (inst.u() - inst.q()).cwiseAbs().maxCoeff();
  if (!(d > 0)) throw Error(Errc::DegenerateInstance, "u equals q");
  return 1 / d;
}

/// Primal point of an entropy path at nu.
template <typename Scalar>
Vector<Scalar> path_primal(const ProblemInstance<Scalar>& inst, const RelaxationPath<Scalar>& path,
                           Scalar nu) {
  if (!(nu > 0)) throw Error(Errc::InvalidNu, "nu must be positive");
  const Scalar mu = path_mu(path, nu);
  Vector<Scalar> p(inst.n());
  for (Index j = 0; j < inst.n(); ++j)
    p[j] = inst.q()[j] + theta(mu * inst.u()[j] - nu * inst.q()[j]) / nu;
  return p;
}

}  // namespace relaxpath
