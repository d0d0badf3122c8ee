#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "relaxpath/path.hpp"

namespace relaxpath {

/// Line identifiers: +-(j+1) for the lines a_j mu - c_j nu = +-1 and 0 for l0.
using LineId = int;

template <typename Scalar>
struct QueueEntry {
  Scalar nu;
  Index slot;

  friend bool operator==(const QueueEntry&, const QueueEntry&) = default;
};

/// Snapshot of the sweep: line order chi at nu_scan, live queue entries
/// sorted by (nu, slot), and the current l0 segment.
template <typename Scalar>
struct SweepState {
  std::vector<LineId> chi;
  std::vector<QueueEntry<Scalar>> queue;
  SegmentSums<Scalar> sums;
  SignVector s;
  Scalar nu_scan = 0;
  Scalar node_nu = 0;
  Scalar node_mu = 0;
};

template <typename Scalar>
struct SweepEvent {
  Scalar nu;
  Index slot;
  LineId lower;  // before the swap
  LineId upper;
  bool involves_l0;
};

struct SweepStats {
  Index pushes = 0;
  Index pops = 0;
  Index stale_pops = 0;
  Index events = 0;
  Index l0_events = 0;

  Index queue_operations() const { return pushes + pops; }
};

namespace detail {

/// Time at which the adjacent pair (lower, upper) next swaps, or none.
template <typename Scalar>
std::optional<Scalar> pair_event(const LineSet<Scalar>& L, LineId lower, LineId upper,
                                 const SegmentSums<Scalar>& sums, const SignVector& s,
                                 Scalar nu_scan, Scalar node_nu, Scalar node_mu,
                                 const Tolerances<Scalar>& tol) {
  const Scalar floor = nu_scan - tol.scaled_geom(nu_scan);
  if (lower == 0 || upper == 0) {
    const LineId other = lower == 0 ? upper : lower;
    const Index j = std::abs(other) - 1;
    const int sigma = other > 0 ? 1 : -1;
    const auto c = line_candidate(L, sums, s[j], j, sigma, node_nu, node_mu, tol);
    if (!c) return std::nullopt;
    // l0 below moves up through the line; l0 above moves down.
    const bool upward = c->direction == Direction::ToPlus || c->direction == Direction::ToZeroFromMinus;
    if (upward != (lower == 0)) return std::nullopt;
    if (!c->coincident && c->nu < floor) return std::nullopt;
    return c->nu;
  }
  const Index ja = std::abs(lower) - 1;
  const Index jb = std::abs(upper) - 1;
  const Scalar sa = lower > 0 ? 1 : -1;
  const Scalar sb = upper > 0 ? 1 : -1;
  const Scalar den = L.c[ja] * L.a[jb] - L.c[jb] * L.a[ja];
  if (!(den > 0)) return std::nullopt;
  const Scalar nu = (sb * L.a[ja] - sa * L.a[jb]) / den;
  if (!std::isfinite(nu) || nu < floor) return std::nullopt;
  return nu;
}

}  // namespace detail

/// Global sweep: keeps all 2n+1 lines ordered by mu along a
/// vertical scan line and processes adjacent crossings from a priority queue.
template <typename Scalar>
class GlobalTracker {
 public:
  using Observer = std::function<void(const GlobalTracker&, const SweepEvent<Scalar>&)>;

  explicit GlobalTracker(const ProblemInstance<Scalar>& inst, const Tolerances<Scalar>& tol = {})
      : builder_(make_lines(inst, Objective::Entropy), tol), tol_(tol) {
    const LineSet<Scalar>& L = builder_.lines();
    const Index n = L.n();
    chi_.reserve(std::size_t(2 * n + 1));
    for (LineId id = -LineId(n); id <= LineId(n); ++id) chi_.push_back(id);
    const auto& sums = builder_.sums();
    auto intercept = [&](LineId id) -> Scalar {
      if (id == 0) return -sums.M / sums.U;
      return Scalar(id > 0 ? 1 : -1) / L.a[std::abs(id) - 1];
    };
    auto slope = [&](LineId id) -> Scalar {
      if (id == 0) return sums.Q / sums.U;
      return L.c[std::abs(id) - 1] / L.a[std::abs(id) - 1];
    };
    std::sort(chi_.begin(), chi_.end(), [&](LineId x, LineId y) {
      const Scalar ix = intercept(x), iy = intercept(y);
      if (ix != iy) return ix < iy;
      const Scalar sx = slope(x), sy = slope(y);
      if (sx != sy) return sx < sy;
      return x < y;
    });
    const std::size_t slots = std::size_t(2 * n + 1);
    stamp_.assign(slots, 0);
    slot_nu_.assign(slots, std::nullopt);
    event_cap_ = (2 * n + 1) * (2 * n + 1) + 4 * n * n + 16;
    for (Index i = 1; i <= 2 * n; ++i) schedule(i);
    done_ = builder_.interior_empty();
  }

  const std::vector<LineId>& chi() const { return chi_; }
  const SegmentSums<Scalar>& sums() const { return builder_.sums(); }
  const SignVector& s() const { return builder_.s(); }
  Scalar nu_scan() const { return nu_scan_; }
  const SweepStats& stats() const { return stats_; }
  bool finished() const { return done_; }
  const LineSet<Scalar>& lines() const { return builder_.lines(); }
  const Tolerances<Scalar>& tolerances() const { return tol_; }

  /// Live queue entries sorted by (nu, slot).
  std::vector<QueueEntry<Scalar>> queue() const {
    std::vector<QueueEntry<Scalar>> out;
    for (std::size_t i = 1; i < slot_nu_.size(); ++i)
      if (slot_nu_[i]) out.push_back({*slot_nu_[i], Index(i)});
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
      return x.nu < y.nu || (x.nu == y.nu && x.slot < y.slot);
    });
    return out;
  }

  SweepState<Scalar> state() const {
    return {chi_, queue(), builder_.sums(), builder_.s(), nu_scan_, builder_.nu(), builder_.mu()};
  }

  /// mu of a line at nu.
  Scalar line_mu(LineId id, Scalar nu) const {
    if (id == 0) return builder_.sums().mu_at(nu);
    const Index j = std::abs(id) - 1;
    const LineSet<Scalar>& L = builder_.lines();
    return (Scalar(id > 0 ? 1 : -1) + L.c[j] * nu) / L.a[j];
  }

  /// Processes one queue event; returns false once the sweep has finished.
  bool step(const Observer& observer = {}) {
    if (done_) return false;
    Entry e;
    for (;;) {
      if (heap_.empty()) {
        done_ = true;
        return false;
      }
      std::pop_heap(heap_.begin(), heap_.end(), later);
      e = heap_.back();
      heap_.pop_back();
      ++stats_.pops;
      if (e.stamp == stamp_[std::size_t(e.slot)]) break;
      ++stats_.stale_pops;
    }
    if (++stats_.events > event_cap_)
      throw Error(Errc::IterationCapExceeded, "sweep exceeded its event budget");
    const Index i = e.slot;
    slot_nu_[std::size_t(i)].reset();
    ++stamp_[std::size_t(i)];
    const LineId lower = chi_[std::size_t(i - 1)];
    const LineId upper = chi_[std::size_t(i)];
    nu_scan_ = std::max(nu_scan_, e.nu);
    const bool l0 = lower == 0 || upper == 0;
    if (l0) {
      const LineId other = lower == 0 ? upper : lower;
      const Index j = std::abs(other) - 1;
      const auto c = builder_.candidate(j, other > 0 ? 1 : -1);
      if (!c) throw Error(Errc::IllegalTransition, "l0 event without a legal transition");
      builder_.apply(*c);
      ++stats_.l0_events;
    }
    std::swap(chi_[std::size_t(i - 1)], chi_[std::size_t(i)]);
    const Index last = Index(chi_.size()) - 1;
    for (Index k = std::max<Index>(1, i - 1); k <= std::min(last, i + 1); ++k) {
      invalidate(k);
      schedule(k);
    }
    if (builder_.interior_empty()) {
      done_ = true;
      heap_.clear();
      for (Index k = 1; k <= last; ++k) invalidate(k);
    }
    if (observer) observer(*this, {e.nu, i, lower, upper, l0});
    return !done_;
  }

  RelaxationPath<Scalar> run(const Observer& observer = {}) {
    while (step(observer)) {
    }
    return builder_.finish();
  }

  /// Expected event time of slot i recomputed from chi and the sums.
  std::optional<Scalar> expected_slot(Index i) const {
    return detail::pair_event(builder_.lines(), chi_[std::size_t(i - 1)], chi_[std::size_t(i)],
                              builder_.sums(), builder_.s(), nu_scan_, builder_.nu(), builder_.mu(),
                              tol_);
  }

 private:
  struct Entry {
    Scalar nu;
    Index slot;
    std::uint64_t stamp;
  };

  static bool later(const Entry& x, const Entry& y) {
    return x.nu > y.nu || (x.nu == y.nu && x.slot > y.slot);
  }

  void invalidate(Index i) {
    ++stamp_[std::size_t(i)];
    slot_nu_[std::size_t(i)].reset();
  }

  void schedule(Index i) {
    const auto nu = expected_slot(i);
    if (!nu) return;
    slot_nu_[std::size_t(i)] = *nu;
    heap_.push_back({*nu, i, stamp_[std::size_t(i)]});
    std::push_heap(heap_.begin(), heap_.end(), later);
    ++stats_.pushes;
  }

  detail::PathBuilder<Scalar> builder_;
  Tolerances<Scalar> tol_;
  std::vector<LineId> chi_;
  std::vector<Entry> heap_;
  std::vector<std::uint64_t> stamp_;
  std::vector<std::optional<Scalar>> slot_nu_;
  Scalar nu_scan_ = 0;
  SweepStats stats_;
  Index event_cap_ = 0;
  bool done_ = false;
};

template <typename Scalar>
RelaxationPath<Scalar> track_global(const ProblemInstance<Scalar>& inst,
                                    const Tolerances<Scalar>& tol = {}) {
  return GlobalTracker<Scalar>(inst, tol).run();
}

struct AuditReport {
  bool chi_is_permutation = true;
  bool chi_is_sorted = true;
  std::vector<std::string> discrepancies;

  bool ok() const { return chi_is_permutation && chi_is_sorted && discrepancies.empty(); }
};

/// Recomputes every adjacent-pair event from chi by brute force and compares
/// with the queue held in the state.
template <typename Scalar>
AuditReport queue_audit(const SweepState<Scalar>& state, const ProblemInstance<Scalar>& inst,
                        const Tolerances<Scalar>& tol = {}) {
  AuditReport rep;
  const Index n = inst.n();
  const LineSet<Scalar> L = make_lines(inst, Objective::Entropy);
  std::vector<int> seen(std::size_t(2 * n + 1), 0);
  if (Index(state.chi.size()) != 2 * n + 1) rep.chi_is_permutation = false;
  for (LineId id : state.chi) {
    if (std::abs(id) > n || seen[std::size_t(id + n)]++) rep.chi_is_permutation = false;
  }
  if (!rep.chi_is_permutation) return rep;

  auto mu_of = [&](LineId id, Scalar nu) -> Scalar {
    if (id == 0) return state.sums.U > 0 ? state.sums.mu_at(nu) : state.node_mu;
    const Index j = std::abs(id) - 1;
    return (Scalar(id > 0 ? 1 : -1) + L.c[j] * nu) / L.a[j];
  };
  for (std::size_t i = 1; i < state.chi.size(); ++i) {
    const Scalar lo = mu_of(state.chi[i - 1], state.nu_scan);
    const Scalar hi = mu_of(state.chi[i], state.nu_scan);
    if (lo > hi + 1e-9 * (1 + std::abs(lo) + std::abs(hi))) rep.chi_is_sorted = false;
  }

  std::vector<QueueEntry<Scalar>> expected;
  if (state.sums.U > 0 || state.queue.size() > 0) {
    for (Index i = 1; i <= 2 * n; ++i) {
      const auto nu = detail::pair_event(L, state.chi[std::size_t(i - 1)], state.chi[std::size_t(i)],
                                         state.sums, state.s, state.nu_scan, state.node_nu,
                                         state.node_mu, tol);
      if (nu) expected.push_back({*nu, i});
    }
  }
  std::sort(expected.begin(), expected.end(), [](const auto& x, const auto& y) {
    return x.nu < y.nu || (x.nu == y.nu && x.slot < y.slot);
  });
  if (state.sums.U > 0 && expected != state.queue) {
    for (const auto& e : expected)
      if (std::find(state.queue.begin(), state.queue.end(), e) == state.queue.end())
        rep.discrepancies.push_back("missing slot " + std::to_string(e.slot));
    for (const auto& e : state.queue)
      if (std::find(expected.begin(), expected.end(), e) == expected.end())
        rep.discrepancies.push_back("unexpected slot " + std::to_string(e.slot));
  }
  return rep;
}

}  // namespace relaxpath
