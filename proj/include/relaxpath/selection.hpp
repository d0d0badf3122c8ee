#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "relaxpath/path.hpp"

namespace relaxpath {

template <typename Scalar>
void validate_counts(const ProblemInstance<Scalar>& inst, const Vector<Scalar>& r) {
  if (r.size() != inst.n()) throw Error(Errc::DimensionMismatch, "r must have length n");
  for (Index j = 0; j < r.size(); ++j)
    if (!(r[j] >= 0) || !std::isfinite(r[j]))
      throw Error(Errc::InvalidArgument, "validation counts must be finite and nonnegative");
  if (!(r.sum() > 0)) throw Error(Errc::InvalidArgument, "validation counts sum to zero");
}

/// One path segment seen in lambda = 1/nu, with its partition.
template <typename Scalar>
struct PathSegment {
  Index index = 0;
  Scalar nu_lo = 0;
  Scalar nu_hi = std::numeric_limits<Scalar>::infinity();
  SegmentSums<Scalar> sums;
  SignVector s;

  Index support() const { return Index((s.array() != 0).count()); }
};

template <typename Scalar>
std::vector<PathSegment<Scalar>> path_segments(const RelaxationPath<Scalar>& path) {
  std::vector<PathSegment<Scalar>> out;
  SignVector s = SignVector::Zero(path.n);
  for (Index k = 0; k < path.segments(); ++k) {
    if (k > 0)
      for (const Transition& t : path.breakpoints[k - 1].transitions) s[t.coord] = to_sign(t.direction);
    out.push_back({k, path.segment_start(k), path.segment_end(k), path.segment(k), s});
  }
  return out;
}

namespace detail {

/// p(lambda) on a segment: q + lambda on I_+, q - lambda on I_-, u (Q - M lambda)/U on I_0.
template <typename Scalar>
Scalar segment_probability(const ProblemInstance<Scalar>& inst, const PathSegment<Scalar>& seg,
                           Index j, Scalar lambda) {
  const int sj = seg.s[j];
  if (sj > 0) return inst.q()[j] + lambda;
  if (sj < 0) return inst.q()[j] - lambda;
  return inst.u()[j] * (seg.sums.Q - seg.sums.M * lambda) / seg.sums.U;
}

template <typename Scalar>
Scalar segment_loss(const ProblemInstance<Scalar>& inst, const PathSegment<Scalar>& seg,
                    const Vector<Scalar>& r, Scalar lambda) {
  Scalar loss = 0;
  for (Index j = 0; j < inst.n(); ++j) {
    if (r[j] == 0) continue;
    const Scalar p = segment_probability(inst, seg, j, lambda);
    if (!(p > 0))
      throw Error(Errc::ZeroProbability, "p_" + std::to_string(j) + " = 0 with positive count");
    loss -= r[j] * std::log(p);
  }
  return loss;
}

template <typename Scalar>
Scalar segment_derivative(const ProblemInstance<Scalar>& inst, const PathSegment<Scalar>& seg,
                          const Vector<Scalar>& r, Scalar lambda) {
  Scalar d = 0;
  Scalar r0 = 0;
  for (Index j = 0; j < inst.n(); ++j) {
    if (r[j] == 0) continue;
    const int sj = seg.s[j];
    if (sj > 0)
      d -= r[j] / (inst.q()[j] + lambda);
    else if (sj < 0)
      d += r[j] / (inst.q()[j] - lambda);
    else
      r0 += r[j];
  }
  if (r0 > 0 && seg.sums.M != 0) d += seg.sums.M / (seg.sums.Q - seg.sums.M * lambda) * r0;
  return d;
}

}  // namespace detail

/// Negative log-likelihood of the counts r under p(1/lambda).
template <typename Scalar>
Scalar validation_loss(const ProblemInstance<Scalar>& inst, const RelaxationPath<Scalar>& path,
                       const Vector<Scalar>& r, Scalar lambda) {
  if (!(lambda > 0)) throw Error(Errc::InvalidArgument, "lambda must be positive");
  validate_counts(inst, r);
  const Scalar nu = 1 / lambda;
  const Index k = locate_segment(path, nu);
  PathSegment<Scalar> seg{k, path.segment_start(k), path.segment_end(k), path.segment(k),
                          segment_partition(path, k)};
  if (!(seg.sums.U > 0)) {
    // Frozen partition beyond nu_inf: p = q + s / nu.
    Scalar loss = 0;
    for (Index j = 0; j < inst.n(); ++j) {
      if (r[j] == 0) continue;
      const Scalar p = inst.q()[j] + seg.s[j] * lambda;
      if (!(p > 0))
        throw Error(Errc::ZeroProbability, "p_" + std::to_string(j) + " = 0 with positive count");
      loss -= r[j] * std::log(p);
    }
    return loss;
  }
  return detail::segment_loss(inst, seg, r, lambda);
}

template <typename Scalar>
struct SegmentOptimum {
  Scalar lambda;
  Scalar loss;
  bool open_infimum = false;  // the loss still decreases at lambda_min
};

/// Minimizes the convex segment loss over its lambda interval intersected with
/// [lambda_min, 1] by bisection on the derivative. None if the interval is empty.
template <typename Scalar>
std::optional<SegmentOptimum<Scalar>> segment_minimize(const ProblemInstance<Scalar>& inst,
                                                       const PathSegment<Scalar>& seg,
                                                       const Vector<Scalar>& r,
                                                       Scalar lambda_min = Scalar(1e-9),
                                                       int iterations = 200) {
  Scalar lo = std::max(seg.nu_hi == std::numeric_limits<Scalar>::infinity() ? Scalar(0) : 1 / seg.nu_hi,
                       lambda_min);
  Scalar hi = seg.nu_lo > 0 ? std::min(1 / seg.nu_lo, Scalar(1)) : Scalar(1);
  for (Index j = 0; j < inst.n(); ++j)
    if (seg.s[j] < 0 && r[j] > 0)
      hi = std::min(hi, std::nextafter(inst.q()[j], Scalar(0)));
  if (lo > hi) return std::nullopt;

  Scalar lambda;
  const Scalar dlo = detail::segment_derivative(inst, seg, r, lo);
  const Scalar dhi = detail::segment_derivative(inst, seg, r, hi);
  if (dlo >= 0) {
    lambda = lo;
  } else if (dhi <= 0) {
    lambda = hi;
  } else {
    Scalar a = lo, b = hi;
    for (int it = 0; it < iterations; ++it) {
      const Scalar mid = a + (b - a) / 2;
      if (mid <= a || mid >= b) break;
      if (detail::segment_derivative(inst, seg, r, mid) < 0)
        a = mid;
      else
        b = mid;
    }
    lambda = a + (b - a) / 2;
  }
  const bool open = lambda == lo && lo == lambda_min && dlo > 0;
  return SegmentOptimum<Scalar>{lambda, detail::segment_loss(inst, seg, r, lambda), open};
}

template <typename Scalar>
struct ModelOption {
  Index support = 0;
  Scalar nu_star = 0;
  Scalar loss_star = 0;
  bool open_infimum = false;
};

template <typename Scalar>
struct SelectionTable {
  std::vector<ModelOption<Scalar>> rows;
  // Set when the first breakpoint lies below nu = 1, so row 0 moves to nu_1.
  bool row0_moved = false;
};

/// Culled admissible-model table: for each support the best segment optimum,
/// kept while losses strictly decrease and nu* strictly increases, ending at the
/// global minimizer.
template <typename Scalar>
SelectionTable<Scalar> select_models(const ProblemInstance<Scalar>& inst,
                                     const RelaxationPath<Scalar>& path, const Vector<Scalar>& r,
                                     Scalar lambda_min = Scalar(1e-9)) {
  validate_counts(inst, r);
  if (!(lambda_min > 0) || !(lambda_min < 1))
    throw Error(Errc::InvalidArgument, "lambda_min must lie in (0, 1)");
  SelectionTable<Scalar> table;
  const auto segs = path_segments(path);

  std::map<Index, ModelOption<Scalar>> best;
  const Scalar nu1 = path.kappa() > 0 ? path.breakpoints.front().nu : std::numeric_limits<Scalar>::infinity();
  ModelOption<Scalar> row0;
  row0.support = 0;
  row0.nu_star = std::min(Scalar(1), nu1);
  row0.loss_star = 0;
  for (Index j = 0; j < inst.n(); ++j)
    if (r[j] > 0) row0.loss_star -= r[j] * std::log(inst.u()[j]);
  table.row0_moved = nu1 < 1;
  best[0] = row0;

  for (const auto& seg : segs) {
    const Index k = seg.support();
    if (k == 0) continue;
    const auto opt = segment_minimize(inst, seg, r, lambda_min);
    if (!opt) continue;
    const ModelOption<Scalar> row{k, 1 / opt->lambda, opt->loss, opt->open_infimum};
    auto it = best.find(k);
    if (it == best.end() || row.loss_star < it->second.loss_star) best[k] = row;
  }

  auto better = [](Scalar a, Scalar b) {
    return a < b - Scalar(1e-12) * std::max(Scalar(1), std::abs(b));
  };
  const ModelOption<Scalar>* global = nullptr;
  for (const auto& [k, row] : best)
    if (!global || better(row.loss_star, global->loss_star)) global = &row;

  for (const auto& [k, row] : best) {
    if (&row == global) {
      table.rows.push_back(row);
      break;
    }
    if (!table.rows.empty() && (!better(row.loss_star, table.rows.back().loss_star) ||
                                row.nu_star <= table.rows.back().nu_star))
      continue;
    if (!better(global->loss_star, row.loss_star) || row.nu_star >= global->nu_star) continue;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace relaxpath
