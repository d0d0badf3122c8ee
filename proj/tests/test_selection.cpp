#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace relaxpath;
using namespace testing;
using doctest::Approx;

namespace {

PathSegment<double> terminal(const Path& path) { return path_segments(path).back(); }

Vec counts(InstanceSampler& rs, Index n) {
  Vec r(n);
  for (Index j = 0; j < n; ++j) r[j] = double(rs.integer(0, 5));
  if (r.sum() == 0) r[0] = 1;
  return r;
}

}  // namespace

TEST_CASE("two-coordinate optima") {
  const auto inst = pair();
  const auto path = track_local(inst);
  const auto seg = terminal(path);
  REQUIRE(seg.support() == 2);

  const auto a = segment_minimize(inst, seg, vec({1, 1}));
  REQUIRE(a);
  CHECK(a->lambda == Approx(0.2).epsilon(1e-12));
  CHECK(a->loss == Approx(2 * std::log(2.0)).epsilon(1e-12));
  CHECK_FALSE(a->open_infimum);

  const auto b = segment_minimize(inst, seg, vec({2, 1}));
  REQUIRE(b);
  CHECK(b->lambda == Approx(1. / 30).epsilon(1e-10));
  CHECK(b->loss == Approx(3 * std::log(3.0) - 2 * std::log(2.0)).epsilon(1e-12));

  const auto c = segment_minimize(inst, seg, vec({3, 1}));
  REQUIRE(c);
  CHECK(c->lambda == 1e-9);
  CHECK(c->open_infimum);

  CHECK(validation_loss(inst, path, vec({1, 1}), 0.3) == Approx(2 * std::log(2.0)).epsilon(1e-14));
  CHECK(validation_loss(inst, path, vec({2, 1}), 1. / 30) ==
        Approx(3 * std::log(3.0) - 2 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("model table for the pair instance") {
  const auto inst = pair();
  const auto path = track_local(inst);
  const auto t = select_models(inst, path, vec({2, 1}));
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].support == 0);
  CHECK(t.rows[0].nu_star == 1);
  CHECK(t.rows[0].loss_star == Approx(3 * std::log(2.0)).epsilon(1e-14));
  CHECK(t.rows[1].support == 2);
  CHECK(t.rows[1].nu_star == Approx(30).epsilon(1e-9));
  CHECK(t.rows[1].loss_star == Approx(3 * std::log(3.0) - 2 * std::log(2.0)).epsilon(1e-12));
  CHECK_FALSE(t.row0_moved);

  const auto open = select_models(inst, path, vec({3, 1}));
  REQUIRE(open.rows.size() == 2);
  CHECK(open.rows.back().open_infimum);
  CHECK(open.rows.back().nu_star == Approx(1e9));
}

TEST_CASE("counts proportional to the prior select the empty model") {
  InstanceSampler rs(41);
  for (int t = 0; t < 50; ++t) {
    const auto inst = rs.draw(Family::Dense);
    const Vec r = 100 * inst.u().cwiseProduct(inst.m());
    const auto table = select_models(inst, track_local(inst), r);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].support == 0);
  }
}

TEST_CASE("counts proportional to the observation end at the terminal support") {
  InstanceSampler rs(42);
  for (int t = 0; t < 50; ++t) {
    const auto inst = rs.draw(Family::Dense);
    const auto path = track_local(inst);
    const Vec r = 100 * inst.q().cwiseProduct(inst.m());
    const auto table = select_models(inst, path, r);
    CHECK(table.rows.back().support == terminal(path).support());
    CHECK(table.rows.back().nu_star > 1e6);
  }
  const auto path = track_local(toy());
  const Vec rq = 36 * toy().q().cwiseProduct(toy().m());
  const auto table = select_models(toy(), path, rq);
  CHECK(table.rows.back().support == 3);
}

TEST_CASE("row 0 moves below the first breakpoint") {
  const auto inst = validate_instance<double>(vec({2, 0.5}), vec({0.4, 0.9}), vec({0.25, 1}));
  const auto path = track_local(inst);
  REQUIRE(path.breakpoints.front().nu == Approx(0.625));
  const auto t = select_models(inst, path, vec({1, 1}));
  CHECK(t.row0_moved);
  CHECK(t.rows.front().nu_star == path.breakpoints.front().nu);
}

TEST_CASE("segment losses are convex and the derivative matches finite differences") {
  InstanceSampler rs(43);
  for (int t = 0; t < 60; ++t) {
    const auto inst = rs.draw(Family::Dense, rs.integer(2, 12));
    const auto path = track_local(inst);
    const Vec r = counts(rs, inst.n());
    for (const auto& seg : path_segments(path)) {
      double lo = std::isinf(seg.nu_hi) ? 1e-6 : 1 / seg.nu_hi;
      double hi = seg.nu_lo > 0 ? 1 / seg.nu_lo : 2.0;
      for (Index j = 0; j < inst.n(); ++j)
        if (seg.s[j] < 0) hi = std::min(hi, inst.q()[j]);
      if (!(hi - lo > 1e-6)) continue;
      lo += 1e-3 * (hi - lo);
      hi -= 1e-3 * (hi - lo);
      const int N = 20;
      std::vector<double> f(N + 1);
      const double h = (hi - lo) / N;
      for (int i = 0; i <= N; ++i) f[i] = detail::segment_loss(inst, seg, r, lo + i * h);
      for (int i = 1; i < N; ++i)
        CHECK(f[i - 1] - 2 * f[i] + f[i + 1] >= -1e-9 * (1 + std::abs(f[i])));
      const double x = lo + 0.37 * (hi - lo), e = 1e-6 * (hi - lo);
      const double fd =
          (detail::segment_loss(inst, seg, r, x + e) - detail::segment_loss(inst, seg, r, x - e)) / (2 * e);
      const double d = detail::segment_derivative(inst, seg, r, x);
      CHECK(std::abs(fd - d) <= 1e-4 * (1 + std::abs(d)));
    }
  }
}

TEST_CASE("table ends at the grid-search minimum") {
  InstanceSampler rs(44);
  for (int t = 0; t < 60; ++t) {
    const auto inst = rs.draw(Family::Dense, rs.integer(2, 12));
    const auto path = track_local(inst);
    const Vec r = counts(rs, inst.n());
    const auto table = select_models(inst, path, r);
    REQUIRE_FALSE(table.rows.empty());
    for (std::size_t k = 1; k < table.rows.size(); ++k) {
      CHECK(table.rows[k].loss_star < table.rows[k - 1].loss_star);
      CHECK(table.rows[k].nu_star > table.rows[k - 1].nu_star);
    }
    double grid = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 4000; ++i) {
      const double lambda = std::pow(10.0, -9 + 9.0 * i / 4000);
      try {
        grid = std::min(grid, validation_loss(inst, path, r, lambda));
      } catch (const Error& e) {
        CHECK(e.code() == Errc::ZeroProbability);
      }
    }
    const double best = table.rows.back().loss_star;
    CHECK(best <= grid + 1e-9 * (1 + std::abs(grid)));
    CHECK(best >= grid - 1e-2 * (1 + std::abs(grid)));
  }
}

TEST_CASE("zero probability on a positive count") {
  const auto inst = pair();
  const auto seg = terminal(track_local(inst));
  CHECK(detail::segment_loss(inst, seg, vec({0, 1}), 0.7) == Approx(0));
  try {
    detail::segment_loss(inst, seg, vec({1, 1}), 0.7);
    FAIL("expected ZeroProbability");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroProbability);
  }
}

TEST_CASE("bad inputs") {
  const auto inst = pair();
  const auto path = track_local(inst);
  CHECK_THROWS_AS(select_models(inst, path, vec({1})), Error);
  CHECK_THROWS_AS(select_models(inst, path, vec({-1, 2})), Error);
  CHECK_THROWS_AS(select_models(inst, path, vec({0, 0})), Error);
  CHECK_THROWS_AS(select_models(inst, path, vec({1, 1}), 0.0), Error);
  CHECK_THROWS_AS(select_models(inst, path, vec({1, 1}), 1.5), Error);
  CHECK_THROWS_AS(validation_loss(inst, path, vec({1, 1}), 0.0), Error);
}
