#include <catch_amalgamated.hpp>

#include <cmath>

#include "fsplay/errors.hpp"
#include "fsplay/oscillator.hpp"
#include "fsplay/patched.hpp"

using namespace fsplay;
using Catch::Approx;

namespace {

// eps x' = y - x + 1 everywhere, y' = 0. Affine, so linearization is exact.
FastSlowSystem affine_relaxation() {
  return {[](double x, double y) { return y - x + 1.0; }, [](double, double, double) { return 0.0; },
          [](double, double) { return std::array<double, 2>{-1.0, 1.0}; },
          [](double, double, double) { return std::array<double, 3>{0.0, 0.0, 0.0}; },
          BoundaryCurvePair::unit_slope()};
}

OscillatorParams unforced() {
  OscillatorParams p;
  p.a = p.b = p.c = 0.0;
  return p;
}

const CompactBox box33{{-3, 3}, {-3, 3}};

}  // namespace

TEST_CASE("linearization reproduces affine fields and matches values at the anchor") {
  const auto sys = make_system(OscillatorParams{});
  const LinearizedPiece p = linearize_at(sys, {3.0, 0.0}, 0.2);
  CHECK(p.F2[0] == -1.0);
  CHECK(p.F2[1] == 1.0);
  CHECK(p.fast_affine({3.0, 0.0}) == Approx(sys.fast(3.0, 0.0)));
  CHECK(p.fast_affine({2.5, 0.3}) == Approx(sys.fast(2.5, 0.3)));
  // g is affine in the state; the time part is only first order.
  CHECK(p.slow_affine({1.0, 0.5}, 0.2) == Approx(sys.slow(1.0, 0.5, 0.2)));
  const double dt = 1e-4;
  CHECK(std::abs(p.slow_affine({1.0, 0.5}, 0.2 + dt) - sys.slow(1.0, 0.5, 0.2 + dt)) < 1e-5);

  FastSlowSystem bare = sys;
  bare.fast_jacobian.reset();
  CHECK_THROWS_AS(linearize_at(bare, {0, 0}, 0), CapabilityError);
}

TEST_CASE("closed-form piece solutions") {
  const LinearizedPiece p = linearize_at(affine_relaxation(), {3.0, 0.0}, 0.0);
  for (double t : {0.0, 0.01, 0.1, 0.5}) {
    const Point z = solve_linear_piece(p, 0.1, t);
    CHECK(z.x == Approx(1.0 + 2.0 * std::exp(-10.0 * t)).epsilon(1e-13));
    CHECK(z.y == 0.0);
  }
  CHECK_THROWS_AS(solve_linear_piece(p, 0.1, -1.0), DomainError);

  LinearizedPiece drift;
  drift.anchor = {0.5, -0.25};
  drift.tau = 1.0;
  drift.F1 = 0.3;
  drift.G1 = -2.0;
  const Point z = solve_linear_piece(drift, 0.1, 1.5);
  CHECK(z.x == Approx(0.5 + 0.5 * 3.0));
  CHECK(z.y == Approx(-0.25 - 1.0));
  const Point w = solve_linear_piece(drift, 0.1, 1.0);
  CHECK(w.x == 0.5);
  CHECK(w.y == -0.25);
}

TEST_CASE("advance_until_theta hitting times") {
  LinearizedPiece drift;
  drift.anchor = {2.0, 0.0};
  drift.F1 = -0.8;  // x' = -v/eps with v = 0.8
  const double eps = 0.05;
  const double theta = 0.1;
  const ThetaAdvance a = advance_until_theta(drift, eps, theta, 1.0);
  REQUIRE(a.hit);
  CHECK(a.time == Approx(eps * theta / (2 * 0.8)).margin(1e-12));
  CHECK(std::abs(a.state.x - 2.0) == Approx(theta / 2).epsilon(1e-9));
  CHECK(a.x.front_time() == 0.0);
  CHECK(a.x.back_time() == a.time);

  LinearizedPiece frozen;
  frozen.anchor = {0.0, 0.0};
  const ThetaAdvance f = advance_until_theta(frozen, eps, theta, 2.0);
  CHECK_FALSE(f.hit);
  CHECK(f.time == 2.0);
  CHECK_THROWS_AS(advance_until_theta(frozen, eps, 0.0, 2.0), ArgumentError);
}

TEST_CASE("collar constants of the oscillator") {
  const auto sys = make_system(OscillatorParams{});
  const double delta = 0.1;
  for (std::size_t grid : {201u, 601u}) {
    const CollarConstants c = compute_collar_constants(sys, box33, delta, grid);
    const double spacing = 6.0 / static_cast<double>(grid - 1);
    // Points at distance exactly delta have f = -sqrt(2) delta.
    CHECK(c.f_plus <= -delta / std::sqrt(2.0) + 1e-12);
    CHECK(c.f_plus >= -delta / std::sqrt(2.0) - spacing);
    CHECK(c.f_minus >= delta / std::sqrt(2.0) - 1e-12);
    CHECK(c.f_m > 0.0);
    CHECK(c.f_m == Approx(std::min(-c.f_plus, c.f_minus)));
  }
  double prev = 0.0;
  for (double d : {0.05, 0.1, 0.2, 0.4, 0.8}) {
    const double fm = compute_collar_constants(sys, box33, d, 201).f_m;
    CHECK(fm >= prev);
    prev = fm;
  }
  CHECK_THROWS_AS(compute_collar_constants(sys, box33, 10.0, 51), CollarTooLargeError);
}

TEST_CASE("epsilon_delta formula") {
  BoundsMetadata b;
  b.C_FG = 0.0;
  const auto curves = BoundaryCurvePair::unit_slope();
  CHECK(compute_epsilon_delta(b, curves, 0.5) == 1.0);
  b.C_FG = 1e-12;
  CHECK(compute_epsilon_delta(b, curves, 0.5) == 1.0);

  b.C_FG = 0.7;
  b.C_M = 2.0;
  auto direct = [&](double fm) {
    const double r = 2 * b.C_FG / fm;
    const double v = fm / (2 * 2 * b.C_FG) / (std::sqrt(2.0) * (b.C_M + r) * std::exp(r) + 1);
    return std::min(v, 1.0);
  };
  double prev = 0.0;
  for (double fm : {0.1, 0.2, 0.5, 1.0, 3.0}) {
    const double e = compute_epsilon_delta(b, curves, fm);
    CHECK(e == Approx(direct(fm)).epsilon(1e-12));
    CHECK(e >= prev);
    prev = e;
  }
  CHECK_THROWS_AS(compute_epsilon_delta(b, curves, 0.0), ArgumentError);

  // The oscillator's own bounds give a tiny but positive threshold.
  const auto sys = make_system(OscillatorParams{});
  BoundsOptions bo;
  bo.t1 = 2.0;
  const BoundsMetadata ob = estimate_bounds(sys, box33, bo);
  const double fm = compute_collar_constants(sys, box33, 0.25).f_m;
  const double ed = compute_epsilon_delta(ob, sys.curves, fm);
  CHECK(ed > 0.0);
  CHECK(ed < 1e-100);
}

TEST_CASE("theta schedule") {
  const ThetaSchedule a = theta_schedule(0.5, 2.0, 1.0, 1e-12);
  CHECK_FALSE(a.floored);
  CHECK(a.theta == Approx(std::exp(-2.0) / 3.0));
  const ThetaSchedule b = theta_schedule(0.01, 10.0, 2.0, 1e-12);
  CHECK(b.floored);
  CHECK(b.theta == 1e-12);
  CHECK(std::isfinite(b.log_nominal));
  CHECK(b.log_nominal == Approx(-1000.0 - std::log(101.0)));
  double prev = 1.0;
  for (double eps : {1.0, 0.8, 0.6, 0.4, 0.3}) {
    const ThetaSchedule s = theta_schedule(eps, 2.0, 1.0, 1e-300);
    CHECK_FALSE(s.floored);
    CHECK(s.theta < prev);
    prev = s.theta;
  }
}

TEST_CASE("transit bounds") {
  const double ed = 1e-3;
  CHECK(*transit_piece_bound(ed / 2, ed, 1.0, 1.0, 0.1) == 80.0);
  CHECK_FALSE(transit_piece_bound(ed, ed, 1.0, 1.0, 0.1).has_value());
  CHECK(*transit_time_bound(ed / 2, ed, 1.0, 1.0, 0.5, 2.0) == Approx(ed / 2 * (2 * 2 / 0.25 + 0.5)));
  CHECK_FALSE(transit_time_bound(2 * ed, ed, 1.0, 1.0, 0.5, 2.0).has_value());
}

TEST_CASE("patched scheme: start inside the collar with no slow dynamics") {
  const auto sys = make_system(unforced());
  PatchOptions o;
  o.enforce_admissibility = false;
  o.box = box33;
  const PatchSchedule s = build_patched_solution(sys, 0.1, {0.5, 0.0}, 0.25, 0.01, 1.0, o);
  REQUIRE(s.segments.size() == 1);
  CHECK(s.segments[0].kind == SegmentKind::Exact);
  CHECK(s.x.back_value() == 0.5);
  CHECK(s.y.back_value() == 0.0);
}

TEST_CASE("patched scheme: affine transit is exact") {
  const auto sys = affine_relaxation();
  PatchOptions o;
  o.enforce_admissibility = false;
  o.box = box33;
  const double eps = 0.1;
  const PatchSchedule s = build_patched_solution(sys, eps, {3.0, 0.0}, 0.25, 0.05, 1.0, o);
  REQUIRE(s.segments.size() == 2);
  CHECK(s.segments[0].kind == SegmentKind::Linearized);
  CHECK(s.segments[1].kind == SegmentKind::Exact);
  const double t_lin = s.segments[0].t_end;
  for (std::size_t k = 0; k < s.x.size() && s.x.time(k) <= t_lin; ++k) {
    CHECK(s.x.value(k) == Approx(1.0 + 2.0 * std::exp(-s.x.time(k) / eps)).margin(1e-10));
  }
  // Entry to the collar band_distance = delta, i.e. x - 1 = sqrt(2) delta.
  CHECK(s.segments[0].end.x == Approx(1.0 + std::sqrt(2.0) * 0.25).epsilon(1e-10));
  CHECK(s.pieces.back().reason == PieceEnd::CollarEntry);
}

TEST_CASE("patched scheme refuses inadmissible parameters") {
  const auto sys = make_system(OscillatorParams{});
  PatchOptions o;
  o.box = box33;
  try {
    (void)build_patched_solution(sys, 0.01, {2.5, -0.5}, 0.25, 1e-3, 2.0, o);
    FAIL("expected AdmissibilityError");
  } catch (const AdmissibilityError& e) {
    CHECK(std::string(e.what()).find("epsilon_delta") != std::string::npos);
  }
  CHECK_THROWS_AS(build_patched_solution(sys, 0.01, {2.5, -0.5}, 0.25, 0.0, 2.0, o), ArgumentError);
}

TEST_CASE("patched scheme on the oscillator at moderate epsilon") {
  const auto sys = make_system(OscillatorParams{});
  const double eps = 0.4;
  const double T = 2.0;
  PatchOptions o;
  o.enforce_admissibility = false;
  const BoundsMetadata probe = [&] {
    BoundsOptions bo;
    bo.t1 = T;
    return estimate_bounds(sys, working_box(sys, eps, {2.5, -0.5}, 0, T), bo);
  }();
  const ThetaSchedule th = theta_schedule(eps, T, probe.L, 1e-12);
  REQUIRE_FALSE(th.floored);
  const PatchSchedule s = build_patched_solution(sys, eps, {2.5, -0.5}, 0.25, th.theta, T, o);
  CHECK_FALSE(s.admissible);
  CHECK(s.x.back_time() == Approx(T));
  CHECK(s.segments.front().kind == SegmentKind::Linearized);

  const PatchBoundsReport r = evaluate_patch_bounds(s, sys);
  CHECK(r.max_junction_mismatch == 0.0);
  CHECK(r.local_piece_violations == 0);
  for (const auto& t : r.transits) {
    CHECK(t.monotone_progress);
    CHECK_FALSE(t.time_bound.has_value());
  }
  for (const auto& e : r.exact_segments) CHECK(e.ok());
  CHECK(r.measured_deviation < 1e-2);
  CHECK_FALSE(r.applicable);
}
