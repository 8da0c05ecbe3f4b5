#include <catch_amalgamated.hpp>

#include <cmath>

#include "fsplay/errors.hpp"
#include "fsplay/integrator.hpp"
#include "fsplay/oscillator.hpp"

using namespace fsplay;
using Catch::Approx;

namespace {

// eps x' = -(x - y), y' = cos t. Exact solution by variation of constants.
FastSlowSystem relaxation() {
  return {[](double x, double y) { return y - x; }, [](double, double, double t) { return std::cos(t); },
          std::nullopt, std::nullopt, BoundaryCurvePair::unit_slope()};
}

Point relaxation_exact(double eps, Point w0, double t) {
  const double y = w0.y + std::sin(t);
  // x' = (y - x)/eps; particular part solved via the integrating factor.
  const double k = 1.0 / eps;
  const double den = k * k + 1.0;
  const double xp = w0.y + k * (k * std::sin(t) - std::cos(t)) / den;
  const double xp0 = w0.y - k / den;
  return {xp + (w0.x - xp0) * std::exp(-k * t), y};
}

IntegratorConfig with_method(Method m, double tol) {
  IntegratorConfig c;
  c.rel_tol = c.abs_tol = tol;
  c.method = m;
  return c;
}

}  // namespace

TEST_CASE("both methods reproduce the relaxation solution") {
  const auto sys = relaxation();
  for (double eps : {0.5, 0.05}) {
    for (Method m : {Method::AdaptiveEmbedded45, Method::ImplicitTrapezoid}) {
      const EpsRun r = integrate(sys, eps, {2.0, 0.5}, 0.0, 3.0, with_method(m, 1e-8));
      CHECK(r.x.back_time() == 3.0);
      double err = 0.0;
      for (std::size_t k = 0; k < r.x.size(); ++k) {
        const Point e = relaxation_exact(eps, {2.0, 0.5}, r.x.time(k));
        err = std::max({err, std::abs(r.x.value(k) - e.x), std::abs(r.y.value(k) - e.y)});
      }
      CHECK(err < 1e-5);
    }
  }
}

TEST_CASE("unforced oscillator: constant inside the band, closed form above it") {
  OscillatorParams p;
  p.a = p.b = p.c = 0.0;
  const auto sys = make_system(p);
  const EpsRun still = integrate(sys, 0.01, {0.3, 0.1}, 0.0, 1.0, IntegratorConfig::sweep());
  for (double v : still.x.values()) CHECK(v == 0.3);
  for (double v : still.y.values()) CHECK(v == 0.1);

  const double eps = 0.05;
  for (int i = 1; i <= 10; ++i) {
    const double t = 0.1 * i;
    const EpsRun r = integrate(sys, eps, {3.0, 0.5}, 0.0, t, IntegratorConfig::oracle());
    const double exact = 1.5 + 1.5 * std::exp(-t / eps);
    CHECK(r.x.back_value() == Approx(exact).epsilon(1e-6));
    CHECK(r.y.back_value() == 0.5);
  }
}

TEST_CASE("oscillator preset reaches the band within one time unit") {
  const OscillatorParams p;
  const auto sys = make_system(p);
  const EpsRun r = integrate(sys, p.epsilon, {2.5, -0.5}, 0.0, 1.0, IntegratorConfig::sweep());
  IntegratorConfig tight = IntegratorConfig::sweep();
  tight.rel_tol = tight.abs_tol = 1e-7;
  const EpsRun ref = integrate(sys, p.epsilon, {2.5, -0.5}, 0.0, 1.0, tight);
  CHECK(band_distance(sys.curves, {r.x.back_value(), r.y.back_value()}) < 1e-2);
  CHECK(band_distance(sys.curves, {ref.x.back_value(), ref.y.back_value()}) < 1e-2);
  CHECK(std::abs(r.y.back_value() - ref.y.back_value()) < 1e-4);
}

TEST_CASE("tightening tolerances reduces the error") {
  const auto sys = relaxation();
  auto max_err = [&](double tol) {
    IntegratorConfig c = with_method(Method::AdaptiveEmbedded45, tol);
    c.max_step = 1.0;
    const EpsRun r = integrate(sys, 1.0, {2.0, 0.0}, 0.0, 2.0, c);
    double e = 0.0;
    for (std::size_t k = 0; k < r.x.size(); ++k) {
      e = std::max(e, std::abs(r.x.value(k) - relaxation_exact(1.0, {2.0, 0.0}, r.x.time(k)).x));
    }
    return e;
  };
  CHECK(max_err(1e-9) < max_err(1e-5));
}

TEST_CASE("explicit steps stay below eps/2 while f is nonzero") {
  const auto sys = relaxation();
  const double eps = 0.02;
  const EpsRun r = integrate(sys, eps, {3.0, 0.0}, 0.0, 1.0, IntegratorConfig::sweep());
  for (std::size_t k = 0; k + 1 < r.x.size(); ++k) {
    if (sys.fast(r.x.value(k), r.y.value(k)) != 0.0) {
      CHECK(r.x.time(k + 1) - r.x.time(k) <= eps / 2 * (1 + 1e-12));
    }
  }
  CHECK(r.accepted + 1 == r.x.size());
}

TEST_CASE("failure modes") {
  auto sys = relaxation();
  IntegratorConfig boxed = IntegratorConfig::sweep();
  boxed.box = CompactBox{{-1, 1}, {-1, 1}};
  CHECK_THROWS_AS(integrate(sys, 0.1, {0.0, 0.0}, 0.0, 10.0, [&] {
                    auto c = boxed;
                    c.box = CompactBox{{-1, 1}, {-0.5, 0.5}};
                    return c;
                  }()),
                  BoxEscapeError);

  IntegratorConfig tight = IntegratorConfig::sweep();
  tight.rel_tol = tight.abs_tol = 1e-14;
  tight.min_step = 1e-3;
  CHECK_THROWS_AS(integrate(sys, 1e-4, {3.0, 0.0}, 0.0, 1.0, tight), StiffnessError);

  FastSlowSystem bad = sys;
  bad.slow = [](double, double, double t) { return t > 0.5 ? NAN : 1.0; };
  CHECK_THROWS_AS(integrate(bad, 0.1, {0, 0}, 0.0, 1.0, IntegratorConfig::sweep()), EvaluationError);

  CHECK_THROWS_AS(integrate(sys, -0.1, {0, 0}, 0.0, 1.0, IntegratorConfig::sweep()), ArgumentError);
  CHECK_THROWS_AS(integrate(sys, 0.1, {0, 0}, 1.0, 0.0, IntegratorConfig::sweep()), ArgumentError);
}

TEST_CASE("integrate_until stops at the event") {
  const auto sys = relaxation();
  const EventRun er = integrate_until(sys, 0.1, {0, 0}, 0.0, 2.0, IntegratorConfig::oracle(),
                                      [](Point w, double) { return w.y - 0.5; });
  REQUIRE(er.hit);
  CHECK(er.run.x.back_time() == Approx(std::asin(0.5)).epsilon(1e-10));
  CHECK(er.run.y.back_value() == Approx(0.5).epsilon(1e-7));

  const EventRun miss = integrate_until(sys, 0.1, {0, 0}, 0.0, 1.0, IntegratorConfig::oracle(),
                                        [](Point w, double) { return w.y - 5.0; });
  CHECK_FALSE(miss.hit);
  CHECK(miss.run.x.back_time() == 1.0);
}

TEST_CASE("residual check is small for an accurate run and large for a corrupted one") {
  const auto sys = make_system(OscillatorParams{});
  EpsRun r = integrate(sys, 0.05, {2.5, -0.5}, 0.0, 2.0, IntegratorConfig::oracle());
  const ResidualReport rep = residual_check(r, sys, 0.05);
  // The linear interpolant's defect is O(h) times the derivative scale.
  CHECK(rep.slow_defect < 0.1);
  CHECK(rep.fast_defect < 0.1);

  std::vector<double> ys(r.y.values().begin(), r.y.values().end());
  ys[ys.size() / 2] += 0.1;
  r.y = SampledPath(std::vector<double>(r.y.times().begin(), r.y.times().end()), ys);
  CHECK(residual_check(r, sys, 0.05).slow_defect > 1.0);
}

TEST_CASE("working box contains the sampled run") {
  const auto sys = make_system(OscillatorParams{});
  const CompactBox box = working_box(sys, 0.05, {2.5, -0.5}, 0.0, 2.0);
  const EpsRun r = integrate(sys, 0.05, {2.5, -0.5}, 0.0, 2.0, IntegratorConfig::oracle());
  for (std::size_t k = 0; k < r.x.size(); ++k) CHECK(box.contains({r.x.value(k), r.y.value(k)}));
}
