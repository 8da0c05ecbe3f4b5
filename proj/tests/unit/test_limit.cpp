#include <catch_amalgamated.hpp>

#include <cmath>

#include "fsplay/errors.hpp"
#include "fsplay/limit.hpp"
#include "fsplay/norms.hpp"
#include "fsplay/oscillator.hpp"
#include "fsplay/play.hpp"

using namespace fsplay;
using Catch::Approx;

TEST_CASE("constant forcing: x follows the lower curve after t = 1") {
  const auto c = BoundaryCurvePair::unit_slope();
  const LimitRun r = solve_limit([](double, double, double) { return 1.0; }, c, 0.0, 0.0, 3.0, 1e-3);
  REQUIRE(r.x.size() == 3001);
  CHECK(r.x.back_time() == Approx(3.0));
  for (std::size_t k = 0; k < r.x.size(); ++k) {
    const double t = r.x.time(k);
    CHECK(r.y.value(k) == Approx(t).margin(1e-12));
    CHECK(r.x.value(k) == Approx(std::max(0.0, t - 1.0)).margin(1e-12));
  }
}

TEST_CASE("limit output is the play of its own slow path and stays in the band") {
  const auto p = OscillatorParams{};
  const auto sys = make_system(p);
  const LimitRun r = solve_limit(sys.slow, sys.curves, 2.5, -0.5, 5.0, 1e-3);
  const SampledPath replay = play_evaluate(r.y, 2.5, sys.curves);
  CHECK(norm_sup(difference(replay, r.x)) == 0.0);
  CHECK(check_variational_inequality(r.x, r.y, sys.curves, 1e-12).max_band_violation == 0.0);
}

TEST_CASE("limit solver converges under dt refinement") {
  const auto sys = make_system(OscillatorParams{});
  auto endpoint = [&](double dt) { return solve_limit(sys.slow, sys.curves, 0.0, 0.0, 2.0, dt).y.back_value(); };
  const double fine = endpoint(1e-5);
  CHECK(std::abs(endpoint(1e-3) - fine) < 1e-3);
  CHECK(std::abs(endpoint(1e-4) - fine) < std::abs(endpoint(1e-3) - fine) + 1e-12);
}

TEST_CASE("limit solver rejects bad inputs") {
  const auto c = BoundaryCurvePair::unit_slope();
  auto one = [](double, double, double) { return 1.0; };
  CHECK_THROWS_AS(solve_limit(one, c, 0, 0, 1.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(solve_limit(one, c, 0, 0, -1.0, 0.1), ArgumentError);
  CHECK_THROWS_AS(solve_limit([](double, double, double t) { return t > 0.5 ? NAN : 1.0; }, c, 0, 0,
                              1.0, 0.01),
                  EvaluationError);
}

TEST_CASE("uniqueness probe stays tame for Lipschitz forcing") {
  const auto sys = make_system(OscillatorParams{});
  const UniquenessProfile u = uniqueness_probe(sys.slow, sys.curves, 0.0, 0.0, 5.0, 1e-3, 1e-8);
  CHECK_FALSE(u.super_exponential);
  CHECK(u.deviation.back_value() < 1e-8 * std::exp(5.0 * 1.5));
  for (std::size_t k = 1; k < u.deviation.size(); ++k) CHECK(u.deviation.value(k) >= u.deviation.value(k - 1));
  CHECK_THROWS_AS(uniqueness_probe(sys.slow, sys.curves, 0, 0, 1.0, 1e-3, 1e-3), ArgumentError);
}

TEST_CASE("layer exit time") {
  EpsRun r;
  r.x = SampledPath({0, 1, 2}, {5.0, 1.05, 1.0});
  r.y = SampledPath({0, 1, 2}, {0.0, 0.0, 0.0});
  const auto c = BoundaryCurvePair::unit_slope();
  REQUIRE(layer_exit_time(r, c).has_value());
  CHECK(*layer_exit_time(r, c) == 1.0);
  CHECK(*layer_exit_time(r, c, 0.01) == 2.0);
  r.x = SampledPath({0, 1, 2}, {5.0, 5.0, 5.0});
  CHECK_FALSE(layer_exit_time(r, c).has_value());
}
