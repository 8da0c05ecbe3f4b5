#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fsplay/errors.hpp"
#include "fsplay/play.hpp"
#include "test_support.hpp"

using namespace fsplay;
using Catch::Approx;

namespace {

// Continuous play of a piecewise-linear input: refine each cell into m
// sub-steps and clamp at every sub-node. Written without the library's
// state types.
std::vector<double> refined_play(const SampledPath& in, double x0, const BoundaryCurvePair& c,
                                 int m) {
  auto clamp = [&](double x, double y) {
    return std::min(std::max(x, c.lower()(y)), c.upper()(y));
  };
  std::vector<double> out;
  double x = clamp(x0, in.value(0));
  out.push_back(x);
  for (std::size_t k = 1; k < in.size(); ++k) {
    for (int j = 1; j <= m; ++j) {
      const double s = static_cast<double>(j) / m;
      x = clamp(x, (1 - s) * in.value(k - 1) + s * in.value(k));
    }
    out.push_back(x);
  }
  return out;
}

}  // namespace

TEST_CASE("play examples on the unit band") {
  const auto c = BoundaryCurvePair::unit_slope();
  CHECK(play_init(5.0, 0.0, c).current == 1.0);
  CHECK(play_init(-5.0, 0.0, c).current == -1.0);
  CHECK(play_init(0.3, 0.0, c).current == 0.3);

  const SampledPath in({0, 1, 2, 3}, {0, 2, 2, -1});
  const SampledPath out = play_evaluate(in, 0.0, c);
  CHECK(out.value(0) == 0.0);
  CHECK(out.value(1) == 1.0);
  CHECK(out.value(2) == 1.0);
  CHECK(out.value(3) == 0.0);
  CHECK_THROWS_AS(play_evaluate(SampledPath{}, 0.0, c), ArgumentError);
}

TEST_CASE("play step ignores time and only clamps") {
  const auto c = BoundaryCurvePair::unit_slope(0.5);
  PlayState s = play_init(0.0, 0.0, c);
  s = play_step(s, 0.2);
  CHECK(s.current == 0.0);
  s = play_step(s, 1.0);
  CHECK(s.current == 0.5);
  s = play_step(s, -3.0);
  CHECK(s.current == -2.5);
}

TEST_CASE("play matches a refined continuous evaluation on random cases") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 50; ++i) {
    const auto c = testing::random_curve_pair(rng);
    const auto in = testing::random_lipschitz_input(rng, 5.0, 97);
    const SampledPath out = play_evaluate(in, 0.0, c);
    const auto ref = refined_play(in, 0.0, c, 10);
    for (std::size_t k = 0; k < in.size(); ++k) CHECK(out.value(k) == Approx(ref[k]).margin(1e-12));
  }
}

TEST_CASE("play is confined, satisfies the VI, and is rate independent") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> warp(0.2, 5.0);
  for (int i = 0; i < 30; ++i) {
    const auto c = testing::random_curve_pair(rng);
    const auto in = testing::random_lipschitz_input(rng, 4.0, 201);
    const SampledPath out = play_evaluate(in, 0.7, c);
    const double scale = std::max(1.0, in.max_abs());

    const ViReport vi = check_variational_inequality(out, in, c, 1e-12 * scale);
    CHECK(vi.max_band_violation <= 1e-10 * scale);
    CHECK(vi.max_vi_violation <= 1e-10 * scale);

    // Random monotone time change fixing both ends.
    std::vector<double> w(in.size() - 1);
    for (auto& v : w) v = warp(rng);
    std::vector<double> nt{0.0};
    double acc = 0.0;
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double v : w) nt.push_back((acc += v) / total * 4.0);
    nt.back() = 4.0;
    CHECK(check_rate_independence(in, 0.7, c, nt) <= 1e-10 * scale);

    CHECK(check_volterra(in, 0.7, c, 100) == 0.0);
  }
}

TEST_CASE("VI check flags a non-play output") {
  const auto c = BoundaryCurvePair::unit_slope();
  const SampledPath y({0, 1, 2}, {0, 0, 0});
  const SampledPath x({0, 1, 2}, {0, 0.5, 0.0});
  const ViReport r = check_variational_inequality(x, y, c, 1e-12);
  CHECK(r.max_band_violation == 0.0);
  CHECK(r.max_vi_violation > 0.1);
  const SampledPath far({0, 1, 2}, {0, 3, 0});
  CHECK(check_variational_inequality(far, y, c, 1e-12).max_band_violation == Approx(2.0));
}

TEST_CASE("rate independence rejects malformed time changes") {
  const auto c = BoundaryCurvePair::unit_slope();
  const SampledPath in({0, 1, 2}, {0, 1, 0});
  const std::vector<double> short_grid{0, 2};
  const std::vector<double> moved_end{0, 1, 3};
  const std::vector<double> not_monotone{0, 1.5, 1.2};
  CHECK_THROWS_AS(check_rate_independence(in, 0, c, short_grid), ArgumentError);
  CHECK_THROWS_AS(check_rate_independence(in, 0, c, moved_end), ArgumentError);
  CHECK_THROWS_AS(check_rate_independence(in, 0, c, not_monotone), ArgumentError);
}

TEST_CASE("play of ramp and triangle inputs") {
  const auto c = BoundaryCurvePair::unit_slope();
  const SampledPath ramp = sample(uniform_grid(0, 3, 3001), [](double t) { return t; });
  const SampledPath out = play_evaluate(ramp, 0.0, c);
  for (std::size_t k = 0; k < ramp.size(); k += 100) {
    CHECK(out.value(k) == Approx(std::max(0.0, ramp.time(k) - 1.0)).margin(1e-12));
  }
  CHECK(out.back_value() == Approx(2.0));

  const SampledPath tri = sample(uniform_grid(0, 6, 6001), [](double t) { return t <= 3 ? t : 6 - t; });
  const SampledPath tri_out = play_evaluate(tri, 0.0, c);
  CHECK(tri_out.back_value() == Approx(1.0));
  const auto ref = refined_play(tri, 0.0, c, 10);
  CHECK(tri_out.back_value() == Approx(ref.back()).margin(1e-12));

  const SampledPath flat({0, 1, 2}, {0.5, 0.5, 0.5});
  const SampledPath flat_out = play_evaluate(flat, 4.0, c);
  for (double v : flat_out.values()) CHECK(v == play_init(4.0, 0.5, c).current);
}

TEST_CASE("VI examples") {
  const auto c = BoundaryCurvePair::unit_slope();
  const auto grid = uniform_grid(0, 3, 301);
  const SampledPath ramp = sample(grid, [](double t) { return t; });
  const SampledPath zero = sample(grid, [](double) { return 0.0; });
  CHECK(check_variational_inequality(zero, ramp, c, 1e-12).max_band_violation == Approx(2.0));
  const SampledPath rising = sample(grid, [](double t) { return t / 3.0; });
  CHECK(check_variational_inequality(rising, zero, c, 1e-12).max_vi_violation > 0.0);
  std::vector<double> bad_t{0, 1};
  CHECK_THROWS_AS(check_variational_inequality(zero, SampledPath(bad_t, {0, 0}), c, 1e-12),
                  ArgumentError);
}

TEST_CASE("rate independence and Volterra examples") {
  const auto c = BoundaryCurvePair::unit_slope();
  const double T = 4.0;
  const SampledPath in = sample(uniform_grid(0, T, 401), [](double t) { return 2.5 * std::sin(2 * t); });
  CHECK(check_rate_independence(in, 0, c, in.times()) == 0.0);
  std::vector<double> sq;
  for (double t : in.times()) sq.push_back(T * (t / T) * (t / T));
  sq.back() = T;
  CHECK(check_rate_independence(in, 0, c, sq) <= 1e-12);

  const SampledPath s = sample(uniform_grid(0, 2 * M_PI, 629), [](double t) { return 3 * std::sin(t); });
  std::size_t cut = 0;
  while (s.time(cut + 1) <= M_PI) ++cut;
  CHECK(check_volterra(s, 0, c, cut) == 0.0);
  CHECK(check_volterra(s, 0, c, s.size() - 1) == 0.0);
}
