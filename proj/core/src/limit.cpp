#include "fsplay/limit.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "fsplay/errors.hpp"
#include "fsplay/play.hpp"

namespace fsplay {
namespace {

double checked(const SlowField& g, double x, double y, double t) {
  const double v = g(x, y, t);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "limit solver: non-finite g at t = " << t << ", (x, y) = (" << x << ", " << y << ")";
    throw EvaluationError(os.str());
  }
  return v;
}

double fit_slope(const std::vector<double>& t, const std::vector<double>& v) {
  const auto n = static_cast<double>(t.size());
  if (t.size() < 2) return 0.0;
  double st = 0, sv = 0, stt = 0, stv = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sv += v[i];
    stt += t[i] * t[i];
    stv += t[i] * v[i];
  }
  const double den = n * stt - st * st;
  return den == 0.0 ? 0.0 : (n * stv - st * sv) / den;
}

}  // namespace

LimitRun solve_limit(const SlowField& g, const BoundaryCurvePair& curves, double x0, double y0,
                     double T, double dt, double t0) {
  if (!(dt > 0.0)) throw ArgumentError("solve_limit: dt must be > 0");
  if (!(T > 0.0)) throw ArgumentError("solve_limit: T must be > 0");
  const auto n = static_cast<std::size_t>(std::max(1.0, std::round(T / dt)));
  const double h = T / static_cast<double>(n);

  std::vector<double> t(n + 1);
  std::vector<double> xs(n + 1);
  std::vector<double> ys(n + 1);
  PlayState state = play_init(x0, y0, curves);
  double y = y0;
  t[0] = t0;
  xs[0] = state.current;
  ys[0] = y;
  for (std::size_t k = 0; k < n; ++k) {
    const double tk = t0 + h * static_cast<double>(k);
    const double x = state.current;
    const double k1 = checked(g, x, y, tk);
    const double k2 = checked(g, x, y + 0.5 * h * k1, tk + 0.5 * h);
    const double k3 = checked(g, x, y + 0.5 * h * k2, tk + 0.5 * h);
    const double k4 = checked(g, x, y + h * k3, tk + h);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    state = play_step(state, y);
    t[k + 1] = t0 + h * static_cast<double>(k + 1);
    xs[k + 1] = state.current;
    ys[k + 1] = y;
  }
  std::vector<double> t2 = t;
  return {SampledPath(std::move(t), std::move(xs)), SampledPath(std::move(t2), std::move(ys))};
}

UniquenessProfile uniqueness_probe(const SlowField& g, const BoundaryCurvePair& curves, double x0,
                                   double y0, double T, double dt, double perturbation) {
  if (!(perturbation >= 0.0) || perturbation > 1e-6) {
    throw ArgumentError("uniqueness_probe: perturbation must lie in [0, 1e-6]");
  }
  const LimitRun a = solve_limit(g, curves, x0, y0, T, dt);
  const LimitRun b = solve_limit(g, curves, x0 + perturbation, y0 + perturbation, T, dt);

  std::vector<double> t(a.x.times().begin(), a.x.times().end());
  std::vector<double> dev(t.size());
  double running = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    running = std::max(running, std::max(std::abs(a.x.value(k) - b.x.value(k)),
                                         std::abs(a.y.value(k) - b.y.value(k))));
    dev[k] = running;
  }

  UniquenessProfile out;
  std::vector<double> lt, lv, lt1, lv1, lt2, lv2;
  const double mid = t.front() + 0.5 * (t.back() - t.front());
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (dev[k] <= 0.0) continue;
    const double l = std::log(dev[k]);
    lt.push_back(t[k]);
    lv.push_back(l);
    (t[k] < mid ? lt1 : lt2).push_back(t[k]);
    (t[k] < mid ? lv1 : lv2).push_back(l);
  }
  out.growth_rate = fit_slope(lt, lv);
  out.super_exponential = fit_slope(lt2, lv2) > 2.0 * std::max(0.0, fit_slope(lt1, lv1)) + 1.0;
  out.deviation = SampledPath(std::move(t), std::move(dev));
  return out;
}

std::optional<double> layer_exit_time(const EpsRun& run, const BoundaryCurvePair& curves,
                                      double delta_small) {
  for (std::size_t k = 0; k < run.x.size(); ++k) {
    if (band_distance(curves, {run.x.value(k), run.y.value(k)}) <= 2.0 * delta_small) {
      return run.x.time(k);
    }
  }
  return std::nullopt;
}

}  // namespace fsplay
