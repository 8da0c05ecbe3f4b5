#include "fsplay/play.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fsplay/errors.hpp"

namespace fsplay {

PlayState play_init(double x0, double y0, const BoundaryCurvePair& curves) {
  return {std::min(std::max(curves.lower()(y0), x0), curves.upper()(y0)), curves};
}

PlayState play_step(const PlayState& state, double y_new) {
  return {state.curves.clamp(state.current, y_new), state.curves};
}

SampledPath play_evaluate(const SampledPath& input, double x0, const BoundaryCurvePair& curves) {
  if (input.empty()) throw ArgumentError("play_evaluate: empty input");
  std::vector<double> out(input.size());
  double x = std::min(std::max(curves.lower()(input.value(0)), x0), curves.upper()(input.value(0)));
  out[0] = x;
  for (std::size_t k = 1; k < input.size(); ++k) {
    x = curves.clamp(x, input.value(k));
    out[k] = x;
  }
  return {std::vector<double>(input.times().begin(), input.times().end()), std::move(out)};
}

ViReport check_variational_inequality(const SampledPath& x, const SampledPath& y,
                                      const BoundaryCurvePair& curves, double tol) {
  if (x.size() != y.size() || !std::equal(x.times().begin(), x.times().end(), y.times().begin())) {
    throw ArgumentError("check_variational_inequality: x and y are not on the same grid");
  }
  ViReport r;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lo = curves.lower()(y.value(k));
    const double hi = curves.upper()(y.value(k));
    const double v = x.value(k);
    r.max_band_violation = std::max({r.max_band_violation, lo - v, v - hi});
  }
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double dt = x.time(k + 1) - x.time(k);
    const double dx = x.value(k + 1) - x.value(k);
    const double v = x.value(k + 1);
    const double lo = curves.lower()(y.value(k + 1));
    const double hi = curves.upper()(y.value(k + 1));
    // xi = F- and xi = F+ are the extreme test points of dx (x - xi) <= 0.
    double viol = 0.0;
    if (dx > 0.0 && std::abs(v - lo) > tol) viol = std::max(viol, dx * (v - lo));
    if (dx < 0.0 && std::abs(hi - v) > tol) viol = std::max(viol, -dx * (hi - v));
    r.max_vi_violation = std::max(r.max_vi_violation, viol / dt);
  }
  return r;
}

double check_rate_independence(const SampledPath& input, double x0, const BoundaryCurvePair& curves,
                               std::span<const double> new_times) {
  if (new_times.size() != input.size()) {
    throw ArgumentError("check_rate_independence: reparameterized grid has the wrong size");
  }
  if (input.empty()) throw ArgumentError("check_rate_independence: empty input");
  for (std::size_t k = 1; k < new_times.size(); ++k) {
    if (!(new_times[k] > new_times[k - 1])) {
      throw ArgumentError("check_rate_independence: time change is not monotone at index " +
                          std::to_string(k));
    }
  }
  if (new_times.front() != input.front_time() || new_times.back() != input.back_time()) {
    throw ArgumentError("check_rate_independence: time change must fix both endpoints");
  }
  const SampledPath moved(std::vector<double>(new_times.begin(), new_times.end()),
                          std::vector<double>(input.values().begin(), input.values().end()));
  const SampledPath reference = play_evaluate(input, x0, curves);
  const SampledPath transported = play_evaluate(moved, x0, curves);
  double dev = 0.0;
  for (std::size_t k = 0; k < input.size(); ++k) {
    // phi(s_k) = t_k exactly, so the reference is read at its own grid point
    dev = std::max(dev, std::abs(transported.value(k) - reference.value(k)));
  }
  return dev;
}

double check_volterra(const SampledPath& input, double x0, const BoundaryCurvePair& curves,
                      std::size_t cut_index, const InputAlteration& alter) {
  if (input.empty() || cut_index >= input.size()) {
    throw ArgumentError("check_volterra: cut index outside the grid");
  }
  std::vector<double> altered(input.values().begin(), input.values().end());
  for (std::size_t k = cut_index + 1; k < altered.size(); ++k) {
    altered[k] = alter(input.time(k), altered[k]);
  }
  const SampledPath other(std::vector<double>(input.times().begin(), input.times().end()),
                          std::move(altered));
  const SampledPath a = play_evaluate(input, x0, curves);
  const SampledPath b = play_evaluate(other, x0, curves);
  double dev = 0.0;
  for (std::size_t k = 0; k <= cut_index; ++k) dev = std::max(dev, std::abs(a.value(k) - b.value(k)));
  return dev;
}

}  // namespace fsplay
