#pragma once

#include <optional>

#include "fsplay/curves.hpp"
#include "fsplay/integrator.hpp"
#include "fsplay/path.hpp"
#include "fsplay/system.hpp"

namespace fsplay {

struct LimitRun {
  SampledPath x;  ///< play output, band-confined
  SampledPath y;
};

/// Singular-limit system  y' = g(x, y, t),  x = play of y.
///
/// Uniform grid on [t0, t0 + T] with n = round(T / dt) cells. Each step
/// advances y by one classical RK4 step with x frozen at x_k and then
/// applies the play update with y_{k+1}. Throws EvaluationError when g
/// returns a non-finite value.
[[nodiscard]] LimitRun solve_limit(const SlowField& g, const BoundaryCurvePair& curves, double x0,
                                   double y0, double T, double dt, double t0 = 0.0);

struct UniquenessProfile {
  /// Running sup over [0, t] of max(|x1 - x2|, |y1 - y2|).
  SampledPath deviation;
  /// Least-squares slope of log(deviation) against t (0 if never positive).
  double growth_rate = 0.0;
  /// Slope over the second half exceeds twice the first-half slope plus one.
  bool super_exponential = false;
};

/// Runs solve_limit from (x0, y0) and from both coordinates shifted by
/// `perturbation` (which must lie in [0, 1e-6]).
[[nodiscard]] UniquenessProfile uniqueness_probe(const SlowField& g,
                                                 const BoundaryCurvePair& curves, double x0,
                                                 double y0, double T, double dt,
                                                 double perturbation);

/// First grid time of the run with band_distance <= 2 * delta_small, i.e.
/// the end of the initial layer. Empty when the run never gets that close.
[[nodiscard]] std::optional<double> layer_exit_time(const EpsRun& run,
                                                    const BoundaryCurvePair& curves,
                                                    double delta_small = 0.05);

}  // namespace fsplay
