#pragma once

#include <cstddef>

#include "fsplay/curves.hpp"
#include "fsplay/integrator.hpp"
#include "fsplay/path.hpp"
#include "fsplay/system.hpp"

namespace fsplay {

/// p(t_k) = min{max{x(t_k), F-(y(t_k))}, F+(y(t_k))}: the vertical
/// projection of the run onto the band.
[[nodiscard]] SampledPath project_run(const EpsRun& run, const BoundaryCurvePair& curves);

/// max_k |p[k+1] - p[k]| / (t[k+1] - t[k]). Needs >= 2 samples.
[[nodiscard]] double projection_lipschitz_estimate(const SampledPath& p);

struct GapNorms {
  double sup_gap = 0.0;
  double lq_gap = 0.0;
};

/// Sup and trapezoid L^q norms of x - p on the run grid.
[[nodiscard]] GapNorms gap_norms(const EpsRun& run, const SampledPath& p, double q = 2.0);

struct SignConditionReport {
  std::size_t violations = 0;
  double worst = 0.0;  ///< largest f * sign(x - p) seen
};

/// Checks f(x, y) * sign(x - p) <= 0 at every grid point of the run.
[[nodiscard]] SignConditionReport check_sign_condition(const EpsRun& run,
                                                       const FastSlowSystem& system,
                                                       const SampledPath& p);

/// Largest distance of path values from [F-(y), F+(y)]; 0 means confined.
[[nodiscard]] double band_confinement_violation(const SampledPath& x, const SampledPath& y,
                                                const BoundaryCurvePair& curves);

}  // namespace fsplay
