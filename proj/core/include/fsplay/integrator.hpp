#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "fsplay/path.hpp"
#include "fsplay/system.hpp"

namespace fsplay {

enum class Method {
  AdaptiveEmbedded45,  ///< Dormand-Prince 5(4), explicit
  ImplicitTrapezoid,   ///< Newton-solved trapezoid rule for small epsilon
};

struct IntegratorConfig {
  double rel_tol = 1e-6;
  double abs_tol = 1e-6;
  double max_step = 1e-2;
  double min_step = 1e-12;
  Method method = Method::AdaptiveEmbedded45;
  /// When set, leaving the box raises BoxEscapeError.
  std::optional<CompactBox> box;
  std::size_t max_steps = 20'000'000;

  /// rel = abs = 1e-8, used for reference ("oracle") runs.
  static IntegratorConfig oracle();
  /// rel = abs = 1e-6, used for sweeps.
  static IntegratorConfig sweep();
};

/// Solution of the full epsilon-system on the accepted-step grid.
struct EpsRun {
  double epsilon = 0.0;
  SampledPath x;
  SampledPath y;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  /// Largest normalized embedded error estimate over accepted steps.
  double max_error_estimate = 0.0;
  /// Number of accepted steps whose endpoints lie in different regions.
  std::size_t region_crossings = 0;
};

/// Integrates  eps x' = f(x, y),  y' = g(x, y, t)  from w0 on [t0, t1].
///
/// With the explicit method, steps never exceed max(eps/2, min_step)
/// while f != 0 at the step start. Throws StiffnessError on step
/// underflow, BoxEscapeError when the path leaves `config.box`,
/// EvaluationError on non-finite field values.
[[nodiscard]] EpsRun integrate(const FastSlowSystem& system, double epsilon, Point w0, double t0,
                               double t1, const IntegratorConfig& config);

/// Event function for integrate_until; integration stops at the first
/// time its value becomes >= 0.
using EventFunction = std::function<double(Point w, double t)>;

struct EventRun {
  EpsRun run;
  bool hit = false;
};

/// As integrate, but stops at the first root of `event` (located by
/// bisection on the last step size to ~1e-13 relative time). The last
/// sample of the returned run is the event point.
[[nodiscard]] EventRun integrate_until(const FastSlowSystem& system, double epsilon, Point w0,
                                       double t0, double t1, const IntegratorConfig& config,
                                       const EventFunction& event);

struct ResidualReport {
  double fast_defect = 0.0;  ///< max |eps dx/dt - f| at cell midpoints
  double slow_defect = 0.0;  ///< max |dy/dt - g| at cell midpoints
};

/// Defect of the linear dense output: difference quotients against the
/// fields evaluated at each cell midpoint.
[[nodiscard]] ResidualReport residual_check(const EpsRun& run, const FastSlowSystem& system,
                                            double epsilon);

/// Working box M: bounding box of a coarse run of the requested problem,
/// grown by `inflation` of the width on every side.
[[nodiscard]] CompactBox working_box(const FastSlowSystem& system, double epsilon, Point w0,
                                     double t0, double t1, double inflation = 0.1);

}  // namespace fsplay
