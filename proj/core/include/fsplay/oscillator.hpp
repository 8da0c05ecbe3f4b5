#pragma once

#include <atomic>
#include <cstddef>
#include <string_view>
#include <vector>

#include "fsplay/integrator.hpp"
#include "fsplay/system.hpp"

namespace fsplay {

/// Forced piecewise-linear oscillator
///   eps x' = f(x, y),  f = y - x - 1 (x < y - 1), y - x + 1 (x > y + 1), 0 otherwise,
///   y'     = a sin(2 pi omega t) + b x + c y,
/// with band curves F±(y) = y ± 1.
struct OscillatorParams {
  double a = 1.0;
  double b = -1.0;
  double c = 0.2;
  double omega = 4.0;
  double epsilon = 0.01;
  /// |x| is clipped to this value inside g so the slow field stays bounded.
  double x_clip = 10.0;

  [[nodiscard]] bool bounded() const noexcept { return b + c < 0.0; }
  [[nodiscard]] double period() const noexcept { return 1.0 / omega; }

  /// Known names: "netushil-oscillator". Throws ArgumentError otherwise.
  static OscillatorParams preset(std::string_view name);
};

/// Counts evaluations of g where the x clip was active.
struct ClipMonitor {
  std::atomic<std::size_t> activations{0};
};

/// The oscillator as a FastSlowSystem, with analytic jacobians. When
/// `monitor` is given it must outlive the returned system.
[[nodiscard]] FastSlowSystem make_system(const OscillatorParams& params,
                                         ClipMonitor* monitor = nullptr);

/// Which boundary curve the fast variable rides: Plus means x = y + 1.
enum class Branch { Plus, Minus };

struct SlowBranchSolution {
  double average = 0.0;      ///< the constant part (averaged equilibrium)
  double transient = 0.0;    ///< coefficient of exp((b + c) t)
  double harmonic = 0.0;     ///< the periodic part at t
  double value = 0.0;        ///< average + transient * exp((b + c) t) + harmonic
};

/// Closed-form solution of y' = a sin(2 pi omega t) + (b + c) y ± b with
/// y(0) = y0 (+ for Branch::Plus). Throws BorderlineError when b + c == 0.
[[nodiscard]] SlowBranchSolution slow_subsystem_exact(const OscillatorParams& params, double y0,
                                                      Branch branch, double t);

/// The same ODE started from y(t_start) = y_start.
[[nodiscard]] double slow_branch_from(const OscillatorParams& params, Branch branch,
                                      double t_start, double y_start, double t);

/// Right-hand side of the branch ODE.
[[nodiscard]] double slow_branch_rhs(const OscillatorParams& params, Branch branch, double y,
                                     double t);

/// Analytic derivative of the closed form minus the right-hand side at t.
[[nodiscard]] double slow_branch_residual(const OscillatorParams& params, double y0,
                                          Branch branch, double t);

/// Integrates the branch ODE with fixed-step RK4 and returns the sup
/// deviation from the closed form on [0, T].
[[nodiscard]] double verify_slow_closed_form(const OscillatorParams& params, double y0,
                                             Branch branch, double T, double dt);

struct BranchEquilibrium {
  double y = 0.0;
  double x = 0.0;  ///< F±(y)
};

struct AveragedEquilibria {
  BranchEquilibrium minus;  ///< (Y-, F-(Y-))
  BranchEquilibrium plus;   ///< (Y+, F+(Y+))
  /// Long-time averages (1/t) int y± dt predicted by the closed form.
  double time_average_minus = 0.0;
  double time_average_plus = 0.0;
};

/// Throws BoundednessError when b + c >= 0.
[[nodiscard]] AveragedEquilibria averaged_equilibria(const OscillatorParams& params);

struct DwellOptions {
  double tolerance = 0.05;    ///< max |x - F-(y)| at the samples that anchor a dwell
  double max_gap = 0.25;      ///< excursions shorter than this are bridged
  double min_duration = 1.0;  ///< shorter dwells are ignored
  double t_from = 0.0;        ///< ignore samples before this time
};

struct DwellSegment {
  std::size_t first = 0;  ///< index range [first, last] in the run grid
  std::size_t last = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  double mean_y = 0.0;
  /// Sign changes of the y difference quotient: small-amplitude oscillations.
  std::size_t sao_count = 0;
};

/// Stretches of the run spent next to C-: maximal runs of samples with
/// |x - F-(y)| <= tolerance, merged across excursions shorter than
/// max_gap (the small oscillations that dip into the band).
[[nodiscard]] std::vector<DwellSegment> lower_dwell_segments(const EpsRun& run,
                                                             const BoundaryCurvePair& curves,
                                                             const DwellOptions& options = {});

/// Time-weighted mean of y over all segments. Throws DomainError if empty.
[[nodiscard]] double dwell_average(const std::vector<DwellSegment>& segments);

}  // namespace fsplay
