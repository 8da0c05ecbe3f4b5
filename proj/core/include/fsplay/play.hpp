#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "fsplay/curves.hpp"
#include "fsplay/path.hpp"

namespace fsplay {

/// Memory of the discrete generalized play: the current output and the
/// curves that bound it.
struct PlayState {
  double current = 0.0;
  BoundaryCurvePair curves;
};

/// current = min{max{F-(y0), x0}, F+(y0)}.
[[nodiscard]] PlayState play_init(double x0, double y0, const BoundaryCurvePair& curves);

/// Clamp update; depends only on (current, y_new), never on elapsed time.
[[nodiscard]] PlayState play_step(const PlayState& state, double y_new);

/// Output of the play on the input's own grid.
///
/// The clamp recursion is the exact play of the piecewise-affine
/// interpolant of the input, so no time stepping error enters. Throws
/// ArgumentError for an empty input.
[[nodiscard]] SampledPath play_evaluate(const SampledPath& input, double x0,
                                        const BoundaryCurvePair& curves);

struct ViReport {
  double max_band_violation = 0.0;
  double max_vi_violation = 0.0;
};

/// Discrete check of the play's variational inequality on a common grid.
///
/// max_band_violation is the largest distance of x[k] from
/// [F-(y[k]), F+(y[k])]. For each cell with forward difference dx, an
/// increase is admissible only when x[k+1] sits on F-(y[k+1]) and a
/// decrease only on F+(y[k+1]) (within `tol`); otherwise the cell
/// contributes max(0, dx * (x - F-), -dx * (F+ - x)) / dt.
[[nodiscard]] ViReport check_variational_inequality(const SampledPath& x, const SampledPath& y,
                                                    const BoundaryCurvePair& curves, double tol);

/// Transports the input to a reparameterized grid and compares outputs.
///
/// `new_times` defines the monotone time change phi as the piecewise-linear
/// map new_times[k] -> input.time(k); it must be strictly increasing, of the
/// input's size, and share the first and last time (phi(0)=0, phi(T)=T).
/// Returns max_k |play(y o phi)(s_k) - play(y)(phi(s_k))|.
[[nodiscard]] double check_rate_independence(const SampledPath& input, double x0,
                                             const BoundaryCurvePair& curves,
                                             std::span<const double> new_times);

/// Replacement applied to input samples after the cut: (t, y) -> y'.
using InputAlteration = std::function<double(double t, double y)>;

/// Max deviation on [0, t_cut] between the play of the input and the play
/// of the input altered after `cut_index`. Volterra causality makes it 0.
[[nodiscard]] double check_volterra(const SampledPath& input, double x0,
                                    const BoundaryCurvePair& curves, std::size_t cut_index,
                                    const InputAlteration& alter = [](double, double) {
                                      return 10.0;
                                    });

}  // namespace fsplay
