#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>

#include "fsplay/curves.hpp"
#include "fsplay/path.hpp"

namespace fsplay {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] bool contains(double v) const noexcept { return v >= lo && v <= hi; }
  [[nodiscard]] double width() const noexcept { return hi - lo; }
};

/// The compact rectangle M that contains every simulated trajectory.
struct CompactBox {
  Interval x_range;
  Interval y_range;

  [[nodiscard]] bool contains(Point p) const noexcept {
    return x_range.contains(p.x) && y_range.contains(p.y);
  }
  /// Grows every side by `fraction` of the corresponding width (at least
  /// `fraction` in absolute terms for degenerate widths).
  [[nodiscard]] CompactBox inflated(double fraction) const;
  /// max ||w|| over M, attained at a corner.
  [[nodiscard]] double max_corner_norm() const noexcept;

  /// Smallest box holding both paths.
  static CompactBox bounding(const SampledPath& x, const SampledPath& y);
};

/// Regions of M relative to the band: M+ above F+, M0 the closed band,
/// M- below F-.
enum class Region { Plus, Zero, Minus };

[[nodiscard]] std::string_view to_string(Region r) noexcept;

using FastField = std::function<double(double x, double y)>;
using SlowField = std::function<double(double x, double y, double t)>;
/// (df/dx, df/dy)
using FastJacobian = std::function<std::array<double, 2>(double x, double y)>;
/// (dg/dx, dg/dy, dg/dt)
using SlowJacobian = std::function<std::array<double, 3>(double x, double y, double t)>;

/// The planar system  eps x' = f(x, y),  y' = g(x, y, t).
///
/// `curves` must agree with the sign structure of f: f = 0 on the band,
/// f < 0 above it and f > 0 below it (see check_sign_structure).
struct FastSlowSystem {
  FastField fast;
  SlowField slow;
  std::optional<FastJacobian> fast_jacobian;
  std::optional<SlowJacobian> slow_jacobian;
  BoundaryCurvePair curves;

  [[nodiscard]] bool has_jacobians() const noexcept {
    return fast_jacobian.has_value() && slow_jacobian.has_value();
  }
};

/// Band membership is closed on both sides: ties at x = F±(y) give M0.
[[nodiscard]] Region classify_region(const BoundaryCurvePair& curves, Point p);
/// As above, with a domain check; throws DomainError outside `box`.
[[nodiscard]] Region classify_region(const FastSlowSystem& system, const CompactBox& box, Point p);

/// Euclidean distance from `p` to the closed band; zero exactly on M0.
[[nodiscard]] double band_distance(const BoundaryCurvePair& curves, Point p);
[[nodiscard]] double band_distance(const FastSlowSystem& system, const CompactBox& box, Point p);

/// Sup-norm bounds over M (and the sampled time window).
struct BoundsMetadata {
  double C_f = 0.0;
  double C_g = 0.0;
  double C_Dg = 0.0;
  double C_Df = 0.0;
  double C_D2 = 0.0;
  double C_M = 0.0;
  double L_f = 0.0;
  double L_g = 0.0;
  double L = 0.0;
  double C_FG = 0.0;
  /// Grid points dropped from derivative bounds because the finite
  /// difference was not stable under step doubling (seams of f or g).
  std::size_t nonsmooth_points = 0;
};

struct BoundsOptions {
  std::size_t grid_resolution = 61;  ///< points per axis, >= 2
  std::size_t time_samples = 201;
  double t0 = 0.0;
  double t1 = 1.0;
  double inflation = 1.1;
};

/// Grid maxima of |f|, |g|, ||Df||, ||Dg||, ||D²f||, ||D²g|| and of the
/// linearization coefficients, each multiplied by `inflation`.
///
/// L_f and L_g are Lipschitz constants with respect to the state (x, y);
/// C_Dg includes the time derivative. Analytic jacobians are used when the
/// system provides them, central differences otherwise. Second derivatives
/// are always finite differences of the first derivatives. The G1
/// coefficient contains dg/dt * (t - t0), which is bounded using the full
/// window length t1 - t0.
[[nodiscard]] BoundsMetadata estimate_bounds(const FastSlowSystem& system, const CompactBox& box,
                                             const BoundsOptions& options = {});

/// Number of grid points of `box` where f disagrees with the sign structure
/// implied by the curves.
[[nodiscard]] std::size_t check_sign_structure(const FastSlowSystem& system,
                                               const CompactBox& box, std::size_t resolution);

/// Number of grid points where the supplied jacobians differ from central
/// differences by more than `rel_tol` (relative to max(1, |value|)).
/// Points where f or g is not differentiable at the difference resolution
/// are skipped. Returns 0 if the system has no jacobians.
[[nodiscard]] std::size_t check_jacobians(const FastSlowSystem& system, const CompactBox& box,
                                          std::size_t resolution, double t0, double t1,
                                          double rel_tol = 1e-5);

}  // namespace fsplay
