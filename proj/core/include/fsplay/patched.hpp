#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fsplay/integrator.hpp"
#include "fsplay/path.hpp"
#include "fsplay/system.hpp"

namespace fsplay {

/// First-order expansion of the fields at an anchor (w, tau):
///   eps x' = F1 + F2 . (x, y),   y' = G1 + G2 . (x, y) + Gt (t - tau).
struct LinearizedPiece {
  Point anchor;
  double tau = 0.0;
  double F1 = 0.0;
  std::array<double, 2> F2{};
  double G1 = 0.0;
  std::array<double, 2> G2{};
  double Gt = 0.0;

  [[nodiscard]] double fast_affine(Point z) const noexcept {
    return F1 + F2[0] * z.x + F2[1] * z.y;
  }
  [[nodiscard]] double slow_affine(Point z, double t) const noexcept {
    return G1 + G2[0] * z.x + G2[1] * z.y + Gt * (t - tau);
  }
};

/// Throws CapabilityError when the system has no jacobians.
[[nodiscard]] LinearizedPiece linearize_at(const FastSlowSystem& system, Point w, double tau);

/// Closed-form solution of the affine system started at the anchor.
/// Throws DomainError for t < tau.
[[nodiscard]] Point solve_linear_piece(const LinearizedPiece& piece, double epsilon, double t);

struct ThetaAdvance {
  SampledPath x;  ///< samples of the piece solution on [tau, time]
  SampledPath y;
  double time = 0.0;
  Point state;
  bool hit = false;  ///< |x - x_anchor| reached theta/2 before t_max
};

/// Runs the piece until |x(t) - x_anchor| = theta/2 (bisection to
/// 1e-12 * t_max) or t_max.
[[nodiscard]] ThetaAdvance advance_until_theta(const LinearizedPiece& piece, double epsilon,
                                               double theta, double t_max,
                                               std::size_t samples = 16);

struct CollarConstants {
  double f_plus = 0.0;   ///< half the largest f over points of M+ at distance >= delta
  double f_minus = 0.0;  ///< half the smallest f over points of M- at distance >= delta
  double f_m = 0.0;      ///< min{|f_plus|, f_minus}, over the sides that have points
  std::size_t plus_points = 0;
  std::size_t minus_points = 0;
};

/// Grid evaluation on `grid` x `grid` points of the box. Throws
/// CollarTooLargeError when no grid point is delta-separated from the band.
[[nodiscard]] CollarConstants compute_collar_constants(const FastSlowSystem& system,
                                                       const CompactBox& box, double delta,
                                                       std::size_t grid = 201);

/// Admissibility threshold of the patched scheme (capped at 1; returns 1
/// when C_FG == 0). Evaluated in log space; may underflow to 0.
[[nodiscard]] double compute_epsilon_delta(const BoundsMetadata& bounds,
                                           const BoundaryCurvePair& curves, double f_m);

struct ThetaSchedule {
  double theta = 0.0;
  double nominal = 0.0;      ///< exp(-TL/(2 eps)) / (1 + 1/eps), possibly underflowed
  double log_nominal = 0.0;  ///< its logarithm, always finite
  bool floored = false;      ///< floor binds: bound checks do not apply
};

[[nodiscard]] ThetaSchedule theta_schedule(double epsilon, double T, double L, double floor);

enum class SegmentKind { Linearized, Exact };

[[nodiscard]] const char* to_string(SegmentKind kind) noexcept;

enum class PieceEnd { ThetaHit, CollarEntry, FinalTime };

struct PatchPiece {
  LinearizedPiece piece;
  double t_end = 0.0;
  Point end;
  PieceEnd reason = PieceEnd::FinalTime;
};

struct PatchSegment {
  SegmentKind kind = SegmentKind::Exact;
  double t_start = 0.0;
  double t_end = 0.0;
  Point start;
  Point end;
  /// dist(start, M0 + B(0, delta)) = max(band_distance - delta, 0).
  double collar_distance = 0.0;
  std::size_t first_piece = 0;  ///< linearized segments only
  std::size_t piece_count = 0;
};

struct PatchOptions {
  bool enforce_admissibility = true;
  /// Set when theta came from a floored theta_schedule.
  bool theta_floored = false;
  IntegratorConfig exact_config = IntegratorConfig::oracle();
  std::size_t samples_per_piece = 2;
  std::size_t collar_grid = 201;
  BoundsOptions bounds;  ///< the time window is replaced by [0, T]
  std::optional<CompactBox> box;
  std::size_t max_pieces = 5'000'000;
};

struct PatchSchedule {
  double epsilon = 0.0;
  double delta = 0.0;
  double theta = 0.0;
  double T = 0.0;
  Point w0;
  bool theta_floored = false;
  double epsilon_delta = 0.0;
  bool admissible = false;
  std::vector<std::string> admissibility_notes;
  CompactBox box;
  BoundsMetadata bounds;
  CollarConstants collar;
  double combined_lipschitz = 0.0;
  std::vector<PatchSegment> segments;
  std::vector<PatchPiece> pieces;
  SampledPath x;
  SampledPath y;
};

/// Alternates exact integration inside the delta-collar (until the
/// 2 delta-collar boundary or T) with piecewise-linearized transport outside
/// (pieces end at theta/2 fast deviation, at collar entry, or at T).
///
/// Requires epsilon < epsilon_delta / 2 and theta < min{f_m / C_Df, 1};
/// otherwise throws AdmissibilityError naming the failed bound, unless
/// `enforce_admissibility` is off, in which case the violation is recorded
/// in `admissibility_notes`.
[[nodiscard]] PatchSchedule build_patched_solution(const FastSlowSystem& system, double epsilon,
                                                   Point w0, double delta, double theta, double T,
                                                   const PatchOptions& options = {});

/// Upper bound on the duration of one fast transit that starts at collar
/// distance `distance`. Empty when epsilon >= epsilon_delta.
[[nodiscard]] std::optional<double> transit_time_bound(double epsilon, double epsilon_delta,
                                                       double distance, double combined_lipschitz,
                                                       double f_m, double C_Df);

/// Ceiling on the number of linearized pieces in such a transit. Empty when
/// epsilon >= epsilon_delta.
[[nodiscard]] std::optional<double> transit_piece_bound(double epsilon, double epsilon_delta,
                                                        double distance,
                                                        double combined_lipschitz, double theta);

struct TransitCheck {
  std::size_t segment = 0;
  double duration = 0.0;
  std::size_t pieces = 0;
  double collar_distance = 0.0;
  /// Empty when epsilon >= epsilon_delta (the bound formula is void).
  std::optional<double> time_bound;
  std::optional<double> piece_bound;
  std::optional<double> K1;
  std::optional<double> K2;
  /// Anchor fast coordinates move monotonically towards the band.
  bool monotone_progress = true;
};

struct ExactCheck {
  std::size_t segment = 0;
  double duration = 0.0;
  bool reaches_T = false;
  double min_duration = 0.0;  ///< delta / C_g
  [[nodiscard]] bool ok() const noexcept { return reaches_T || duration > min_duration; }
};

struct PatchBoundsReport {
  /// Theory preconditions hold and theta is unfloored.
  bool applicable = false;
  std::vector<std::string> notes;
  std::vector<TransitCheck> transits;
  std::vector<ExactCheck> exact_segments;
  double local_piece_bound = 0.0;  ///< eps theta / f_m
  double max_piece_duration = 0.0;
  std::size_t local_piece_violations = 0;
  /// Pieces whose slow coordinate moved more than theta/2 from the anchor.
  std::size_t slow_budget_violations = 0;
  double segment_count_bound = 0.0;  ///< T C_g / delta
  double log_deviation_bound = 0.0;
  /// Empty when the bound overflows double precision.
  std::optional<double> deviation_bound;
  /// sup over the patched grid of |x - x~| + |y - y~|.
  double measured_deviation = 0.0;
  double max_junction_mismatch = 0.0;
};

/// Evaluates the transit time, piece count, K1/K2, exact-segment duration
/// and deviation bounds for a schedule and compares them with measured
/// values. `reference` is the exact run on [0, T]; computed with the
/// oracle tolerances when omitted.
[[nodiscard]] PatchBoundsReport evaluate_patch_bounds(const PatchSchedule& schedule,
                                                      const FastSlowSystem& system,
                                                      const std::optional<EpsRun>& reference = {});

}  // namespace fsplay
