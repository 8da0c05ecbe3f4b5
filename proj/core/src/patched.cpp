#include "fsplay/patched.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "fsplay/errors.hpp"
#include "fsplay/linalg2.hpp"

namespace fsplay {
namespace {

struct PieceFlow {
  Mat2 A;
  Vec2 b0;
  Vec2 b1;
  Vec2 z0;
  double tau;

  PieceFlow(const LinearizedPiece& p, double eps)
      : A{p.F2[0] / eps, p.F2[1] / eps, p.G2[0], p.G2[1]},
        b0{p.F1 / eps, p.G1},
        b1{0.0, p.Gt},
        z0{p.anchor.x, p.anchor.y},
        tau(p.tau) {}

  [[nodiscard]] Point at(double t) const {
    const Vec2 z = affine_flow(A, b0, b1, z0, t - tau);
    return {z[0], z[1]};
  }
};

struct EventHit {
  double time;
  Point state;
  bool hit;
};

/// First t in (tau, t_max] with event(z(t)) >= 0, or t_max.
EventHit first_event(const PieceFlow& flow, const std::function<double(Point)>& event,
                     double t_max, double guess) {
  const double span = t_max - flow.tau;
  if (!(span > 0.0)) return {flow.tau, flow.at(flow.tau), false};
  const double rho = 2.0 * flow.A.max_abs();
  double cap = span / 16.0;
  if (guess > 0.0) cap = std::min(cap, guess);
  if (rho > 0.0) cap = std::min(cap, 0.25 / rho);
  double h = std::min(cap, guess > 0.0 ? guess / 8.0 : span / 64.0);

  double lo = flow.tau;
  double t = flow.tau;
  Point z_hi{};
  bool found = false;
  while (t < t_max) {
    const double next = std::min(t_max, t + h);
    const Point z = flow.at(next);
    if (event(z) >= 0.0) {
      lo = t;
      t = next;
      z_hi = z;
      found = true;
      break;
    }
    t = next;
    h = std::min(cap, 1.25 * h);
  }
  if (!found) return {t_max, flow.at(t_max), false};

  double hi = t;
  const double tol = 1e-12 * std::max(std::abs(t_max), 1e-300);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Point z = flow.at(mid);
    if (event(z) >= 0.0) {
      hi = mid;
      z_hi = z;
    } else {
      lo = mid;
    }
  }
  return {hi, z_hi, true};
}

double scan_guess(const LinearizedPiece& p, double eps, double theta) {
  const double f = std::abs(p.fast_affine(p.anchor));
  return f > 0.0 ? eps * theta / (2.0 * f) : 0.0;
}

double collar_distance(const BoundaryCurvePair& curves, Point z, double delta) {
  return std::max(band_distance(curves, z) - delta, 0.0);
}

void append_sample(SampledPath& x, SampledPath& y, double t, Point z) {
  if (x.empty() || t > x.back_time()) {
    x.push_back(t, z.x);
    y.push_back(t, z.y);
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

LinearizedPiece linearize_at(const FastSlowSystem& system, Point w, double tau) {
  if (!system.has_jacobians()) {
    throw CapabilityError("linearize_at: the system provides no jacobians");
  }
  const auto df = (*system.fast_jacobian)(w.x, w.y);
  const auto dg = (*system.slow_jacobian)(w.x, w.y, tau);
  LinearizedPiece p;
  p.anchor = w;
  p.tau = tau;
  p.F2 = {df[0], df[1]};
  p.F1 = system.fast(w.x, w.y) - df[0] * w.x - df[1] * w.y;
  p.G2 = {dg[0], dg[1]};
  p.G1 = system.slow(w.x, w.y, tau) - dg[0] * w.x - dg[1] * w.y;
  p.Gt = dg[2];
  return p;
}

Point solve_linear_piece(const LinearizedPiece& piece, double epsilon, double t) {
  if (!(epsilon > 0.0)) throw ArgumentError("solve_linear_piece: epsilon must be > 0");
  if (t < piece.tau) throw DomainError("solve_linear_piece: t precedes the base time");
  if (t == piece.tau) return piece.anchor;
  return PieceFlow(piece, epsilon).at(t);
}

ThetaAdvance advance_until_theta(const LinearizedPiece& piece, double epsilon, double theta,
                                 double t_max, std::size_t samples) {
  if (!(theta > 0.0)) throw ArgumentError("advance_until_theta: theta must be > 0");
  if (!(epsilon > 0.0)) throw ArgumentError("advance_until_theta: epsilon must be > 0");
  const PieceFlow flow(piece, epsilon);
  const double x_anchor = piece.anchor.x;
  const EventHit e = first_event(
      flow, [&](Point z) { return std::abs(z.x - x_anchor) - 0.5 * theta; }, t_max,
      scan_guess(piece, epsilon, theta));

  ThetaAdvance out;
  out.time = e.time;
  out.state = e.state;
  out.hit = e.hit;
  append_sample(out.x, out.y, piece.tau, piece.anchor);
  const std::size_t n = std::max<std::size_t>(samples, 1);
  for (std::size_t i = 1; i < n; ++i) {
    const double t = piece.tau + (e.time - piece.tau) * static_cast<double>(i) / static_cast<double>(n);
    append_sample(out.x, out.y, t, flow.at(t));
  }
  append_sample(out.x, out.y, e.time, e.state);
  return out;
}

CollarConstants compute_collar_constants(const FastSlowSystem& system, const CompactBox& box,
                                         double delta, std::size_t grid) {
  if (!(delta > 0.0)) throw ArgumentError("compute_collar_constants: delta must be > 0");
  if (grid < 2) throw ArgumentError("compute_collar_constants: grid must be >= 2");
  CollarConstants c;
  double max_plus = -std::numeric_limits<double>::infinity();
  double min_minus = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = box.x_range.lo + box.x_range.width() * static_cast<double>(i) / static_cast<double>(grid - 1);
    for (std::size_t j = 0; j < grid; ++j) {
      const double y = box.y_range.lo + box.y_range.width() * static_cast<double>(j) / static_cast<double>(grid - 1);
      if (band_distance(system.curves, {x, y}) < delta) continue;
      const double f = system.fast(x, y);
      if (x > system.curves.upper()(y)) {
        max_plus = std::max(max_plus, f);
        ++c.plus_points;
      } else {
        min_minus = std::min(min_minus, f);
        ++c.minus_points;
      }
    }
  }
  if (c.plus_points == 0 && c.minus_points == 0) {
    throw CollarTooLargeError("no grid point of the box is " + fmt(delta) +
                              "-separated from the band");
  }
  c.f_plus = c.plus_points ? 0.5 * max_plus : 0.0;
  c.f_minus = c.minus_points ? 0.5 * min_minus : 0.0;
  if (c.plus_points && c.minus_points) {
    c.f_m = std::min(std::abs(c.f_plus), c.f_minus);
  } else {
    c.f_m = c.plus_points ? std::abs(c.f_plus) : c.f_minus;
  }
  return c;
}

double compute_epsilon_delta(const BoundsMetadata& bounds, const BoundaryCurvePair& curves,
                             double f_m) {
  if (!(f_m > 0.0)) throw ArgumentError("compute_epsilon_delta: f_m must be > 0");
  const double cfg = bounds.C_FG;
  if (!(cfg > 0.0)) return 1.0;
  const double lpm = curves.combined_lipschitz();
  const double r = 2.0 * cfg / f_m;
  // log of sqrt(2) (C_M + r) e^r + 1
  const double log_core = std::log(std::sqrt(2.0) * (bounds.C_M + r)) + r;
  const double log_bracket = log_core + std::log1p(std::exp(-log_core));
  const double log_value = std::log(f_m / (2.0 * (1.0 + lpm) * cfg)) - log_bracket;
  return std::min(std::exp(log_value), 1.0);
}

ThetaSchedule theta_schedule(double epsilon, double T, double L, double floor) {
  if (!(epsilon > 0.0) || !(T > 0.0) || !(L > 0.0)) {
    throw ArgumentError("theta_schedule: epsilon, T and L must be > 0");
  }
  ThetaSchedule s;
  s.log_nominal = -T * L / (2.0 * epsilon) - std::log1p(1.0 / epsilon);
  s.nominal = std::exp(s.log_nominal);
  s.floored = !(s.nominal > floor);
  s.theta = s.floored ? floor : s.nominal;
  return s;
}

const char* to_string(SegmentKind kind) noexcept {
  return kind == SegmentKind::Linearized ? "linearized" : "exact";
}

PatchSchedule build_patched_solution(const FastSlowSystem& system, double epsilon, Point w0,
                                     double delta, double theta, double T,
                                     const PatchOptions& options) {
  if (!(epsilon > 0.0)) throw ArgumentError("patched: epsilon must be > 0");
  if (!(delta > 0.0)) throw ArgumentError("patched: delta must be > 0");
  if (!(theta > 0.0)) throw ArgumentError("patched: theta must be > 0");
  if (!(T > 0.0)) throw ArgumentError("patched: T must be > 0");
  if (!system.has_jacobians()) throw CapabilityError("patched: the system provides no jacobians");

  PatchSchedule s;
  s.epsilon = epsilon;
  s.delta = delta;
  s.theta = theta;
  s.T = T;
  s.w0 = w0;
  s.theta_floored = options.theta_floored;
  s.box = options.box ? *options.box : working_box(system, epsilon, w0, 0.0, T);
  BoundsOptions bo = options.bounds;
  bo.t0 = 0.0;
  bo.t1 = T;
  s.bounds = estimate_bounds(system, s.box, bo);
  s.collar = compute_collar_constants(system, s.box, delta, options.collar_grid);
  s.epsilon_delta = compute_epsilon_delta(s.bounds, system.curves, s.collar.f_m);
  s.combined_lipschitz = system.curves.combined_lipschitz();

  const double theta_cap = std::min(s.collar.f_m / s.bounds.C_Df, 1.0);
  if (!(theta < theta_cap)) {
    s.admissibility_notes.push_back("theta = " + fmt(theta) + " violates theta < min{f_m/C_Df, 1} = " +
                                    fmt(theta_cap));
  }
  if (!(epsilon < 0.5 * s.epsilon_delta)) {
    s.admissibility_notes.push_back("epsilon = " + fmt(epsilon) +
                                    " violates epsilon < epsilon_delta/2; epsilon_delta = " +
                                    fmt(s.epsilon_delta));
  }
  s.admissible = s.admissibility_notes.empty();
  if (!s.admissible && options.enforce_admissibility) {
    std::string msg = "patched scheme not admissible: ";
    for (std::size_t i = 0; i < s.admissibility_notes.size(); ++i) {
      msg += (i ? "; " : "") + s.admissibility_notes[i];
    }
    throw AdmissibilityError(msg);
  }

  IntegratorConfig exact_cfg = options.exact_config;
  exact_cfg.box.reset();
  const BoundaryCurvePair& curves = system.curves;

  double t = 0.0;
  Point z = w0;
  append_sample(s.x, s.y, t, z);
  while (t < T) {
    PatchSegment seg;
    seg.t_start = t;
    seg.start = z;
    seg.collar_distance = collar_distance(curves, z, delta);
    if (band_distance(curves, z) <= delta) {
      seg.kind = SegmentKind::Exact;
      const EventRun er = integrate_until(system, epsilon, z, t, T, exact_cfg,
                                          [&](Point w, double) {
                                            return band_distance(curves, w) - 2.0 * delta;
                                          });
      for (std::size_t k = 1; k < er.run.x.size(); ++k) {
        append_sample(s.x, s.y, er.run.x.time(k), {er.run.x.value(k), er.run.y.value(k)});
      }
      t = er.hit ? er.run.x.back_time() : T;
      z = {er.run.x.back_value(), er.run.y.back_value()};
    } else {
      seg.kind = SegmentKind::Linearized;
      seg.first_piece = s.pieces.size();
      while (true) {
        if (s.pieces.size() >= options.max_pieces) {
          throw NumericError("patched: piece budget exhausted at t = " + fmt(t));
        }
        const LinearizedPiece piece = linearize_at(system, z, t);
        const PieceFlow flow(piece, epsilon);
        const double x_anchor = z.x;
        const EventHit e = first_event(
            flow,
            [&](Point w) {
              return std::max(std::abs(w.x - x_anchor) - 0.5 * theta,
                              delta - band_distance(curves, w));
            },
            T, scan_guess(piece, epsilon, theta));
        PatchPiece pp;
        pp.piece = piece;
        pp.t_end = e.time;
        pp.end = e.state;
        if (!e.hit) {
          pp.reason = PieceEnd::FinalTime;
        } else if (band_distance(curves, e.state) <= delta) {
          pp.reason = PieceEnd::CollarEntry;
        } else {
          pp.reason = PieceEnd::ThetaHit;
        }
        const std::size_t n = std::max<std::size_t>(options.samples_per_piece, 1);
        for (std::size_t i = 1; i < n; ++i) {
          const double ti = t + (e.time - t) * static_cast<double>(i) / static_cast<double>(n);
          append_sample(s.x, s.y, ti, flow.at(ti));
        }
        append_sample(s.x, s.y, e.time, e.state);
        s.pieces.push_back(pp);
        t = e.time;
        z = e.state;
        if (pp.reason != PieceEnd::ThetaHit || t >= T) break;
      }
      seg.piece_count = s.pieces.size() - seg.first_piece;
    }
    seg.t_end = t;
    seg.end = z;
    s.segments.push_back(seg);
  }
  return s;
}

std::optional<double> transit_time_bound(double epsilon, double epsilon_delta, double distance,
                                         double combined_lipschitz, double f_m, double C_Df) {
  if (!(epsilon < epsilon_delta)) return std::nullopt;
  const double shrink = 1.0 - epsilon / epsilon_delta;
  return epsilon * (2.0 * (1.0 + combined_lipschitz) * distance / (f_m * shrink) + 1.0 / C_Df);
}

std::optional<double> transit_piece_bound(double epsilon, double epsilon_delta, double distance,
                                          double combined_lipschitz, double theta) {
  if (!(epsilon < epsilon_delta)) return std::nullopt;
  const double shrink = 1.0 - epsilon / epsilon_delta;
  return std::ceil(2.0 * (1.0 + combined_lipschitz) * distance / (theta * shrink));
}

PatchBoundsReport evaluate_patch_bounds(const PatchSchedule& s, const FastSlowSystem& system,
                                        const std::optional<EpsRun>& reference) {
  PatchBoundsReport r;
  const double eps = s.epsilon;
  const double f_m = s.collar.f_m;
  const double lpm = s.combined_lipschitz;
  const BoundsMetadata& b = s.bounds;
  const bool eps_ok = eps < s.epsilon_delta;

  r.applicable = s.admissible && !s.theta_floored;
  for (const auto& n : s.admissibility_notes) r.notes.push_back(n);
  if (s.theta_floored) r.notes.push_back("theta floor binds; bounds do not apply");
  if (!eps_ok) {
    r.notes.push_back("epsilon >= epsilon_delta: transit time and piece-count bounds are void");
  }

  r.local_piece_bound = eps * s.theta / f_m;
  for (const auto& p : s.pieces) {
    const double d = p.t_end - p.piece.tau;
    r.max_piece_duration = std::max(r.max_piece_duration, d);
    if (d > r.local_piece_bound) ++r.local_piece_violations;
    if (std::abs(p.end.y - p.piece.anchor.y) > 0.5 * s.theta) ++r.slow_budget_violations;
  }

  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    const PatchSegment& seg = s.segments[i];
    if (i > 0) {
      const PatchSegment& prev = s.segments[i - 1];
      r.max_junction_mismatch =
          std::max({r.max_junction_mismatch, std::abs(prev.end.x - seg.start.x),
                    std::abs(prev.end.y - seg.start.y)});
    }
    if (seg.kind == SegmentKind::Exact) {
      ExactCheck ec;
      ec.segment = i;
      ec.duration = seg.t_end - seg.t_start;
      ec.reaches_T = seg.t_end >= s.T;
      ec.min_duration = s.delta / b.C_g;
      r.exact_segments.push_back(ec);
      continue;
    }
    TransitCheck tc;
    tc.segment = i;
    tc.duration = seg.t_end - seg.t_start;
    tc.pieces = seg.piece_count;
    tc.collar_distance = seg.collar_distance;
    if (eps_ok) {
      const double shrink = 1.0 - eps / s.epsilon_delta;
      const double factor = 2.0 * (1.0 + lpm) * seg.collar_distance / (f_m * shrink) + 1.0 / b.C_Df;
      tc.time_bound = transit_time_bound(eps, s.epsilon_delta, seg.collar_distance, lpm, f_m, b.C_Df);
      tc.piece_bound = transit_piece_bound(eps, s.epsilon_delta, seg.collar_distance, lpm, s.theta);
      tc.K1 = factor * (2.0 * b.C_D2 + eps * eps * eps / (f_m * f_m));
      tc.K2 = std::exp(2.0 * b.L * factor);
    }
    const bool from_above = seg.start.x > system.curves.upper()(seg.start.y);
    for (std::size_t j = seg.first_piece + 1; j < seg.first_piece + seg.piece_count; ++j) {
      const double prev = s.pieces[j - 1].piece.anchor.x;
      const double cur = s.pieces[j].piece.anchor.x;
      if (from_above ? cur > prev : cur < prev) tc.monotone_progress = false;
    }
    r.transits.push_back(tc);
  }

  // Deviation bound theta^2 e^{TL/eps} C(delta) from the C0..C4 chain.
  r.segment_count_bound = s.T * b.C_g / s.delta;
  const double K = std::max(std::ceil(r.segment_count_bound), static_cast<double>(s.segments.size()));
  const double half = std::max(0.5 * (K - 1.0), 1.0);
  const double w0_dist = collar_distance(system.curves, s.w0, s.delta);
  const double C0 = 4.0 * (1.0 + lpm) * w0_dist / f_m + 1.0 / b.C_Df;
  const double C1 = std::max(C0, 4.0 * (1.0 + lpm) * s.delta / f_m + 1.0 / b.C_Df);
  const double C2 = C1 * (2.0 * b.C_D2 + std::pow(s.epsilon_delta, 3) / (f_m * f_m));
  const double C3 = 2.0 * b.L * C1;
  r.log_deviation_bound = 2.0 * std::log(s.theta) + std::log(half) + std::log(C2) + half * C3 +
                          s.T * b.L * (1.0 + 1.0 / eps);
  if (r.log_deviation_bound < std::log(DBL_MAX)) r.deviation_bound = std::exp(r.log_deviation_bound);

  EpsRun ref;
  if (reference) {
    ref = *reference;
  } else {
    IntegratorConfig cfg = IntegratorConfig::oracle();
    ref = integrate(system, eps, s.w0, 0.0, s.T, cfg);
  }
  for (std::size_t k = 0; k < s.x.size(); ++k) {
    const double t = std::min(s.x.time(k), ref.x.back_time());
    const double d = std::abs(ref.x.at(t) - s.x.value(k)) + std::abs(ref.y.at(t) - s.y.value(k));
    r.measured_deviation = std::max(r.measured_deviation, d);
  }
  return r;
}

}  // namespace fsplay
