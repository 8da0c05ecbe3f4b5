#include "fsplay/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fsplay/errors.hpp"

namespace fsplay {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double branch_sign(Branch b) { return b == Branch::Plus ? 1.0 : -1.0; }

double harmonic_denominator(const OscillatorParams& p) {
  const double s = p.b + p.c;
  return s * s + two_pi * two_pi * p.omega * p.omega;
}

double harmonic_part(const OscillatorParams& p, double t) {
  const double s = p.b + p.c;
  const double w = two_pi * p.omega;
  return -(p.a * s * std::sin(w * t) + w * p.a * std::cos(w * t)) / harmonic_denominator(p);
}

double harmonic_rate(const OscillatorParams& p, double t) {
  const double s = p.b + p.c;
  const double w = two_pi * p.omega;
  return -(p.a * s * w * std::cos(w * t) - w * w * p.a * std::sin(w * t)) /
         harmonic_denominator(p);
}

void require_nonborderline(const OscillatorParams& p) {
  if (p.b + p.c == 0.0) {
    throw BorderlineError("b + c = 0: the slow branch closed form does not apply");
  }
}

}  // namespace

OscillatorParams OscillatorParams::preset(std::string_view name) {
  if (name == "netushil-oscillator") return OscillatorParams{};
  throw ArgumentError("unknown preset '" + std::string(name) + "'");
}

FastSlowSystem make_system(const OscillatorParams& params, ClipMonitor* monitor) {
  const OscillatorParams p = params;
  FastSlowSystem s{
      [](double x, double y) {
        if (x < y - 1.0) return y - x - 1.0;
        if (x > y + 1.0) return y - x + 1.0;
        return 0.0;
      },
      [p, monitor](double x, double y, double t) {
        double xc = x;
        if (std::abs(x) > p.x_clip) {
          xc = std::copysign(p.x_clip, x);
          if (monitor) monitor->activations.fetch_add(1, std::memory_order_relaxed);
        }
        return p.a * std::sin(two_pi * p.omega * t) + p.b * xc + p.c * y;
      },
      std::nullopt,
      std::nullopt,
      BoundaryCurvePair::unit_slope(1.0)};
  s.fast_jacobian = [](double x, double y) -> std::array<double, 2> {
    if (x < y - 1.0 || x > y + 1.0) return {-1.0, 1.0};
    return {0.0, 0.0};
  };
  s.slow_jacobian = [p](double x, double, double t) -> std::array<double, 3> {
    const double gx = std::abs(x) > p.x_clip ? 0.0 : p.b;
    return {gx, p.c, two_pi * p.omega * p.a * std::cos(two_pi * p.omega * t)};
  };
  return s;
}

SlowBranchSolution slow_subsystem_exact(const OscillatorParams& p, double y0, Branch branch,
                                        double t) {
  require_nonborderline(p);
  const double s = p.b + p.c;
  const double sg = branch_sign(branch);
  SlowBranchSolution out;
  out.average = -sg * p.b / s;
  out.transient = sg * p.b / s + two_pi * p.a * p.omega / harmonic_denominator(p) + y0;
  out.harmonic = harmonic_part(p, t);
  out.value = out.average + out.transient * std::exp(s * t) + out.harmonic;
  return out;
}

double slow_branch_from(const OscillatorParams& p, Branch branch, double t_start, double y_start,
                        double t) {
  require_nonborderline(p);
  const double s = p.b + p.c;
  const double avg = -branch_sign(branch) * p.b / s;
  const double coef = y_start - avg - harmonic_part(p, t_start);
  return avg + coef * std::exp(s * (t - t_start)) + harmonic_part(p, t);
}

double slow_branch_rhs(const OscillatorParams& p, Branch branch, double y, double t) {
  return p.a * std::sin(two_pi * p.omega * t) + (p.b + p.c) * y + branch_sign(branch) * p.b;
}

double slow_branch_residual(const OscillatorParams& p, double y0, Branch branch, double t) {
  const SlowBranchSolution sol = slow_subsystem_exact(p, y0, branch, t);
  const double s = p.b + p.c;
  const double rate = sol.transient * s * std::exp(s * t) + harmonic_rate(p, t);
  return rate - slow_branch_rhs(p, branch, sol.value, t);
}

double verify_slow_closed_form(const OscillatorParams& p, double y0, Branch branch, double T,
                               double dt) {
  require_nonborderline(p);
  if (!(dt > 0.0) || !(T > 0.0)) throw ArgumentError("verify_slow_closed_form: need T, dt > 0");
  const auto n = static_cast<std::size_t>(std::max(1.0, std::round(T / dt)));
  const double h = T / static_cast<double>(n);
  double y = y0;
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = h * static_cast<double>(k);
    const double k1 = slow_branch_rhs(p, branch, y, t);
    const double k2 = slow_branch_rhs(p, branch, y + 0.5 * h * k1, t + 0.5 * h);
    const double k3 = slow_branch_rhs(p, branch, y + 0.5 * h * k2, t + 0.5 * h);
    const double k4 = slow_branch_rhs(p, branch, y + h * k3, t + h);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double exact = slow_subsystem_exact(p, y0, branch, h * static_cast<double>(k + 1)).value;
    worst = std::max(worst, std::abs(y - exact));
  }
  return worst;
}

AveragedEquilibria averaged_equilibria(const OscillatorParams& p) {
  if (!p.bounded()) {
    throw BoundednessError("b + c >= 0: solutions are not bounded, no averaged equilibria");
  }
  const double s = p.b + p.c;
  AveragedEquilibria e;
  e.minus.y = p.b / s;
  e.minus.x = e.minus.y - 1.0;
  e.plus.y = -p.b / s;
  e.plus.x = e.plus.y + 1.0;
  e.time_average_minus = e.minus.y;
  e.time_average_plus = e.plus.y;
  return e;
}

std::vector<DwellSegment> lower_dwell_segments(const EpsRun& run, const BoundaryCurvePair& curves,
                                               const DwellOptions& opt) {
  const std::size_t n = run.x.size();
  auto near = [&](std::size_t k) {
    if (run.x.time(k) < opt.t_from) return false;
    return std::abs(run.x.value(k) - curves.lower()(run.y.value(k))) <= opt.tolerance;
  };

  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t k = 0; k < n;) {
    if (!near(k)) {
      ++k;
      continue;
    }
    std::size_t j = k;
    while (j + 1 < n && near(j + 1)) ++j;
    if (!spans.empty() && run.x.time(k) - run.x.time(spans.back().second) < opt.max_gap) {
      spans.back().second = j;
    } else {
      spans.emplace_back(k, j);
    }
    k = j + 1;
  }

  std::vector<DwellSegment> out;
  for (auto [k, j] : spans) {
    DwellSegment seg;
    seg.first = k;
    seg.last = j;
    seg.t_start = run.x.time(k);
    seg.t_end = run.x.time(j);
    if (j == k || seg.t_end - seg.t_start < opt.min_duration) continue;
    double area = 0.0;
    int prev_sign = 0;
    for (std::size_t i = k; i < j; ++i) {
      const double h = run.y.time(i + 1) - run.y.time(i);
      area += 0.5 * h * (run.y.value(i) + run.y.value(i + 1));
      const double dy = run.y.value(i + 1) - run.y.value(i);
      const int sg = dy > 0.0 ? 1 : (dy < 0.0 ? -1 : 0);
      if (sg != 0) {
        if (prev_sign != 0 && sg != prev_sign) ++seg.sao_count;
        prev_sign = sg;
      }
    }
    seg.mean_y = area / (seg.t_end - seg.t_start);
    out.push_back(seg);
  }
  return out;
}

double dwell_average(const std::vector<DwellSegment>& segments) {
  double area = 0.0;
  double length = 0.0;
  for (const auto& s : segments) {
    area += s.mean_y * (s.t_end - s.t_start);
    length += s.t_end - s.t_start;
  }
  if (!(length > 0.0)) throw DomainError("dwell_average: no dwell segments");
  return area / length;
}

}  // namespace fsplay
