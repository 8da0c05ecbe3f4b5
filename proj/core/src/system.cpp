#include "fsplay/system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "fsplay/errors.hpp"

namespace fsplay {
namespace {

std::string point_str(double x, double y) {
  std::ostringstream os;
  os << "(" << x << ", " << y << ")";
  return os.str();
}

void require_inside(const CompactBox& box, Point p) {
  if (!box.contains(p)) {
    throw DomainError("point " + point_str(p.x, p.y) + " outside the working box");
  }
}

double finite_or_throw(double v, const char* what, double x, double y) {
  if (!std::isfinite(v)) {
    throw EvaluationError(std::string(what) + " is not finite at " + point_str(x, y));
  }
  return v;
}

double fd_step(double v, double base) { return base * std::max(1.0, std::abs(v)); }

/// Central difference of a scalar function of one variable.
template <class Fn>
double central(Fn&& fn, double v, double h) {
  return (fn(v + h) - fn(v - h)) / (2.0 * h);
}

/// True when the h and 2h central differences agree to `rel`.
bool stable(double d1, double d2, double rel) {
  return std::abs(d1 - d2) <= rel * std::max({1.0, std::abs(d1), std::abs(d2)});
}

std::vector<double> axis(Interval r, std::size_t n) {
  if (n < 2) throw ArgumentError("grid resolution must be >= 2 points per axis");
  if (!(r.hi > r.lo)) return std::vector<double>(n, r.lo);
  return uniform_grid(r.lo, r.hi, n);
}

struct FastDerivs {
  std::array<double, 2> grad{};
  bool smooth = true;
};

FastDerivs fast_gradient(const FastSlowSystem& s, double x, double y) {
  if (s.fast_jacobian) return {(*s.fast_jacobian)(x, y), true};
  const double hx = fd_step(x, 1e-6);
  const double hy = fd_step(y, 1e-6);
  auto fx = [&](double v) { return s.fast(v, y); };
  auto fy = [&](double v) { return s.fast(x, v); };
  const double dx = central(fx, x, hx);
  const double dy = central(fy, y, hy);
  const bool ok = stable(dx, central(fx, x, 2 * hx), 1e-4) && stable(dy, central(fy, y, 2 * hy), 1e-4);
  return {{dx, dy}, ok};
}

struct SlowDerivs {
  std::array<double, 3> grad{};
  bool smooth = true;
};

SlowDerivs slow_gradient(const FastSlowSystem& s, double x, double y, double t) {
  if (s.slow_jacobian) return {(*s.slow_jacobian)(x, y, t), true};
  const double hx = fd_step(x, 1e-6);
  const double hy = fd_step(y, 1e-6);
  const double ht = fd_step(t, 1e-6);
  auto gx = [&](double v) { return s.slow(v, y, t); };
  auto gy = [&](double v) { return s.slow(x, v, t); };
  auto gt = [&](double v) { return s.slow(x, y, v); };
  const double dx = central(gx, x, hx);
  const double dy = central(gy, y, hy);
  const double dt = central(gt, t, ht);
  const bool ok = stable(dx, central(gx, x, 2 * hx), 1e-4) &&
                  stable(dy, central(gy, y, 2 * hy), 1e-4) &&
                  stable(dt, central(gt, t, 2 * ht), 1e-4);
  return {{dx, dy, dt}, ok};
}

}  // namespace

std::string_view to_string(Region r) noexcept {
  switch (r) {
    case Region::Plus:
      return "M+";
    case Region::Zero:
      return "M0";
    case Region::Minus:
      return "M-";
  }
  return "?";
}

CompactBox CompactBox::inflated(double fraction) const {
  auto grow = [fraction](Interval r) {
    const double pad = fraction * std::max(r.width(), 1.0);
    return Interval{r.lo - pad, r.hi + pad};
  };
  return {grow(x_range), grow(y_range)};
}

double CompactBox::max_corner_norm() const noexcept {
  const double ax = std::max(std::abs(x_range.lo), std::abs(x_range.hi));
  const double ay = std::max(std::abs(y_range.lo), std::abs(y_range.hi));
  return std::hypot(ax, ay);
}

CompactBox CompactBox::bounding(const SampledPath& x, const SampledPath& y) {
  if (x.empty() || y.empty()) throw ArgumentError("CompactBox::bounding: empty path");
  auto [xl, xh] = std::minmax_element(x.values().begin(), x.values().end());
  auto [yl, yh] = std::minmax_element(y.values().begin(), y.values().end());
  return {{*xl, *xh}, {*yl, *yh}};
}

Region classify_region(const BoundaryCurvePair& curves, Point p) {
  if (p.x > curves.upper()(p.y)) return Region::Plus;
  if (p.x < curves.lower()(p.y)) return Region::Minus;
  return Region::Zero;
}

Region classify_region(const FastSlowSystem& system, const CompactBox& box, Point p) {
  require_inside(box, p);
  return classify_region(system.curves, p);
}

double band_distance(const BoundaryCurvePair& curves, Point p) {
  switch (classify_region(curves, p)) {
    case Region::Plus:
      return curves.upper().graph_distance(p.x, p.y);
    case Region::Minus:
      return curves.lower().graph_distance(p.x, p.y);
    case Region::Zero:
      break;
  }
  return 0.0;
}

double band_distance(const FastSlowSystem& system, const CompactBox& box, Point p) {
  require_inside(box, p);
  return band_distance(system.curves, p);
}

BoundsMetadata estimate_bounds(const FastSlowSystem& system, const CompactBox& box,
                               const BoundsOptions& opt) {
  const auto xs = axis(box.x_range, opt.grid_resolution);
  const auto ys = axis(box.y_range, opt.grid_resolution);
  std::vector<double> ts;
  if (opt.time_samples >= 2 && opt.t1 > opt.t0) {
    ts = uniform_grid(opt.t0, opt.t1, opt.time_samples);
  } else {
    ts = {opt.t0};
  }
  const double window = std::max(0.0, opt.t1 - opt.t0);

  BoundsMetadata b;
  double Lf = 0.0;
  double Lg = 0.0;
  double D2f = 0.0;
  double D2g = 0.0;
  double cfg = 0.0;

  for (double x : xs) {
    for (double y : ys) {
      const double f = finite_or_throw(system.fast(x, y), "f", x, y);
      b.C_f = std::max(b.C_f, std::abs(f));
      const auto fd = fast_gradient(system, x, y);
      finite_or_throw(fd.grad[0], "df/dx", x, y);
      finite_or_throw(fd.grad[1], "df/dy", x, y);
      if (fd.smooth) {
        const double n = std::hypot(fd.grad[0], fd.grad[1]);
        Lf = std::max(Lf, n);
        cfg = std::max({cfg, std::abs(fd.grad[0]), std::abs(fd.grad[1]),
                        std::abs(f - fd.grad[0] * x - fd.grad[1] * y)});
      } else {
        ++b.nonsmooth_points;
      }

      // Hessian of f from differences of the gradient, checked with step doubling.
      {
        const double hx = fd_step(x, 1e-4);
        const double hy = fd_step(y, 1e-4);
        auto hess = [&](double sx, double sy) {
          const auto gxp = fast_gradient(system, x + sx, y).grad;
          const auto gxm = fast_gradient(system, x - sx, y).grad;
          const auto gyp = fast_gradient(system, x, y + sy).grad;
          const auto gym = fast_gradient(system, x, y - sy).grad;
          const double fxx = (gxp[0] - gxm[0]) / (2 * sx);
          const double fxy = (gxp[1] - gxm[1]) / (2 * sx);
          const double fyx = (gyp[0] - gym[0]) / (2 * sy);
          const double fyy = (gyp[1] - gym[1]) / (2 * sy);
          return std::sqrt(fxx * fxx + fxy * fxy + fyx * fyx + fyy * fyy);
        };
        const double h1 = hess(hx, hy);
        const double h2 = hess(2 * hx, 2 * hy);
        if (stable(h1, h2, 1e-3)) {
          D2f = std::max(D2f, h1);
        } else {
          ++b.nonsmooth_points;
        }
      }

      for (double t : ts) {
        const double g = finite_or_throw(system.slow(x, y, t), "g", x, y);
        b.C_g = std::max(b.C_g, std::abs(g));
        const auto gd = slow_gradient(system, x, y, t);
        if (!gd.smooth) {
          ++b.nonsmooth_points;
          continue;
        }
        b.C_Dg = std::max(b.C_Dg, std::sqrt(gd.grad[0] * gd.grad[0] + gd.grad[1] * gd.grad[1] +
                                            gd.grad[2] * gd.grad[2]));
        Lg = std::max(Lg, std::hypot(gd.grad[0], gd.grad[1]));
        const double g1 = std::abs(g - gd.grad[0] * x - gd.grad[1] * y) + std::abs(gd.grad[2]) * window;
        cfg = std::max({cfg, std::abs(gd.grad[0]), std::abs(gd.grad[1]), g1});

        const double hx = fd_step(x, 1e-4);
        const double hy = fd_step(y, 1e-4);
        const double ht = fd_step(t, 1e-4);
        auto hess = [&](double sx, double sy, double st) {
          const auto a = slow_gradient(system, x + sx, y, t).grad;
          const auto am = slow_gradient(system, x - sx, y, t).grad;
          const auto c = slow_gradient(system, x, y + sy, t).grad;
          const auto cm = slow_gradient(system, x, y - sy, t).grad;
          const auto d = slow_gradient(system, x, y, t + st).grad;
          const auto dm = slow_gradient(system, x, y, t - st).grad;
          double s2 = 0.0;
          for (int k = 0; k < 3; ++k) {
            const double r0 = (a[k] - am[k]) / (2 * sx);
            const double r1 = (c[k] - cm[k]) / (2 * sy);
            const double r2 = (d[k] - dm[k]) / (2 * st);
            s2 += r0 * r0 + r1 * r1 + r2 * r2;
          }
          return std::sqrt(s2);
        };
        const double h1 = hess(hx, hy, ht);
        const double h2 = hess(2 * hx, 2 * hy, 2 * ht);
        if (stable(h1, h2, 1e-3)) {
          D2g = std::max(D2g, h1);
        } else {
          ++b.nonsmooth_points;
        }
      }
    }
  }

  b.C_Df = Lf;
  b.L_f = Lf;
  b.L_g = Lg;
  b.L = std::max(Lf, Lg);
  b.C_D2 = std::max(D2f, D2g);
  b.C_FG = cfg;

  const double k = opt.inflation;
  b.C_f *= k;
  b.C_g *= k;
  b.C_Dg *= k;
  b.C_Df *= k;
  b.C_D2 *= k;
  b.L_f *= k;
  b.L_g *= k;
  b.L *= k;
  b.C_FG *= k;
  b.C_M = box.max_corner_norm();
  return b;
}

std::size_t check_sign_structure(const FastSlowSystem& system, const CompactBox& box,
                                 std::size_t resolution) {
  std::size_t bad = 0;
  for (double x : axis(box.x_range, resolution)) {
    for (double y : axis(box.y_range, resolution)) {
      const double f = system.fast(x, y);
      switch (classify_region(system.curves, {x, y})) {
        case Region::Plus:
          bad += f < 0.0 ? 0 : 1;
          break;
        case Region::Minus:
          bad += f > 0.0 ? 0 : 1;
          break;
        case Region::Zero:
          bad += std::abs(f) <= 1e-12 ? 0 : 1;
          break;
      }
    }
  }
  return bad;
}

std::size_t check_jacobians(const FastSlowSystem& system, const CompactBox& box,
                            std::size_t resolution, double t0, double t1, double rel_tol) {
  if (!system.has_jacobians()) return 0;
  FastSlowSystem numeric{system.fast, system.slow, std::nullopt, std::nullopt, system.curves};
  std::vector<double> ts = t1 > t0 ? uniform_grid(t0, t1, 5) : std::vector<double>{t0};
  std::size_t bad = 0;
  auto close = [rel_tol](double a, double b) {
    return std::abs(a - b) <= rel_tol * std::max(1.0, std::abs(b));
  };
  for (double x : axis(box.x_range, resolution)) {
    for (double y : axis(box.y_range, resolution)) {
      const auto fn = fast_gradient(numeric, x, y);
      if (fn.smooth) {
        const auto fa = (*system.fast_jacobian)(x, y);
        if (!close(fa[0], fn.grad[0]) || !close(fa[1], fn.grad[1])) ++bad;
      }
      for (double t : ts) {
        const auto gn = slow_gradient(numeric, x, y, t);
        if (!gn.smooth) continue;
        const auto ga = (*system.slow_jacobian)(x, y, t);
        if (!close(ga[0], gn.grad[0]) || !close(ga[1], gn.grad[1]) || !close(ga[2], gn.grad[2])) ++bad;
      }
    }
  }
  return bad;
}

}  // namespace fsplay
