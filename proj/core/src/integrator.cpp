#include "fsplay/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "fsplay/errors.hpp"

namespace fsplay {
namespace {

using State = std::array<double, 2>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class Rhs {
 public:
  Rhs(const FastSlowSystem& s, double eps) : sys_(s), eps_(eps) {}

  State operator()(double t, const State& z) const {
    const double f = sys_.fast(z[0], z[1]);
    const double g = sys_.slow(z[0], z[1], t);
    if (!std::isfinite(f) || !std::isfinite(g)) {
      std::ostringstream os;
      os << "non-finite vector field at t = " << t << ", (x, y) = (" << z[0] << ", " << z[1] << ")";
      throw EvaluationError(os.str());
    }
    return {f / eps_, g};
  }

  /// d(rhs)/d(x, y) as a row-major 2x2 matrix.
  std::array<double, 4> jacobian(double t, const State& z) const {
    std::array<double, 2> df{};
    std::array<double, 3> dg{};
    if (sys_.fast_jacobian) {
      df = (*sys_.fast_jacobian)(z[0], z[1]);
    } else {
      const double hx = 1e-7 * std::max(1.0, std::abs(z[0]));
      const double hy = 1e-7 * std::max(1.0, std::abs(z[1]));
      df[0] = (sys_.fast(z[0] + hx, z[1]) - sys_.fast(z[0] - hx, z[1])) / (2 * hx);
      df[1] = (sys_.fast(z[0], z[1] + hy) - sys_.fast(z[0], z[1] - hy)) / (2 * hy);
    }
    if (sys_.slow_jacobian) {
      dg = (*sys_.slow_jacobian)(z[0], z[1], t);
    } else {
      const double hx = 1e-7 * std::max(1.0, std::abs(z[0]));
      const double hy = 1e-7 * std::max(1.0, std::abs(z[1]));
      dg[0] = (sys_.slow(z[0] + hx, z[1], t) - sys_.slow(z[0] - hx, z[1], t)) / (2 * hx);
      dg[1] = (sys_.slow(z[0], z[1] + hy, t) - sys_.slow(z[0], z[1] - hy, t)) / (2 * hy);
    }
    return {df[0] / eps_, df[1] / eps_, dg[0], dg[1]};
  }

  double fast(const State& z) const { return sys_.fast(z[0], z[1]); }

 private:
  const FastSlowSystem& sys_;
  double eps_;
};

struct Trial {
  State z{};
  State k_end{};
  double err = 0.0;  // normalized, accept when <= 1
};

double norm_err(const State& e, const State& z0, const State& z1, const IntegratorConfig& cfg) {
  double s = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(z0[i]), std::abs(z1[i]));
    const double r = e[i] / sc;
    s += r * r;
  }
  return std::sqrt(s / 2.0);
}

Trial dp45_step(const Rhs& rhs, double t, const State& z, const State& k1, double h,
                const IntegratorConfig& cfg) {
  auto comb = [&](std::initializer_list<std::pair<double, const State*>> terms) {
    State out = z;
    for (auto [a, k] : terms) {
      out[0] += h * a * (*k)[0];
      out[1] += h * a * (*k)[1];
    }
    return out;
  };
  const State k2 = rhs(t + c2 * h, comb({{a21, &k1}}));
  const State k3 = rhs(t + c3 * h, comb({{a31, &k1}, {a32, &k2}}));
  const State k4 = rhs(t + c4 * h, comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const State k5 = rhs(t + c5 * h, comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const State k6 = rhs(t + h, comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  const State z1 = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  const State k7 = rhs(t + h, z1);
  State e{};
  for (int i = 0; i < 2; ++i) {
    e[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  }
  return {z1, k7, norm_err(e, z, z1, cfg)};
}

/// Newton solve of z1 = z + h * (theta * F(t+h, z1) + (1 - theta) * F(t, z)).
State implicit_solve(const Rhs& rhs, double t, const State& z, const State& k0, double h,
                     double theta) {
  State z1{z[0] + h * k0[0], z[1] + h * k0[1]};
  for (int it = 0; it < 25; ++it) {
    const State f1 = rhs(t + h, z1);
    const State res{z1[0] - z[0] - h * (theta * f1[0] + (1 - theta) * k0[0]),
                    z1[1] - z[1] - h * (theta * f1[1] + (1 - theta) * k0[1])};
    const auto J = rhs.jacobian(t + h, z1);
    const double m00 = 1 - h * theta * J[0], m01 = -h * theta * J[1];
    const double m10 = -h * theta * J[2], m11 = 1 - h * theta * J[3];
    const double det = m00 * m11 - m01 * m10;
    if (det == 0.0 || !std::isfinite(det)) throw NumericError("implicit step: singular Newton matrix");
    const double d0 = (m11 * res[0] - m01 * res[1]) / det;
    const double d1 = (-m10 * res[0] + m00 * res[1]) / det;
    z1[0] -= d0;
    z1[1] -= d1;
    if (std::abs(d0) + std::abs(d1) <= 1e-14 * (1.0 + std::abs(z1[0]) + std::abs(z1[1]))) break;
  }
  return z1;
}

Trial trapezoid_step(const Rhs& rhs, double t, const State& z, const State& k0, double h,
                     const IntegratorConfig& cfg) {
  const State tr = implicit_solve(rhs, t, z, k0, h, 0.5);
  const State be = implicit_solve(rhs, t, z, k0, h, 1.0);
  const State e{tr[0] - be[0], tr[1] - be[1]};
  return {tr, rhs(t + h, tr), norm_err(e, z, tr, cfg)};
}

void validate(double epsilon, double t0, double t1, const IntegratorConfig& cfg) {
  if (!(epsilon > 0.0)) throw ArgumentError("integrate: epsilon must be > 0");
  if (!(t1 > t0)) throw ArgumentError("integrate: need t0 < t1");
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0)) {
    throw ArgumentError("integrate: tolerances must be > 0");
  }
  if (!(cfg.min_step > 0.0) || cfg.min_step > cfg.max_step) {
    throw ArgumentError("integrate: need 0 < min_step <= max_step");
  }
}

class Driver {
 public:
  Driver(const FastSlowSystem& s, double eps, const IntegratorConfig& cfg)
      : sys_(s), rhs_(s, eps), cfg_(cfg), eps_(eps) {}

  Trial attempt(double t, const State& z, const State& k, double h) const {
    return cfg_.method == Method::AdaptiveEmbedded45 ? dp45_step(rhs_, t, z, k, h, cfg_)
                                                     : trapezoid_step(rhs_, t, z, k, h, cfg_);
  }

  double order() const { return cfg_.method == Method::AdaptiveEmbedded45 ? 5.0 : 2.0; }

  EventRun run(Point w0, double t0, double t1, const EventFunction* event) const {
    EpsRun out;
    out.epsilon = eps_;
    out.x.push_back(t0, w0.x);
    out.y.push_back(t0, w0.y);
    check_box({w0.x, w0.y}, t0);

    State z{w0.x, w0.y};
    double t = t0;
    State k = rhs_(t, z);
    double h = std::min(cfg_.max_step, std::max(cfg_.min_step, 1e-3 * (t1 - t0)));
    if (rhs_.fast(z) != 0.0) h = std::min(h, std::max(eps_ / 2, cfg_.min_step));
    double ev_prev = event ? (*event)(w0, t0) : -1.0;
    Region reg = classify_region(sys_.curves, w0);

    while (t < t1) {
      if (out.accepted + out.rejected >= cfg_.max_steps) {
        throw StiffnessError("integrate: step budget exhausted at t = " + std::to_string(t));
      }
      double cap = cfg_.max_step;
      if (cfg_.method == Method::AdaptiveEmbedded45 && rhs_.fast(z) != 0.0) {
        cap = std::min(cap, std::max(eps_ / 2, cfg_.min_step));
      }
      h = std::min(h, cap);
      bool last = false;
      if (t + h >= t1 || t1 - (t + h) < cfg_.min_step) {
        h = t1 - t;
        last = true;
      }
      const Trial tr = attempt(t, z, k, h);
      if (!(tr.err <= 1.0)) {
        ++out.rejected;
        const double fac = std::isfinite(tr.err) ? std::max(0.1, 0.9 * std::pow(tr.err, -1.0 / order())) : 0.1;
        h *= fac;
        if (h < cfg_.min_step) {
          throw StiffnessError("integrate: step size underflow (h < " + std::to_string(cfg_.min_step) +
                               ") at t = " + std::to_string(t) +
                               "; the problem is stiff, try method implicit-trapezoid");
        }
        continue;
      }

      double t_new = last ? t1 : t + h;
      State z_new = tr.z;
      State k_new = tr.k_end;
      bool hit = false;
      if (event) {
        const double ev = (*event)({z_new[0], z_new[1]}, t_new);
        if (ev >= 0.0 && ev_prev < 0.0) {
          double lo = 0.0;
          double hi = h;
          State z_hi = z_new;
          for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(t)); ++it) {
            const double mid = 0.5 * (lo + hi);
            const State zm = attempt(t, z, k, mid).z;
            if ((*event)({zm[0], zm[1]}, t + mid) >= 0.0) {
              hi = mid;
              z_hi = zm;
            } else {
              lo = mid;
            }
          }
          t_new = t + hi;
          z_new = z_hi;
          k_new = rhs_(t_new, z_new);
          hit = true;
        }
        ev_prev = ev;
      }

      ++out.accepted;
      out.max_error_estimate = std::max(out.max_error_estimate, tr.err);
      const Region r = classify_region(sys_.curves, {z_new[0], z_new[1]});
      if (r != reg) ++out.region_crossings;
      reg = r;
      check_box(z_new, t_new);
      if (t_new > t) {
        out.x.push_back(t_new, z_new[0]);
        out.y.push_back(t_new, z_new[1]);
      }
      t = t_new;
      z = z_new;
      k = k_new;
      if (hit) return {std::move(out), true};

      const double fac = tr.err > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(tr.err, -1.0 / order()))) : 5.0;
      h = std::max(h * fac, cfg_.min_step);
      if (last) break;
    }
    return {std::move(out), false};
  }

 private:
  void check_box(const State& z, double t) const {
    if (cfg_.box && !cfg_.box->contains({z[0], z[1]})) {
      std::ostringstream os;
      os << "trajectory left the working box at t = " << t << ", (x, y) = (" << z[0] << ", " << z[1]
         << ")";
      throw BoxEscapeError(os.str());
    }
  }

  const FastSlowSystem& sys_;
  Rhs rhs_;
  const IntegratorConfig& cfg_;
  double eps_;
};

}  // namespace

IntegratorConfig IntegratorConfig::oracle() {
  IntegratorConfig c;
  c.rel_tol = 1e-8;
  c.abs_tol = 1e-8;
  return c;
}

IntegratorConfig IntegratorConfig::sweep() { return IntegratorConfig{}; }

EpsRun integrate(const FastSlowSystem& system, double epsilon, Point w0, double t0, double t1,
                 const IntegratorConfig& config) {
  validate(epsilon, t0, t1, config);
  return Driver(system, epsilon, config).run(w0, t0, t1, nullptr).run;
}

EventRun integrate_until(const FastSlowSystem& system, double epsilon, Point w0, double t0,
                         double t1, const IntegratorConfig& config, const EventFunction& event) {
  validate(epsilon, t0, t1, config);
  return Driver(system, epsilon, config).run(w0, t0, t1, &event);
}

ResidualReport residual_check(const EpsRun& run, const FastSlowSystem& system, double epsilon) {
  ResidualReport r;
  for (std::size_t k = 0; k + 1 < run.x.size(); ++k) {
    const double h = run.x.time(k + 1) - run.x.time(k);
    const double tm = 0.5 * (run.x.time(k) + run.x.time(k + 1));
    const double xm = 0.5 * (run.x.value(k) + run.x.value(k + 1));
    const double ym = 0.5 * (run.y.value(k) + run.y.value(k + 1));
    const double dx = (run.x.value(k + 1) - run.x.value(k)) / h;
    const double dy = (run.y.value(k + 1) - run.y.value(k)) / h;
    r.fast_defect = std::max(r.fast_defect, std::abs(epsilon * dx - system.fast(xm, ym)));
    r.slow_defect = std::max(r.slow_defect, std::abs(dy - system.slow(xm, ym, tm)));
  }
  return r;
}

CompactBox working_box(const FastSlowSystem& system, double epsilon, Point w0, double t0, double t1,
                       double inflation) {
  IntegratorConfig coarse;
  coarse.rel_tol = 1e-5;
  coarse.abs_tol = 1e-5;
  coarse.max_step = 0.05;
  const EpsRun run = integrate(system, epsilon, w0, t0, t1, coarse);
  return CompactBox::bounding(run.x, run.y).inflated(inflation);
}

}  // namespace fsplay
