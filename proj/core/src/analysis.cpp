#include "fsplay/analysis.hpp"

#include <cmath>
#include <exception>
#include <sstream>
#include <string>

#include "fsplay/errors.hpp"
#include "fsplay/norms.hpp"

namespace fsplay {
namespace {

[[noreturn]] void rethrow_annotated(const std::string& prefix) {
  try {
    throw;
  } catch (const StiffnessError& e) {
    throw StiffnessError(prefix + e.what());
  } catch (const BoxEscapeError& e) {
    throw BoxEscapeError(prefix + e.what());
  } catch (const EvaluationError& e) {
    throw EvaluationError(prefix + e.what());
  } catch (const DomainError& e) {
    throw DomainError(prefix + e.what());
  } catch (const ArgumentError& e) {
    throw ArgumentError(prefix + e.what());
  } catch (const Error& e) {
    throw Error(prefix + e.what());
  }
}

std::string eps_prefix(double eps) {
  std::ostringstream os;
  os << "epsilon = " << eps << ": ";
  return os.str();
}

}  // namespace

std::optional<double> fit_order(std::span<const double> eps, std::span<const double> err) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < eps.size() && i < err.size(); ++i) {
    if (eps[i] > 0.0 && err[i] > 0.0 && std::isfinite(err[i])) {
      lx.push_back(std::log(eps[i]));
      ly.push_back(std::log(err[i]));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  const auto n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / den;
}

ConvergenceRow convergence_row(const EpsRun& run, const LimitRun& limit,
                               const BoundaryCurvePair& curves, double delta_small, double q) {
  ConvergenceRow row;
  row.epsilon = run.epsilon;
  const SampledPath dy = difference(run.y, limit.y);
  const SampledPath dx = difference(run.x, limit.x);
  row.sup_y_err = norm_sup(dy);
  row.L2_x_err = norm_Lq(dx, q);
  row.W12_y_err = norm_W1q(dy, q);
  row.t_eps = layer_exit_time(run, curves, delta_small);
  if (row.t_eps) row.sup_x_err_tail = norm_sup(dx.restricted(*row.t_eps, dx.back_time()));
  return row;
}

ConvergenceTable epsilon_sweep(const FastSlowSystem& system, Point w0, double T,
                               std::span<const double> eps_list, const SweepOptions& options) {
  if (eps_list.empty()) throw ArgumentError("epsilon_sweep: empty epsilon list");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw ArgumentError("epsilon_sweep: epsilons must be > 0");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
      throw ArgumentError("epsilon_sweep: epsilons must be strictly decreasing");
    }
  }
  ConvergenceTable table;
  const double dt = options.limit_dt > 0.0 ? options.limit_dt : 1e-4 * T;
  table.limit = solve_limit(system.slow, system.curves, w0.x, w0.y, T, dt);

  table.rows = parallel_ordered_map<double>(
      eps_list,
      [&](double eps) {
        try {
          const EpsRun run = integrate(system, eps, w0, 0.0, T, options.config);
          return convergence_row(run, table.limit, system.curves, options.delta_small, options.q);
        } catch (const Error&) {
          rethrow_annotated(eps_prefix(eps));
        }
      },
      options.workers);

  std::vector<double> e, sy, sx, l2, w12;
  std::vector<double> e_tail;
  for (const auto& r : table.rows) {
    e.push_back(r.epsilon);
    sy.push_back(r.sup_y_err);
    l2.push_back(r.L2_x_err);
    w12.push_back(r.W12_y_err);
    if (r.sup_x_err_tail) {
      e_tail.push_back(r.epsilon);
      sx.push_back(*r.sup_x_err_tail);
    }
  }
  table.orders.sup_y_err = fit_order(e, sy);
  table.orders.sup_x_err_tail = fit_order(e_tail, sx);
  table.orders.L2_x_err = fit_order(e, l2);
  table.orders.W12_y_err = fit_order(e, w12);
  return table;
}

std::vector<BifurcationRow> bifurcation_sweep(const OscillatorParams& base,
                                              std::span<const double> c_values,
                                              const BifurcationOptions& options) {
  const double settle = options.T_settle > 0.0 ? options.T_settle : 50.0 * base.period();
  const double measure = options.T_measure > 0.0 ? options.T_measure : 25.0 * base.period();
  return parallel_ordered_map<double>(
      c_values,
      [&](double c) {
        BifurcationRow row;
        row.c = c;
        OscillatorParams p = base;
        p.c = c;
        if (!p.bounded()) {
          row.rejected = true;
          return row;
        }
        try {
          const FastSlowSystem sys = make_system(p);
          const EpsRun run = integrate(sys, p.epsilon, options.w0, 0.0, settle + measure,
                                       options.config);
          const SampledPath window = run.y.restricted(settle, settle + measure);
          const auto [lo, hi] = std::minmax_element(window.values().begin(), window.values().end());
          row.y_min = *lo;
          row.y_max = *hi;
          row.amplitude = row.y_max - row.y_min;
        } catch (const Error&) {
          std::ostringstream os;
          os << "c = " << c << ": ";
          rethrow_annotated(os.str());
        }
        return row;
      },
      options.workers);
}

}  // namespace fsplay
