#pragma once

#include <algorithm>
#include <cstddef>
#include <future>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "fsplay/integrator.hpp"
#include "fsplay/limit.hpp"
#include "fsplay/oscillator.hpp"
#include "fsplay/system.hpp"

namespace fsplay {

/// Applies `fn` to every item, running up to `workers` calls at a time,
/// and returns the results in input order.
template <class T, class Fn>
auto parallel_ordered_map(std::span<const T> items, Fn fn, std::size_t workers = 0)
    -> std::vector<decltype(fn(items[0]))> {
  using R = decltype(fn(items[0]));
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<R> out;
  out.reserve(items.size());
  for (std::size_t start = 0; start < items.size(); start += workers) {
    const std::size_t stop = std::min(items.size(), start + workers);
    std::vector<std::future<R>> batch;
    for (std::size_t i = start; i < stop; ++i) {
      batch.push_back(std::async(std::launch::async, fn, std::cref(items[i])));
    }
    for (auto& f : batch) out.push_back(f.get());
  }
  return out;
}

struct ConvergenceRow {
  double epsilon = 0.0;
  double sup_y_err = 0.0;
  /// sup |x_eps - xbar| on [t_eps, T]; empty when the run never leaves its
  /// initial layer.
  std::optional<double> sup_x_err_tail;
  std::optional<double> t_eps;
  double L2_x_err = 0.0;
  double W12_y_err = 0.0;
};

struct ConvergenceOrders {
  std::optional<double> sup_y_err;
  std::optional<double> sup_x_err_tail;
  std::optional<double> L2_x_err;
  std::optional<double> W12_y_err;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;  ///< epsilon strictly decreasing
  ConvergenceOrders orders;          ///< empty with fewer than two rows
  LimitRun limit;
};

struct SweepOptions {
  IntegratorConfig config = IntegratorConfig::sweep();
  /// Step of the shared limit reference; 0 means 1e-4 * T.
  double limit_dt = 0.0;
  double delta_small = 0.05;
  double q = 2.0;
  std::size_t workers = 0;
};

/// Least-squares slope of log(err) against log(eps); empty when fewer than
/// two positive errors are given.
[[nodiscard]] std::optional<double> fit_order(std::span<const double> eps,
                                              std::span<const double> err);

/// One epsilon-run per entry against one shared limit reference.
/// Run failures are rethrown with the offending epsilon in the message.
[[nodiscard]] ConvergenceTable epsilon_sweep(const FastSlowSystem& system, Point w0, double T,
                                             std::span<const double> eps_list,
                                             const SweepOptions& options = {});

/// Error columns of one epsilon-run against a limit reference on [0, T].
[[nodiscard]] ConvergenceRow convergence_row(const EpsRun& run, const LimitRun& limit,
                                             const BoundaryCurvePair& curves, double delta_small,
                                             double q);

struct BifurcationRow {
  double c = 0.0;
  bool rejected = false;  ///< b + c >= 0
  double y_max = 0.0;
  double y_min = 0.0;
  double amplitude = 0.0;
};

struct BifurcationOptions {
  double T_settle = 0.0;   ///< 0 means 50 forcing periods
  double T_measure = 0.0;  ///< 0 means 25 forcing periods
  Point w0{2.5, -0.5};
  IntegratorConfig config = IntegratorConfig::sweep();
  std::size_t workers = 0;
};

/// For each c: simulate for T_settle + T_measure, report max and min of y
/// over the measuring window. Entries with b + c >= 0 are returned with
/// `rejected` set and no simulation.
[[nodiscard]] std::vector<BifurcationRow> bifurcation_sweep(const OscillatorParams& base,
                                                            std::span<const double> c_values,
                                                            const BifurcationOptions& options = {});

}  // namespace fsplay
