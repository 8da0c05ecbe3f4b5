#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "csv.hpp"
#include "fsplay/analysis.hpp"
#include "fsplay/errors.hpp"
#include "fsplay/limit.hpp"
#include "fsplay/oscillator.hpp"
#include "fsplay/patched.hpp"
#include "fsplay/play.hpp"
#include "fsplay/projection.hpp"
#include "svg.hpp"

namespace fsplay::cli {
namespace {

namespace fs = std::filesystem;

std::ostream& log(const CommandContext& ctx) {
  static std::ostringstream sink;
  if (ctx.log) return *ctx.log;
  sink.str("");
  return sink;
}

fs::path prepare(const CommandContext& ctx, const std::string& name) {
  fs::create_directories(ctx.out_dir);
  return ctx.out_dir / name;
}

void warn_clip(const CommandContext& ctx, const ClipMonitor& m) {
  if (const auto n = m.activations.load()) {
    log(ctx) << "warning: the x clip at |x| = " << ctx.config.system.x_clip << " was active in " << n
             << " slow-field evaluations\n";
  }
}

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

Panel phase_panel(const std::string& title, const SampledPath& x, const SampledPath& y,
                  const BoundaryCurvePair& curves) {
  Panel p{title, "y", "x", false, false, {}};
  const double ylo = *std::min_element(y.values().begin(), y.values().end());
  const double yhi = *std::max_element(y.values().begin(), y.values().end());
  const auto grid = uniform_grid(ylo, yhi, 200);
  std::vector<double> lo, hi;
  for (double v : grid) {
    lo.push_back(curves.lower()(v));
    hi.push_back(curves.upper()(v));
  }
  std::vector<double> by = grid, bx = lo;
  by.insert(by.end(), grid.rbegin(), grid.rend());
  bx.insert(bx.end(), hi.rbegin(), hi.rend());
  p.series.push_back({by, bx, "#7f7f7f", "", false, 0.0, true});
  p.series.push_back({grid, lo, "#999999", "F-", false, 1.5});
  p.series.push_back({grid, hi, "#555555", "F+", false, 1.5});
  p.series.push_back({to_vec(y.values()), to_vec(x.values()), "#1f77b4", "trajectory", false, 0.8});
  return p;
}

Panel time_panel(const std::string& title, const SampledPath& x, const SampledPath& y,
                 const std::string& x_name, const std::string& y_name) {
  Panel p{title, "t", "value", false, false, {}};
  p.series.push_back({to_vec(x.times()), to_vec(x.values()), "#d62728", x_name, false, 0.8});
  p.series.push_back({to_vec(y.times()), to_vec(y.values()), "#1f77b4", y_name, false, 0.8});
  return p;
}

std::string region_name(const BoundaryCurvePair& curves, Point w) {
  return std::string(to_string(classify_region(curves, w)));
}

// Random monotone piecewise-linear curve pair with F- < F+.
BoundaryCurvePair random_curves(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> slope(0.0, 1.5);
  std::uniform_real_distribution<double> gap(0.2, 1.5);
  std::vector<std::pair<double, double>> lo, hi;
  double fl = -1.0;
  double fh = fl + gap(rng);
  for (int i = 0; i <= 8; ++i) {
    const double y = -5.0 + 1.25 * i;
    lo.emplace_back(y, fl);
    hi.emplace_back(y, fh);
    fl += slope(rng) * 1.25;
    fh = std::max(fh + slope(rng) * 1.25, fl + gap(rng));
  }
  return {MonotoneCurve::piecewise_linear(lo), MonotoneCurve::piecewise_linear(hi)};
}

SampledPath random_input(std::mt19937_64& rng, double T, std::size_t n) {
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  std::vector<double> kt = uniform_grid(0.0, T, 12);
  std::vector<double> kv(kt.size());
  for (double& v : kv) v = val(rng);
  const SampledPath knots(kt, kv);
  return sample(uniform_grid(0.0, T, n), [&](double t) { return knots.at(t); });
}

}  // namespace

CommandResult cmd_simulate(const CommandContext& ctx) {
  const Config& c = ctx.config;
  ClipMonitor clip;
  const FastSlowSystem sys = make_system(c.system, &clip);
  const EpsRun run = integrate(sys, c.system.epsilon, c.run.w0, 0.0, c.run.T, c.run.integrator);
  const SampledPath p = project_run(run, sys.curves);

  CommandResult res;
  CsvWriter csv(prepare(ctx, "simulate.csv"), {"t", "x", "y", "p", "band_distance", "region"});
  for (std::size_t k = 0; k < run.x.size(); ++k) {
    const Point w{run.x.value(k), run.y.value(k)};
    csv.row({format_number(run.x.time(k)), format_number(w.x), format_number(w.y),
             format_number(p.value(k)), format_number(band_distance(sys.curves, w)),
             region_name(sys.curves, w)});
  }
  res.files.push_back(csv.path());
  log(ctx) << "simulate: epsilon = " << c.system.epsilon << ", T = " << c.run.T << ", " << run.accepted
           << " accepted / " << run.rejected << " rejected steps, " << run.region_crossings
           << " region crossings\n";
  warn_clip(ctx, clip);

  if (ctx.plot) {
    const fs::path svg = prepare(ctx, "simulate.svg");
    write_svg(svg, {phase_panel("phase portrait", run.x, run.y, sys.curves),
                    time_panel("time series", run.x, run.y, "x", "y")});
    res.files.push_back(svg);
  }
  return res;
}

CommandResult cmd_limit(const CommandContext& ctx) {
  const Config& c = ctx.config;
  ClipMonitor clip;
  const FastSlowSystem sys = make_system(c.system, &clip);
  const LimitRun lim = solve_limit(sys.slow, sys.curves, c.run.w0.x, c.run.w0.y, c.run.T, c.run.limit_dt);

  CommandResult res;
  CsvWriter csv(prepare(ctx, "limit.csv"), {"t", "x_bar", "y_bar"});
  for (std::size_t k = 0; k < lim.x.size(); ++k) {
    csv.row({format_number(lim.x.time(k)), format_number(lim.x.value(k)), format_number(lim.y.value(k))});
  }
  res.files.push_back(csv.path());
  log(ctx) << "limit: T = " << c.run.T << ", dt = " << c.run.limit_dt << ", " << lim.x.size()
           << " grid points\n";
  warn_clip(ctx, clip);

  if (ctx.plot) {
    const fs::path svg = prepare(ctx, "limit.svg");
    write_svg(svg, {phase_panel("limit system", lim.x, lim.y, sys.curves),
                    time_panel("limit time series", lim.x, lim.y, "x_bar", "y_bar")});
    res.files.push_back(svg);
  }
  return res;
}

CommandResult cmd_converge(const CommandContext& ctx) {
  const Config& c = ctx.config;
  const FastSlowSystem sys = make_system(c.system);
  SweepOptions o;
  o.config = c.run.integrator;
  o.limit_dt = c.run.limit_dt;
  o.delta_small = c.sweep.delta_small;
  o.q = c.sweep.q;
  o.workers = c.sweep.workers;
  const ConvergenceTable t = epsilon_sweep(sys, c.run.w0, c.run.T, c.sweep.eps_list, o);

  CommandResult res;
  CsvWriter csv(prepare(ctx, "converge.csv"),
                {"epsilon", "sup_y_err", "sup_x_err_tail", "t_eps", "L2_x_err", "W12_y_err"});
  for (const auto& r : t.rows) {
    csv.row({format_number(r.epsilon), format_number(r.sup_y_err), format_number(r.sup_x_err_tail),
             format_number(r.t_eps), format_number(r.L2_x_err), format_number(r.W12_y_err)});
  }
  res.files.push_back(csv.path());
  CsvWriter orders(prepare(ctx, "converge_orders.csv"), {"column", "order"});
  orders.row({"sup_y_err", format_number(t.orders.sup_y_err)});
  orders.row({"sup_x_err_tail", format_number(t.orders.sup_x_err_tail)});
  orders.row({"L2_x_err", format_number(t.orders.L2_x_err)});
  orders.row({"W12_y_err", format_number(t.orders.W12_y_err)});
  res.files.push_back(orders.path());
  log(ctx) << "converge: " << t.rows.size() << " epsilon values against a limit reference with "
           << t.limit.x.size() << " grid points\n";

  if (ctx.plot) {
    Panel p{"errors against epsilon", "epsilon", "error", true, true, {}};
    std::vector<double> e, sy, sx, l2, w12;
    for (const auto& r : t.rows) {
      e.push_back(r.epsilon);
      sy.push_back(r.sup_y_err);
      sx.push_back(r.sup_x_err_tail.value_or(NAN));
      l2.push_back(r.L2_x_err);
      w12.push_back(r.W12_y_err);
    }
    p.series.push_back({e, sy, "#1f77b4", "sup |y - y_bar|", true, 1.2});
    p.series.push_back({e, sx, "#d62728", "tail sup |x - x_bar|", true, 1.2});
    p.series.push_back({e, l2, "#2ca02c", "L2 |x - x_bar|", true, 1.2});
    p.series.push_back({e, w12, "#9467bd", "W12 |y - y_bar|", true, 1.2});
    const fs::path svg = prepare(ctx, "converge.svg");
    write_svg(svg, {p});
    res.files.push_back(svg);
  }
  return res;
}

CommandResult cmd_bifurcate(const CommandContext& ctx) {
  const Config& c = ctx.config;
  const SweepSection& s = c.sweep;
  if (s.c_count == 0) throw ConfigError(c.source + ": field 'sweep.c_count' must be >= 1");
  std::vector<double> cs{s.c_min};
  if (s.c_count > 1) {
    const double m = static_cast<double>(s.c_count - 1);
    cs.clear();
    for (std::size_t i = 0; i < s.c_count; ++i) {
      cs.push_back(((m - static_cast<double>(i)) * s.c_min + static_cast<double>(i) * s.c_max) / m);
    }
  }
  BifurcationOptions o;
  o.T_settle = s.T_settle;
  o.T_measure = s.T_measure;
  o.w0 = c.run.w0;
  o.config = c.run.integrator;
  o.workers = s.workers;
  const auto rows = bifurcation_sweep(c.system, cs, o);

  CommandResult res;
  CsvWriter csv(prepare(ctx, "bifurcate.csv"), {"c", "y_max", "y_min", "amplitude", "rejected_flag"});
  std::size_t rejected = 0;
  for (const auto& r : rows) {
    if (r.rejected) {
      ++rejected;
      csv.row({format_number(r.c), "", "", "", "1"});
    } else {
      csv.row({format_number(r.c), format_number(r.y_max), format_number(r.y_min),
               format_number(r.amplitude), "0"});
    }
  }
  res.files.push_back(csv.path());
  log(ctx) << "bifurcate: " << rows.size() << " values of c";
  if (rejected) log(ctx) << ", " << rejected << " rejected (b + c >= 0, solutions unbounded)";
  log(ctx) << "\n";

  if (ctx.plot) {
    Panel p{"attractor extent of y against c", "c", "y", false, false, {}};
    std::vector<double> cx, hi, lo;
    for (const auto& r : rows) {
      if (r.rejected) continue;
      cx.push_back(r.c);
      hi.push_back(r.y_max);
      lo.push_back(r.y_min);
    }
    p.series.push_back({cx, hi, "#d62728", "max y", true, 1.0});
    p.series.push_back({cx, lo, "#1f77b4", "min y", true, 1.0});
    const fs::path svg = prepare(ctx, "bifurcate.svg");
    write_svg(svg, {p});
    res.files.push_back(svg);
  }
  return res;
}

CommandResult cmd_patched(const CommandContext& ctx) {
  const Config& c = ctx.config;
  const FastSlowSystem sys = make_system(c.system);
  const double eps = c.system.epsilon;
  const double T = c.run.T;
  const PatchedSection& ps = c.patched;

  const CompactBox box = working_box(sys, eps, c.run.w0, 0.0, T);
  PatchOptions po;
  po.enforce_admissibility = ps.enforce;
  po.box = box;
  po.bounds.t1 = T;
  double theta = 0.0;
  bool floored = false;
  if (ps.theta) {
    theta = *ps.theta;
  } else {
    const BoundsMetadata b = estimate_bounds(sys, box, po.bounds);
    const ThetaSchedule th = theta_schedule(eps, T, b.L, ps.theta_floor);
    theta = th.theta;
    floored = th.floored;
    if (floored) {
      log(ctx) << "warning: theta schedule underflows (log value " << th.log_nominal
               << "); using the floor " << ps.theta_floor << ", bounds are not applicable\n";
    }
  }
  po.theta_floored = floored;

  const PatchSchedule s = build_patched_solution(sys, eps, c.run.w0, ps.delta, theta, T, po);
  const PatchBoundsReport r = evaluate_patch_bounds(s, sys);

  CommandResult res;
  CsvWriter sched(prepare(ctx, "patched_schedule.csv"),
                  {"index", "segment", "tag", "t_start", "t_end", "anchor_x", "anchor_y", "end"});
  std::size_t index = 0;
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    const PatchSegment& seg = s.segments[i];
    if (seg.kind == SegmentKind::Exact) {
      sched.row({std::to_string(index++), std::to_string(i), to_string(seg.kind), format_number(seg.t_start),
                 format_number(seg.t_end), format_number(seg.start.x), format_number(seg.start.y),
                 seg.t_end >= T ? "final_time" : "collar_exit"});
      continue;
    }
    for (std::size_t j = seg.first_piece; j < seg.first_piece + seg.piece_count; ++j) {
      const PatchPiece& p = s.pieces[j];
      const char* end = p.reason == PieceEnd::ThetaHit      ? "theta"
                        : p.reason == PieceEnd::CollarEntry ? "collar_entry"
                                                            : "final_time";
      sched.row({std::to_string(index++), std::to_string(i), to_string(seg.kind),
                 format_number(p.piece.tau), format_number(p.t_end), format_number(p.piece.anchor.x),
                 format_number(p.piece.anchor.y), end});
    }
  }
  res.files.push_back(sched.path());

  CsvWriter path(prepare(ctx, "patched_path.csv"), {"t", "x", "y"});
  for (std::size_t k = 0; k < s.x.size(); ++k) {
    path.row({format_number(s.x.time(k)), format_number(s.x.value(k)), format_number(s.y.value(k))});
  }
  res.files.push_back(path.path());

  const fs::path report_path = prepare(ctx, "patched_report.txt");
  std::ofstream rep(report_path);
  rep.precision(17);
  rep << "epsilon " << eps << "\ndelta " << ps.delta << "\ntheta " << theta << "\ntheta_floored "
      << (floored ? "yes" : "no") << "\nepsilon_delta " << s.epsilon_delta << "\nf_m " << s.collar.f_m
      << "\nadmissible " << (s.admissible ? "yes" : "no") << "\nbounds_applicable "
      << (r.applicable ? "yes" : "no") << "\nsegments " << s.segments.size() << "\npieces "
      << s.pieces.size() << "\n";
  for (const auto& n : r.notes) rep << "note " << n << "\n";
  rep << "local_piece_bound " << r.local_piece_bound << "\nmax_piece_duration " << r.max_piece_duration
      << "\nlocal_piece_violations " << r.local_piece_violations << "\nslow_budget_violations "
      << r.slow_budget_violations << "\n";
  for (const auto& t : r.transits) {
    rep << "transit segment " << t.segment << " duration " << t.duration << " pieces " << t.pieces
        << " time_bound " << format_number(t.time_bound) << " piece_bound " << format_number(t.piece_bound)
        << " K1 " << format_number(t.K1) << " K2 " << format_number(t.K2) << " monotone "
        << (t.monotone_progress ? "yes" : "no") << "\n";
  }
  for (const auto& e : r.exact_segments) {
    rep << "exact segment " << e.segment << " duration " << e.duration << " min_duration " << e.min_duration
        << " reaches_T " << (e.reaches_T ? "yes" : "no") << " ok " << (e.ok() ? "yes" : "no") << "\n";
  }
  rep << "segment_count_bound " << r.segment_count_bound << "\nlog_deviation_bound "
      << r.log_deviation_bound << "\ndeviation_bound " << format_number(r.deviation_bound)
      << "\nmeasured_deviation " << r.measured_deviation << "\nmax_junction_mismatch "
      << r.max_junction_mismatch << "\n";
  rep.close();
  res.files.push_back(report_path);

  log(ctx) << "patched: epsilon = " << eps << ", epsilon_delta = " << s.epsilon_delta << ", theta = " << theta
           << (floored ? " (floored)" : "") << ", " << s.segments.size() << " segments, " << s.pieces.size()
           << " pieces, measured deviation " << r.measured_deviation << "\n";
  if (!s.admissible) log(ctx) << "warning: preconditions violated; see the report notes\n";

  if (ctx.plot) {
    const EpsRun ref = integrate(sys, eps, c.run.w0, 0.0, T, IntegratorConfig::oracle());
    Panel p{"patched and exact solutions", "t", "x", false, false, {}};
    p.series.push_back({to_vec(ref.x.times()), to_vec(ref.x.values()), "#999999", "exact x", false, 2.0});
    p.series.push_back({to_vec(s.x.times()), to_vec(s.x.values()), "#d62728", "patched x", false, 0.8});
    const fs::path svg = prepare(ctx, "patched.svg");
    write_svg(svg, {p, phase_panel("patched phase portrait", s.x, s.y, sys.curves)});
    res.files.push_back(svg);
  }
  return res;
}

CommandResult cmd_play_check(const CommandContext& ctx, std::size_t cases) {
  std::mt19937_64 rng(ctx.seed);
  std::uniform_real_distribution<double> warp(0.2, 5.0);
  std::uniform_real_distribution<double> start(-6.0, 6.0);
  const double T = 5.0;
  const double tol = 1e-10;

  CommandResult res;
  CsvWriter csv(prepare(ctx, "play_check.csv"),
                {"case", "scale", "band_violation", "vi_violation", "rate_independence", "volterra"});
  std::size_t failed = 0;
  for (std::size_t i = 0; i < cases; ++i) {
    const BoundaryCurvePair curves = random_curves(rng);
    const SampledPath input = random_input(rng, T, 501);
    const double x0 = start(rng);
    const double scale = std::max(1.0, input.max_abs());
    const SampledPath out = play_evaluate(input, x0, curves);
    const ViReport vi = check_variational_inequality(out, input, curves, 1e-12 * scale);

    std::vector<double> nt{0.0};
    std::vector<double> w(input.size() - 1);
    double total = 0.0;
    for (double& v : w) total += (v = warp(rng));
    double acc = 0.0;
    for (double v : w) nt.push_back((acc += v) / total * T);
    nt.back() = T;
    const double ri = check_rate_independence(input, x0, curves, nt);
    std::uniform_int_distribution<std::size_t> cut(1, input.size() - 2);
    const double vol = check_volterra(input, x0, curves, cut(rng));

    if (std::max({vi.max_band_violation, vi.max_vi_violation, ri, vol}) > tol * scale) ++failed;
    csv.row({std::to_string(i), format_number(scale), format_number(vi.max_band_violation),
             format_number(vi.max_vi_violation), format_number(ri), format_number(vol)});
  }
  res.files.push_back(csv.path());
  log(ctx) << "play-check: seed " << ctx.seed << ", " << cases << " cases, " << failed
           << " above tolerance 1e-10 * scale\n";
  res.status = failed ? 1 : 0;
  return res;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"simulate", "limit", "converge", "bifurcate", "patched",
                                              "play-check"};
  return names;
}

CommandResult run_command(const std::string& name, const CommandContext& ctx) {
  if (name == "simulate") return cmd_simulate(ctx);
  if (name == "limit") return cmd_limit(ctx);
  if (name == "converge") return cmd_converge(ctx);
  if (name == "bifurcate") return cmd_bifurcate(ctx);
  if (name == "patched") return cmd_patched(ctx);
  if (name == "play-check") return cmd_play_check(ctx);
  throw ConfigError("unknown command '" + name + "'");
}

}  // namespace fsplay::cli
