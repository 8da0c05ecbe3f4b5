#include "fsplay/projection.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fsplay/errors.hpp"
#include "fsplay/norms.hpp"

namespace fsplay {

SampledPath project_run(const EpsRun& run, const BoundaryCurvePair& curves) {
  if (run.x.size() != run.y.size()) throw ArgumentError("project_run: misaligned run grids");
  std::vector<double> t(run.x.times().begin(), run.x.times().end());
  std::vector<double> p(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) p[k] = curves.clamp(run.x.value(k), run.y.value(k));
  return SampledPath(std::move(t), std::move(p));
}

double projection_lipschitz_estimate(const SampledPath& p) {
  if (p.size() < 2) throw ArgumentError("projection_lipschitz_estimate: need >= 2 samples");
  double lip = 0.0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    lip = std::max(lip, std::abs(p.value(k + 1) - p.value(k)) / (p.time(k + 1) - p.time(k)));
  }
  return lip;
}

GapNorms gap_norms(const EpsRun& run, const SampledPath& p, double q) {
  if (p.size() != run.x.size()) throw ArgumentError("gap_norms: misaligned grids");
  std::vector<double> t(run.x.times().begin(), run.x.times().end());
  std::vector<double> gap(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) gap[k] = run.x.value(k) - p.value(k);
  const SampledPath d(std::move(t), std::move(gap));
  return {norm_sup(d), d.size() < 2 ? 0.0 : norm_Lq(d, q)};
}

SignConditionReport check_sign_condition(const EpsRun& run, const FastSlowSystem& system,
                                         const SampledPath& p) {
  if (p.size() != run.x.size()) throw ArgumentError("check_sign_condition: misaligned grids");
  SignConditionReport r;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double gap = run.x.value(k) - p.value(k);
    if (gap == 0.0) continue;
    const double v = system.fast(run.x.value(k), run.y.value(k)) * (gap > 0.0 ? 1.0 : -1.0);
    if (v > 0.0) {
      ++r.violations;
      r.worst = std::max(r.worst, v);
    }
  }
  return r;
}

double band_confinement_violation(const SampledPath& x, const SampledPath& y,
                                  const BoundaryCurvePair& curves) {
  if (x.size() != y.size()) throw ArgumentError("band_confinement_violation: misaligned grids");
  double worst = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lo = curves.lower()(y.value(k));
    const double hi = curves.upper()(y.value(k));
    worst = std::max({worst, lo - x.value(k), x.value(k) - hi});
  }
  return worst;
}

}  // namespace fsplay
