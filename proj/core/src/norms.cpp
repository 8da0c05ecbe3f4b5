#include "fsplay/norms.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fsplay/errors.hpp"

namespace fsplay {
namespace {

void check_q(double q) {
  if (!(q > 1.0) || !std::isfinite(q)) throw ArgumentError("norm: q must lie in (1, inf)");
}

}  // namespace

AlignedPair resample_to_common_grid(const SampledPath& a, const SampledPath& b) {
  if (a.empty() || b.empty()) throw ArgumentError("resample: empty path");
  const double lo = std::max(a.front_time(), b.front_time());
  const double hi = std::min(a.back_time(), b.back_time());
  if (lo > hi) throw ArgumentError("resample: time ranges do not overlap");

  std::vector<double> grid;
  grid.reserve(a.size() + b.size());
  std::merge(a.times().begin(), a.times().end(), b.times().begin(), b.times().end(),
             std::back_inserter(grid));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<double> t;
  t.reserve(grid.size() + 2);
  t.push_back(lo);
  for (double s : grid) {
    if (s > lo && s < hi) t.push_back(s);
  }
  if (hi > lo) t.push_back(hi);

  std::vector<double> va;
  std::vector<double> vb;
  va.reserve(t.size());
  vb.reserve(t.size());
  for (double s : t) {
    va.push_back(a.at(s));
    vb.push_back(b.at(s));
  }
  return {SampledPath(t, std::move(va)), SampledPath(t, std::move(vb))};
}

SampledPath difference(const SampledPath& a, const SampledPath& b) {
  AlignedPair p = resample_to_common_grid(a, b);
  std::vector<double> t(p.a.times().begin(), p.a.times().end());
  std::vector<double> v(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) v[i] = p.a.value(i) - p.b.value(i);
  return SampledPath(std::move(t), std::move(v));
}

double norm_sup(const SampledPath& d) {
  if (d.empty()) throw ArgumentError("norm_sup: empty path");
  return d.max_abs();
}

double norm_Lq(const SampledPath& d, double q) {
  check_q(q);
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    const double h = d.time(k + 1) - d.time(k);
    s += 0.5 * h * (std::pow(std::abs(d.value(k)), q) + std::pow(std::abs(d.value(k + 1)), q));
  }
  return std::pow(s, 1.0 / q);
}

double norm_W1q(const SampledPath& d, double q) {
  check_q(q);
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    const double h = d.time(k + 1) - d.time(k);
    s += h * std::pow(std::abs((d.value(k + 1) - d.value(k)) / h), q);
  }
  return norm_Lq(d, q) + std::pow(s, 1.0 / q);
}

}  // namespace fsplay
