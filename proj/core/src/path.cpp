#include "fsplay/path.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fsplay/errors.hpp"

namespace fsplay {

SampledPath::SampledPath(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size()) {
    throw ArgumentError("SampledPath: " + std::to_string(times_.size()) + " times but " +
                        std::to_string(values_.size()) + " values");
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) {
      throw ArgumentError("SampledPath: time grid not strictly increasing at index " +
                          std::to_string(i));
    }
  }
}

void SampledPath::push_back(double t, double value) {
  if (!times_.empty() && !(t > times_.back())) {
    throw ArgumentError("SampledPath::push_back: time " + std::to_string(t) +
                        " does not exceed last time " + std::to_string(times_.back()));
  }
  times_.push_back(t);
  values_.push_back(value);
}

void SampledPath::reserve(std::size_t n) {
  times_.reserve(n);
  values_.reserve(n);
}

double SampledPath::at(double t) const {
  if (times_.empty() || t < times_.front() || t > times_.back()) {
    throw DomainError("SampledPath::at: time " + std::to_string(t) + " outside the grid");
  }
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.end()) return values_.back();
  const auto k = static_cast<std::size_t>(it - times_.begin());
  if (k == 0) return values_.front();
  const double t0 = times_[k - 1];
  const double t1 = times_[k];
  const double w = (t - t0) / (t1 - t0);
  return values_[k - 1] + w * (values_[k] - values_[k - 1]);
}

SampledPath SampledPath::restricted(double t0, double t1) const {
  if (empty() || t1 < t0 || t1 < times_.front() || t0 > times_.back()) {
    throw DomainError("SampledPath::restricted: window does not overlap the grid");
  }
  t0 = std::max(t0, times_.front());
  t1 = std::min(t1, times_.back());
  SampledPath out;
  out.push_back(t0, at(t0));
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (times_[i] > t0 && times_[i] < t1) out.push_back(times_[i], values_[i]);
  }
  if (t1 > t0) out.push_back(t1, at(t1));
  return out;
}

double SampledPath::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t n) {
  if (n < 2 || !(t1 > t0)) throw ArgumentError("uniform_grid: need n >= 2 and t1 > t0");
  std::vector<double> t(n);
  const double h = (t1 - t0) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) t[i] = t0 + h * static_cast<double>(i);
  t.back() = t1;
  return t;
}

}  // namespace fsplay
