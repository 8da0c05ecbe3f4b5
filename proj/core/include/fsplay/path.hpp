#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fsplay {

/// A trajectory sampled on a strictly increasing time grid.
///
/// Between samples the path is the linear interpolant of its values; every
/// norm, projection and comparison in the library works with that
/// continuous extension.
class SampledPath {
 public:
  SampledPath() = default;
  /// Throws ArgumentError if the sizes differ or the grid is not strictly
  /// increasing.
  SampledPath(std::vector<double> times, std::vector<double> values);

  /// Appends a sample; `t` must exceed the current last time.
  void push_back(double t, double value);
  void reserve(std::size_t n);

  [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
  [[nodiscard]] bool empty() const noexcept { return times_.empty(); }

  [[nodiscard]] std::span<const double> times() const noexcept { return times_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double time(std::size_t i) const { return times_[i]; }
  [[nodiscard]] double value(std::size_t i) const { return values_[i]; }
  [[nodiscard]] double front_time() const { return times_.front(); }
  [[nodiscard]] double back_time() const { return times_.back(); }
  [[nodiscard]] double back_value() const { return values_.back(); }

  /// Linear interpolation; throws DomainError outside [front_time, back_time].
  [[nodiscard]] double at(double t) const;

  /// Samples lying in [t0, t1], with interpolated endpoints added when t0 or
  /// t1 fall strictly between grid points.
  [[nodiscard]] SampledPath restricted(double t0, double t1) const;

  [[nodiscard]] double max_abs() const;

  friend bool operator==(const SampledPath&, const SampledPath&) = default;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

/// n equally spaced times from t0 to t1 inclusive (n >= 2).
[[nodiscard]] std::vector<double> uniform_grid(double t0, double t1, std::size_t n);

/// Samples `fn` on `times`.
template <class Fn>
[[nodiscard]] SampledPath sample(std::vector<double> times, Fn&& fn) {
  std::vector<double> values;
  values.reserve(times.size());
  for (double t : times) values.push_back(fn(t));
  return SampledPath(std::move(times), std::move(values));
}

}  // namespace fsplay
