#pragma once

#include <memory>
#include <utility>
#include <vector>

namespace fsplay {

/// A monotone non-decreasing Lipschitz function F(y).
///
/// Two families are supported: affine `slope * y + intercept` with
/// slope >= 0, and piecewise-linear through a node list with constant
/// extension beyond the first and last node. Copies share the node storage.
class MonotoneCurve {
 public:
  static MonotoneCurve affine(double slope, double intercept);
  /// Nodes are (y, F(y)) pairs with strictly increasing y and
  /// non-decreasing F; at least two nodes.
  static MonotoneCurve piecewise_linear(std::vector<std::pair<double, double>> nodes);

  [[nodiscard]] double operator()(double y) const;
  /// Largest slope; exact for both families.
  [[nodiscard]] double lipschitz() const noexcept { return lipschitz_; }
  [[nodiscard]] bool is_affine() const noexcept { return nodes_ == nullptr; }

  /// Euclidean distance from (x, y) to the graph {(F(s), s) : s real}.
  [[nodiscard]] double graph_distance(double x, double y) const;

 private:
  struct Nodes {
    std::vector<double> y;
    std::vector<double> f;
  };

  MonotoneCurve() = default;

  double slope_ = 0.0;
  double intercept_ = 0.0;
  double lipschitz_ = 0.0;
  std::shared_ptr<const Nodes> nodes_;
};

/// The curves F- < F+ bounding the critical band {F-(y) <= x <= F+(y)}.
class BoundaryCurvePair {
 public:
  BoundaryCurvePair(MonotoneCurve lower, MonotoneCurve upper);

  [[nodiscard]] const MonotoneCurve& lower() const noexcept { return lower_; }
  [[nodiscard]] const MonotoneCurve& upper() const noexcept { return upper_; }
  [[nodiscard]] double lipschitz_lower() const noexcept { return lower_.lipschitz(); }
  [[nodiscard]] double lipschitz_upper() const noexcept { return upper_.lipschitz(); }
  /// L± = max{L+, L-}.
  [[nodiscard]] double combined_lipschitz() const noexcept;

  /// min{max{x, F-(y)}, F+(y)}.
  [[nodiscard]] double clamp(double x, double y) const;

  /// Checks F- < F+, monotonicity and the Lipschitz bound on `samples`
  /// equally spaced points of [y_lo, y_hi]. Throws ArgumentError.
  void validate_on_grid(double y_lo, double y_hi, std::size_t samples) const;

  /// F±(y) = y ± half_width.
  static BoundaryCurvePair unit_slope(double half_width = 1.0);

 private:
  MonotoneCurve lower_;
  MonotoneCurve upper_;
};

}  // namespace fsplay
