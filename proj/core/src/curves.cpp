#include "fsplay/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fsplay/errors.hpp"

namespace fsplay {
namespace {

double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax;
  const double dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double s = len2 > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::hypot(px - (ax + s * dx), py - (ay + s * dy));
}

}  // namespace

MonotoneCurve MonotoneCurve::affine(double slope, double intercept) {
  if (!std::isfinite(slope) || !std::isfinite(intercept) || slope < 0.0) {
    throw ArgumentError("MonotoneCurve::affine: slope must be finite and >= 0");
  }
  MonotoneCurve c;
  c.slope_ = slope;
  c.intercept_ = intercept;
  c.lipschitz_ = slope;
  return c;
}

MonotoneCurve MonotoneCurve::piecewise_linear(std::vector<std::pair<double, double>> nodes) {
  if (nodes.size() < 2) throw ArgumentError("MonotoneCurve::piecewise_linear: need >= 2 nodes");
  auto data = std::make_shared<Nodes>();
  data->y.reserve(nodes.size());
  data->f.reserve(nodes.size());
  double lip = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto [y, f] = nodes[i];
    if (!std::isfinite(y) || !std::isfinite(f)) {
      throw ArgumentError("MonotoneCurve::piecewise_linear: non-finite node");
    }
    if (i > 0) {
      if (!(y > data->y.back())) {
        throw ArgumentError("MonotoneCurve::piecewise_linear: node y not strictly increasing at " +
                            std::to_string(i));
      }
      if (f < data->f.back()) {
        throw ArgumentError("MonotoneCurve::piecewise_linear: curve decreases at node " +
                            std::to_string(i));
      }
      lip = std::max(lip, (f - data->f.back()) / (y - data->y.back()));
    }
    data->y.push_back(y);
    data->f.push_back(f);
  }
  MonotoneCurve c;
  c.lipschitz_ = lip;
  c.nodes_ = std::move(data);
  return c;
}

double MonotoneCurve::operator()(double y) const {
  if (!nodes_) return slope_ * y + intercept_;
  const auto& ys = nodes_->y;
  const auto& fs = nodes_->f;
  if (y <= ys.front()) return fs.front();
  if (y >= ys.back()) return fs.back();
  const auto k = static_cast<std::size_t>(std::upper_bound(ys.begin(), ys.end(), y) - ys.begin());
  const double w = (y - ys[k - 1]) / (ys[k] - ys[k - 1]);
  return fs[k - 1] + w * (fs[k] - fs[k - 1]);
}

double MonotoneCurve::graph_distance(double x, double y) const {
  if (!nodes_) return std::abs(x - slope_ * y - intercept_) / std::sqrt(1.0 + slope_ * slope_);
  const auto& ys = nodes_->y;
  const auto& fs = nodes_->f;
  // flat extensions are vertical rays in the (x, y) plane
  double best = std::numeric_limits<double>::infinity();
  best = std::min(best, y <= ys.front() ? std::abs(x - fs.front())
                                        : std::hypot(x - fs.front(), y - ys.front()));
  best = std::min(best, y >= ys.back() ? std::abs(x - fs.back())
                                       : std::hypot(x - fs.back(), y - ys.back()));
  for (std::size_t i = 1; i < ys.size(); ++i) {
    best = std::min(best, segment_distance(x, y, fs[i - 1], ys[i - 1], fs[i], ys[i]));
  }
  return best;
}

BoundaryCurvePair::BoundaryCurvePair(MonotoneCurve lower, MonotoneCurve upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {}

double BoundaryCurvePair::combined_lipschitz() const noexcept {
  return std::max(lower_.lipschitz(), upper_.lipschitz());
}

double BoundaryCurvePair::clamp(double x, double y) const {
  return std::min(std::max(x, lower_(y)), upper_(y));
}

void BoundaryCurvePair::validate_on_grid(double y_lo, double y_hi, std::size_t samples) const {
  if (samples < 2 || !(y_hi > y_lo)) {
    throw ArgumentError("validate_on_grid: need >= 2 samples on a nonempty range");
  }
  const double h = (y_hi - y_lo) / static_cast<double>(samples - 1);
  const double slack = 1e-12;
  double prev_y = y_lo;
  double prev_lo = lower_(y_lo);
  double prev_hi = upper_(y_lo);
  for (std::size_t i = 0; i < samples; ++i) {
    const double y = i + 1 == samples ? y_hi : y_lo + h * static_cast<double>(i);
    const double lo = lower_(y);
    const double hi = upper_(y);
    if (!(lo < hi)) {
      throw ArgumentError("boundary curves: F-(y) >= F+(y) at y = " + std::to_string(y));
    }
    if (i > 0) {
      const double dy = y - prev_y;
      if (lo < prev_lo || hi < prev_hi) {
        throw ArgumentError("boundary curves: not monotone near y = " + std::to_string(y));
      }
      if (lo - prev_lo > (lipschitz_lower() + slack) * dy + slack ||
          hi - prev_hi > (lipschitz_upper() + slack) * dy + slack) {
        throw ArgumentError("boundary curves: Lipschitz bound violated near y = " +
                            std::to_string(y));
      }
    }
    prev_y = y;
    prev_lo = lo;
    prev_hi = hi;
  }
}

BoundaryCurvePair BoundaryCurvePair::unit_slope(double half_width) {
  return {MonotoneCurve::affine(1.0, -half_width), MonotoneCurve::affine(1.0, half_width)};
}

}  // namespace fsplay
