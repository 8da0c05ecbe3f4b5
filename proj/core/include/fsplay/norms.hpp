#pragma once

#include "fsplay/path.hpp"

namespace fsplay {

struct AlignedPair {
  SampledPath a;
  SampledPath b;
};

/// Both paths on the union of their grids, restricted to the overlap of
/// the time ranges. Throws ArgumentError when the ranges are disjoint.
[[nodiscard]] AlignedPair resample_to_common_grid(const SampledPath& a, const SampledPath& b);

/// a - b on the common grid.
[[nodiscard]] SampledPath difference(const SampledPath& a, const SampledPath& b);

[[nodiscard]] double norm_sup(const SampledPath& d);

/// Composite trapezoid approximation of (int |d|^q)^(1/q); q in (1, inf).
[[nodiscard]] double norm_Lq(const SampledPath& d, double q);

/// ||d||_Lq + ||d'||_Lq with d' the piecewise-constant forward difference.
[[nodiscard]] double norm_W1q(const SampledPath& d, double q);

}  // namespace fsplay
