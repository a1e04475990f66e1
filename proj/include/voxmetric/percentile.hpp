#pragma once

#include <cmath>
#include <span>

namespace voxmetric {

/// Linear interpolation between closest ranks at rank (n - 1) * q over an
/// ascending sequence. This is the single percentile convention used by
/// normalization, HD95 and the summaries. `sorted` must be non-empty.
inline double percentile_sorted(std::span<const double> sorted, double q) {
  const double rank = static_cast<double>(sorted.size() - 1) * q;
  const auto lower = static_cast<std::size_t>(std::floor(rank));
  const double frac = rank - static_cast<double>(lower);
  if (lower + 1 >= sorted.size() || frac == 0.0) return sorted[lower];
  return sorted[lower] + frac * (sorted[lower + 1] - sorted[lower]);
}

}  // namespace voxmetric
