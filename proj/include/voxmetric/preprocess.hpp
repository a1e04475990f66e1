#pragma once

#include <span>

#include "voxmetric/volume.hpp"

namespace voxmetric {

/// Linear HU display window; lo < hi.
struct WindowSpec {
  double lo = -160.0;
  double hi = 240.0;
};

/// Foreground intensity statistics used by percentile-clipped z-score normalization.
struct NormStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
  double p_low = 0.0;   // 0.5th percentile
  double p_high = 0.0;  // 99.5th percentile
  std::size_t sample_count = 0;

  bool operator==(const NormStats&) const = default;
};

/// Maps HU to 0..255 with out = clamp(round((hu - lo) / (hi - lo) * 255), 0, 255),
/// rounding half away from zero. Requires an HU volume.
Volume window_lut(const Volume& volume, const WindowSpec& window = {});

/// Pools the intensities under each mask across all cases. Throws
/// EmptyForeground when no voxel is selected.
NormStats foreground_stats(std::span<const Volume> volumes, std::span<const BinaryMask> masks);

/// (clamp(v, p_low, p_high) - mean) / stddev as float32. Throws DegenerateStats when stddev is 0.
Volume normalize(const Volume& volume, const NormStats& stats);

}  // namespace voxmetric
