#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "voxmetric/simd.hpp"

namespace voxmetric::simd::detail {

const KernelTable& scalar_table() noexcept;
#if defined(VOXMETRIC_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif

// Shared so SIMD tails stay bit-identical to the scalar path.
inline double round_half_away(double x) {
  const double t = std::trunc(x);
  const double frac = x - t;
  if (frac >= 0.5) return t + 1.0;
  if (frac <= -0.5) return t - 1.0;
  return t;
}

inline std::uint8_t window_one(double v, double lo, double hi) {
  double x = round_half_away(((v - lo) / (hi - lo)) * 255.0);
  if (!(x > 0.0)) x = 0.0;
  if (x > 255.0) x = 255.0;
  return static_cast<std::uint8_t>(x);
}

inline float normalize_one(double v, double lo, double hi, double mean, double stddev) {
  double c = v < lo ? lo : v;
  c = c > hi ? hi : c;
  return static_cast<float>((c - mean) / stddev);
}

inline constexpr std::uint16_t kNoSeed = 0xFFFF;

inline double column_squared_one(std::uint16_t steps, double w) {
  if (steps == kNoSeed) return std::numeric_limits<double>::infinity();
  const double k = steps;
  return (w * k) * k;
}

}  // namespace voxmetric::simd::detail
