#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

// Data-parallel inner loops used by the mask, preprocessing and distance code.
//
// Every kernel has a scalar reference implementation and, where the build and
// the CPU allow it, an AVX2 variant. The variant is picked once at first use:
// the VOXMETRIC_SIMD environment variable ("scalar", "avx2", "auto") overrides
// CPU detection. All variants produce bit-identical output; floating-point
// kernels evaluate the same double-precision expressions in the same order.

namespace voxmetric::simd {

enum class Backend { Scalar, Avx2 };

/// Column kernels count steps in 16 bits; 0xFFFF is reserved.
inline constexpr std::size_t kColumnLimit = 0xFFFF;

std::string_view to_string(Backend backend) noexcept;

struct KernelTable {
  Backend backend;

  // Byte masks. Inputs of the binary ops must hold 0/1 values.
  std::size_t (*count_nonzero)(const std::uint8_t* a, std::size_t n);
  std::size_t (*count_and)(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
  void (*mask_or)(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n);
  void (*mask_andnot)(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out,
                      std::size_t n);

  // out[i] = in[i] > threshold
  void (*threshold_u8)(const std::uint8_t* in, std::size_t n, double threshold, std::uint8_t* out);
  void (*threshold_i16)(const std::int16_t* in, std::size_t n, double threshold, std::uint8_t* out);
  void (*threshold_f32)(const float* in, std::size_t n, double threshold, std::uint8_t* out);

  // out[i] = clamp(round_half_away(((in[i] - lo) / (hi - lo)) * 255), 0, 255); NaN maps to 0.
  void (*window_i16)(const std::int16_t* in, std::size_t n, double lo, double hi, std::uint8_t* out);
  void (*window_f32)(const float* in, std::size_t n, double lo, double hi, std::uint8_t* out);

  // out[i] = float((min(max(in[i], lo), hi) - mean) / stddev)
  void (*normalize_u8)(const std::uint8_t* in, std::size_t n, double lo, double hi, double mean,
                       double stddev, float* out);
  void (*normalize_i16)(const std::int16_t* in, std::size_t n, double lo, double hi, double mean,
                        double stddev, float* out);
  void (*normalize_f32)(const float* in, std::size_t n, double lo, double hi, double mean,
                        double stddev, float* out);

  // Distance transform columns, in whole steps along z; 0xFFFF means no seed.
  // out[i] = seeds[i] ? 0 : 0xFFFF
  void (*column_seed)(const std::uint8_t* seeds, std::size_t n, std::uint16_t* out);
  // steps[i] = min(steps[i], saturating(neighbour[i] + 1))
  void (*column_relax)(std::uint16_t* steps, const std::uint16_t* neighbour, std::size_t n);
  // out[i] = steps[i] == 0xFFFF ? +inf : (w * steps[i]) * steps[i]
  void (*column_squared)(const std::uint16_t* steps, std::size_t n, double w, double* out);
  // out[i] = values[i] <= limit
  void (*less_equal)(const double* values, std::size_t n, double limit, std::uint8_t* out);

  // One x-row of the 6-connected boundary: out[i] = row[i] && !(all six neighbours set).
  // Neighbour rows that fall outside the grid are passed as nullptr.
  void (*surface_row)(const std::uint8_t* row, const std::uint8_t* y_prev,
                      const std::uint8_t* y_next, const std::uint8_t* z_prev,
                      const std::uint8_t* z_next, std::size_t n, std::uint8_t* out);
};

/// Kernels for the active backend.
const KernelTable& kernels();

/// nullptr when `backend` is not compiled in or not supported by this CPU.
const KernelTable* kernels_for(Backend backend) noexcept;

Backend active_backend();

}  // namespace voxmetric::simd
