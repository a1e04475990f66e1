#include <algorithm>
#include <limits>

#include "kernels_internal.hpp"

namespace voxmetric::simd::detail {
namespace {

std::size_t count_nonzero(const std::uint8_t* a, std::size_t n) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += a[i] != 0;
  return count;
}

std::size_t count_and(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += (a[i] & b[i]) != 0;
  return count;
}

void mask_or(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] | b[i];
}

void mask_andnot(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] & (b[i] ^ 1u);
}

template <typename T>
void threshold(const T* in, std::size_t n, double t, std::uint8_t* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(in[i]) > t;
}

template <typename T>
void window(const T* in, std::size_t n, double lo, double hi, std::uint8_t* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = window_one(static_cast<double>(in[i]), lo, hi);
}

template <typename T>
void normalize(const T* in, std::size_t n, double lo, double hi, double mean, double stddev,
               float* out) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = normalize_one(static_cast<double>(in[i]), lo, hi, mean, stddev);
}

void column_seed(const std::uint8_t* seeds, std::size_t n, std::uint16_t* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = seeds[i] ? 0 : kNoSeed;
}

void column_relax(std::uint16_t* steps, const std::uint16_t* neighbour, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint16_t via = neighbour[i] == kNoSeed ? kNoSeed : static_cast<std::uint16_t>(neighbour[i] + 1);
    steps[i] = std::min(steps[i], via);
  }
}

void column_squared(const std::uint16_t* steps, std::size_t n, double w, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = column_squared_one(steps[i], w);
}

void less_equal(const double* values, std::size_t n, double limit, std::uint8_t* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = values[i] <= limit;
}

void surface_row(const std::uint8_t* row, const std::uint8_t* y_prev, const std::uint8_t* y_next,
                 const std::uint8_t* z_prev, const std::uint8_t* z_next, std::size_t n,
                 std::uint8_t* out) {
  if (!y_prev || !y_next || !z_prev || !z_next) {
    for (std::size_t i = 0; i < n; ++i) out[i] = row[i];
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t left = i > 0 ? row[i - 1] : 0;
    const std::uint8_t right = i + 1 < n ? row[i + 1] : 0;
    const std::uint8_t interior = left & right & y_prev[i] & y_next[i] & z_prev[i] & z_next[i];
    out[i] = row[i] & (interior ^ 1u);
  }
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{
      Backend::Scalar,
      count_nonzero,
      count_and,
      mask_or,
      mask_andnot,
      threshold<std::uint8_t>,
      threshold<std::int16_t>,
      threshold<float>,
      window<std::int16_t>,
      window<float>,
      normalize<std::uint8_t>,
      normalize<std::int16_t>,
      normalize<float>,
      column_seed,
      column_relax,
      column_squared,
      less_equal,
      surface_row,
  };
  return table;
}

}  // namespace voxmetric::simd::detail
