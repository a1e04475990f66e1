// Compiled with -mavx2 -mpopcnt; only reached when the CPU reports AVX2.
#include <immintrin.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <limits>

#include "kernels_internal.hpp"

namespace voxmetric::simd::detail {
namespace {

std::size_t count_nonzero(const std::uint8_t* a, std::size_t n) {
  std::size_t count = 0;
  std::size_t i = 0;
  const __m256i zero = _mm256_setzero_si256();
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const auto is_zero = static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(v, zero)));
    count += 32 - std::popcount(is_zero);
  }
  for (; i < n; ++i) count += a[i] != 0;
  return count;
}

std::size_t count_and(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  std::size_t count = 0;
  std::size_t i = 0;
  const __m256i zero = _mm256_setzero_si256();
  for (; i + 32 <= n; i += 32) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const __m256i both = _mm256_and_si256(va, vb);
    const auto is_zero =
        static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(both, zero)));
    count += 32 - std::popcount(is_zero);
  }
  for (; i < n; ++i) count += (a[i] & b[i]) != 0;
  return count;
}

void mask_or(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_or_si256(va, vb));
  }
  for (; i < n; ++i) out[i] = a[i] | b[i];
}

void mask_andnot(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_andnot_si256(vb, va));
  }
  for (; i < n; ++i) out[i] = a[i] & (b[i] ^ 1u);
}

// For integer inputs v > t is equivalent to v > floor(t). Returns false and
// sets `fill` when the answer does not depend on v.
template <typename T>
bool integer_cut(double t, int& cut, std::uint8_t& fill) {
  constexpr double lo = std::numeric_limits<T>::min();
  constexpr double hi = std::numeric_limits<T>::max();
  if (std::isnan(t) || t >= hi) {
    fill = 0;
    return false;
  }
  if (t < lo) {
    fill = 1;
    return false;
  }
  cut = static_cast<int>(std::floor(t));
  return true;
}

void threshold_u8(const std::uint8_t* in, std::size_t n, double t, std::uint8_t* out) {
  int cut = 0;
  std::uint8_t fill = 0;
  if (!integer_cut<std::uint8_t>(t, cut, fill)) {
    std::fill_n(out, n, fill);
    return;
  }
  // Unsigned compare through the signed one: flip the sign bit of both sides.
  const __m256i bias = _mm256_set1_epi8(static_cast<char>(0x80));
  const __m256i vcut = _mm256_set1_epi8(static_cast<char>(cut ^ 0x80));
  const __m256i one = _mm256_set1_epi8(1);
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_xor_si256(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + i)), bias);
    const __m256i gt = _mm256_cmpgt_epi8(v, vcut);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_and_si256(gt, one));
  }
  for (; i < n; ++i) out[i] = static_cast<double>(in[i]) > t;
}

void threshold_i16(const std::int16_t* in, std::size_t n, double t, std::uint8_t* out) {
  int cut = 0;
  std::uint8_t fill = 0;
  if (!integer_cut<std::int16_t>(t, cut, fill)) {
    std::fill_n(out, n, fill);
    return;
  }
  const __m256i vcut = _mm256_set1_epi16(static_cast<short>(cut));
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + i));
    const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + i + 16));
    const __m256i ga = _mm256_srli_epi16(_mm256_cmpgt_epi16(a, vcut), 15);
    const __m256i gb = _mm256_srli_epi16(_mm256_cmpgt_epi16(b, vcut), 15);
    // packus interleaves 128-bit lanes; permute restores element order.
    const __m256i packed = _mm256_permute4x64_epi64(_mm256_packus_epi16(ga, gb), 0xD8);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), packed);
  }
  for (; i < n; ++i) out[i] = static_cast<double>(in[i]) > t;
}

inline void store_mask4(int bits, std::uint8_t* out) {
  out[0] = bits & 1;
  out[1] = (bits >> 1) & 1;
  out[2] = (bits >> 2) & 1;
  out[3] = (bits >> 3) & 1;
}

void threshold_f32(const float* in, std::size_t n, double t, std::uint8_t* out) {
  const __m256d vt = _mm256_set1_pd(t);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_cvtps_pd(_mm_loadu_ps(in + i));
    store_mask4(_mm256_movemask_pd(_mm256_cmp_pd(v, vt, _CMP_GT_OQ)), out + i);
  }
  for (; i < n; ++i) out[i] = static_cast<double>(in[i]) > t;
}

inline __m256d load4_pd(const std::int16_t* p) {
  std::int64_t raw;
  std::memcpy(&raw, p, sizeof(raw));
  return _mm256_cvtepi32_pd(_mm_cvtepi16_epi32(_mm_cvtsi64_si128(raw)));
}
inline __m256d load4_pd(const std::uint8_t* p) {
  std::int32_t raw;
  std::memcpy(&raw, p, sizeof(raw));
  return _mm256_cvtepi32_pd(_mm_cvtepu8_epi32(_mm_cvtsi32_si128(raw)));
}
inline __m256d load4_pd(const float* p) { return _mm256_cvtps_pd(_mm_loadu_ps(p)); }

template <typename T>
void window(const T* in, std::size_t n, double lo, double hi, std::uint8_t* out) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vrange = _mm256_set1_pd(hi - lo);
  const __m256d v255 = _mm256_set1_pd(255.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d neg_half = _mm256_set1_pd(-0.5);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_mul_pd(_mm256_div_pd(_mm256_sub_pd(load4_pd(in + i), vlo), vrange), v255);
    __m256d t = _mm256_round_pd(x, _MM_FROUND_TO_ZERO | _MM_FROUND_NO_EXC);
    const __m256d frac = _mm256_sub_pd(x, t);
    t = _mm256_add_pd(t, _mm256_and_pd(_mm256_cmp_pd(frac, half, _CMP_GE_OQ), one));
    t = _mm256_sub_pd(t, _mm256_and_pd(_mm256_cmp_pd(frac, neg_half, _CMP_LE_OQ), one));
    t = _mm256_min_pd(_mm256_max_pd(t, zero), v255);
    const __m128i i32 = _mm256_cvttpd_epi32(t);
    const __m128i i8 = _mm_packus_epi16(_mm_packus_epi32(i32, i32), _mm_setzero_si128());
    const std::int32_t packed = _mm_cvtsi128_si32(i8);
    std::memcpy(out + i, &packed, 4);
  }
  for (; i < n; ++i) out[i] = window_one(static_cast<double>(in[i]), lo, hi);
}

template <typename T>
void normalize(const T* in, std::size_t n, double lo, double hi, double mean, double stddev,
               float* out) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  const __m256d vmean = _mm256_set1_pd(mean);
  const __m256d vstd = _mm256_set1_pd(stddev);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // max/min return the second operand on NaN, matching the scalar ternaries.
    __m256d c = _mm256_max_pd(vlo, load4_pd(in + i));
    c = _mm256_min_pd(vhi, c);
    _mm_storeu_ps(out + i, _mm256_cvtpd_ps(_mm256_div_pd(_mm256_sub_pd(c, vmean), vstd)));
  }
  for (; i < n; ++i) out[i] = normalize_one(static_cast<double>(in[i]), lo, hi, mean, stddev);
}

void column_seed(const std::uint8_t* seeds, std::size_t n, std::uint16_t* out) {
  const __m256i zero = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const __m256i v = _mm256_cvtepu8_epi16(_mm_loadu_si128(reinterpret_cast<const __m128i*>(seeds + i)));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_cmpeq_epi16(v, zero));
  }
  for (; i < n; ++i) out[i] = seeds[i] ? 0 : kNoSeed;
}

void column_relax(std::uint16_t* steps, const std::uint16_t* neighbour, std::size_t n) {
  const __m256i one = _mm256_set1_epi16(1);
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    __m256i* dst = reinterpret_cast<__m256i*>(steps + i);
    const __m256i via = _mm256_adds_epu16(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(neighbour + i)), one);
    _mm256_storeu_si256(dst, _mm256_min_epu16(_mm256_loadu_si256(dst), via));
  }
  for (; i < n; ++i) {
    const std::uint16_t via = neighbour[i] == kNoSeed ? kNoSeed : static_cast<std::uint16_t>(neighbour[i] + 1);
    steps[i] = std::min(steps[i], via);
  }
}

void column_squared(const std::uint16_t* steps, std::size_t n, double w, double* out) {
  const __m256d vw = _mm256_set1_pd(w);
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  const __m128i none = _mm_set1_epi32(kNoSeed);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    std::int64_t raw;
    std::memcpy(&raw, steps + i, 8);
    const __m128i k32 = _mm_cvtepu16_epi32(_mm_cvtsi64_si128(raw));
    const __m256d k = _mm256_cvtepi32_pd(k32);
    const __m256d sq = _mm256_mul_pd(_mm256_mul_pd(vw, k), k);
    const __m256d missing = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(_mm_cmpeq_epi32(k32, none)));
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(sq, inf, missing));
  }
  for (; i < n; ++i) out[i] = column_squared_one(steps[i], w);
}

void less_equal(const double* values, std::size_t n, double limit, std::uint8_t* out) {
  const __m256d vlimit = _mm256_set1_pd(limit);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(values + i);
    store_mask4(_mm256_movemask_pd(_mm256_cmp_pd(v, vlimit, _CMP_LE_OQ)), out + i);
  }
  for (; i < n; ++i) out[i] = values[i] <= limit;
}

void surface_row(const std::uint8_t* row, const std::uint8_t* y_prev, const std::uint8_t* y_next,
                 const std::uint8_t* z_prev, const std::uint8_t* z_next, std::size_t n,
                 std::uint8_t* out) {
  if (!y_prev || !y_next || !z_prev || !z_next) {
    std::copy_n(row, n, out);
    return;
  }
  auto scalar_at = [&](std::size_t i) {
    const std::uint8_t left = i > 0 ? row[i - 1] : 0;
    const std::uint8_t right = i + 1 < n ? row[i + 1] : 0;
    const std::uint8_t interior = left & right & y_prev[i] & y_next[i] & z_prev[i] & z_next[i];
    out[i] = row[i] & (interior ^ 1u);
  };
  if (n == 0) return;
  scalar_at(0);
  std::size_t i = 1;
  auto load = [](const std::uint8_t* p) {
    return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
  };
  for (; i + 33 <= n; i += 32) {
    __m256i interior = _mm256_and_si256(load(row + i - 1), load(row + i + 1));
    interior = _mm256_and_si256(interior, _mm256_and_si256(load(y_prev + i), load(y_next + i)));
    interior = _mm256_and_si256(interior, _mm256_and_si256(load(z_prev + i), load(z_next + i)));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_andnot_si256(interior, load(row + i)));
  }
  for (; i < n; ++i) scalar_at(i);
}

}  // namespace

const KernelTable& avx2_table() noexcept {
  static const KernelTable table{
      Backend::Avx2,
      count_nonzero,
      count_and,
      mask_or,
      mask_andnot,
      threshold_u8,
      threshold_i16,
      threshold_f32,
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
