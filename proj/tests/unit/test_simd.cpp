#include <gtest/gtest.h>

#include <cstring>
#include <limits>
#include <random>
#include <vector>

#include "voxmetric/simd.hpp"

using namespace voxmetric::simd;

namespace {

const KernelTable& scalar() { return *kernels_for(Backend::Scalar); }

template <typename T>
bool same_bits(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0);
}

// Lengths around the 32/16/8/4-element vector widths plus a large one.
const std::vector<std::size_t> kLengths{0, 1, 3, 4, 7, 8, 15, 16, 31, 32, 33, 63, 64, 65, 100, 1000, 4099};

class SimdEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    avx2_ = kernels_for(Backend::Avx2);
    if (!avx2_) GTEST_SKIP() << "AVX2 kernels unavailable on this build/CPU";
  }
  const KernelTable& avx2() const { return *avx2_; }
  std::mt19937_64 rng_{2024};

  std::vector<std::uint8_t> bits(std::size_t n, double density) {
    std::bernoulli_distribution b(density);
    std::vector<std::uint8_t> out(n);
    for (auto& x : out) x = b(rng_);
    return out;
  }

 private:
  const KernelTable* avx2_ = nullptr;
};

}  // namespace

TEST(SimdDispatch, ScalarAlwaysAvailableAndActiveIsConsistent) {
  ASSERT_NE(kernels_for(Backend::Scalar), nullptr);
  EXPECT_EQ(kernels().backend, active_backend());
  EXPECT_EQ(to_string(Backend::Scalar), "scalar");
  EXPECT_EQ(to_string(Backend::Avx2), "avx2");
}

TEST_F(SimdEquivalence, MaskCountsAndLogic) {
  for (std::size_t n : kLengths) {
    for (double density : {0.0, 0.1, 0.5, 1.0}) {
      const auto a = bits(n, density);
      const auto b = bits(n, 0.5);
      EXPECT_EQ(scalar().count_nonzero(a.data(), n), avx2().count_nonzero(a.data(), n)) << n;
      EXPECT_EQ(scalar().count_and(a.data(), b.data(), n), avx2().count_and(a.data(), b.data(), n)) << n;
      std::vector<std::uint8_t> s(n), v(n);
      scalar().mask_or(a.data(), b.data(), s.data(), n);
      avx2().mask_or(a.data(), b.data(), v.data(), n);
      EXPECT_TRUE(same_bits(s, v)) << n;
      scalar().mask_andnot(a.data(), b.data(), s.data(), n);
      avx2().mask_andnot(a.data(), b.data(), v.data(), n);
      EXPECT_TRUE(same_bits(s, v)) << n;
    }
  }
}

TEST_F(SimdEquivalence, Thresholds) {
  const std::vector<double> thresholds{-1e9, -32769, -32768.5, -1.5, -1, -0.5, 0, 0.5, 1, 127.5, 128,
                                       254.5, 255, 300, 32767, 1e9, std::numeric_limits<double>::infinity(),
                                       -std::numeric_limits<double>::infinity(), std::nan("")};
  for (std::size_t n : kLengths) {
    std::vector<std::uint8_t> u8(n);
    std::vector<std::int16_t> i16(n);
    std::vector<float> f32(n);
    for (std::size_t i = 0; i < n; ++i) {
      u8[i] = static_cast<std::uint8_t>(rng_());
      i16[i] = static_cast<std::int16_t>(rng_());
      f32[i] = static_cast<float>(static_cast<std::int16_t>(rng_())) * 0.5f;
    }
    if (n > 4) {
      f32[0] = std::nanf("");
      f32[1] = std::numeric_limits<float>::infinity();
      i16[2] = -32768;
      i16[3] = 32767;
    }
    for (double t : thresholds) {
      std::vector<std::uint8_t> s(n), v(n);
      scalar().threshold_u8(u8.data(), n, t, s.data());
      avx2().threshold_u8(u8.data(), n, t, v.data());
      EXPECT_TRUE(same_bits(s, v)) << "u8 n=" << n << " t=" << t;
      scalar().threshold_i16(i16.data(), n, t, s.data());
      avx2().threshold_i16(i16.data(), n, t, v.data());
      EXPECT_TRUE(same_bits(s, v)) << "i16 n=" << n << " t=" << t;
      scalar().threshold_f32(f32.data(), n, t, s.data());
      avx2().threshold_f32(f32.data(), n, t, v.data());
      EXPECT_TRUE(same_bits(s, v)) << "f32 n=" << n << " t=" << t;
    }
  }
}

TEST_F(SimdEquivalence, WindowLut) {
  for (std::size_t n : kLengths) {
    std::vector<std::int16_t> i16(n);
    std::vector<float> f32(n);
    std::uniform_real_distribution<float> u(-400.0f, 500.0f);
    for (std::size_t i = 0; i < n; ++i) {
      // Every HU in a range that covers the half-way points of the default window.
      i16[i] = static_cast<std::int16_t>(-300 + static_cast<int>(i % 700));
      f32[i] = u(rng_);
    }
    if (n > 3) {
      f32[0] = std::nanf("");
      f32[1] = std::numeric_limits<float>::infinity();
      f32[2] = -std::numeric_limits<float>::infinity();
    }
    for (auto [lo, hi] : {std::pair{-160.0, 240.0}, std::pair{-1000.0, 1000.0}, std::pair{0.5, 1.5}}) {
      std::vector<std::uint8_t> s(n), v(n);
      scalar().window_i16(i16.data(), n, lo, hi, s.data());
      avx2().window_i16(i16.data(), n, lo, hi, v.data());
      EXPECT_TRUE(same_bits(s, v)) << n;
      scalar().window_f32(f32.data(), n, lo, hi, s.data());
      avx2().window_f32(f32.data(), n, lo, hi, v.data());
      EXPECT_TRUE(same_bits(s, v)) << n;
    }
  }
}

TEST_F(SimdEquivalence, Normalize) {
  for (std::size_t n : kLengths) {
    std::vector<std::uint8_t> u8(n);
    std::vector<std::int16_t> i16(n);
    std::vector<float> f32(n);
    std::normal_distribution<float> g(40.0f, 80.0f);
    for (std::size_t i = 0; i < n; ++i) {
      u8[i] = static_cast<std::uint8_t>(rng_());
      i16[i] = static_cast<std::int16_t>(rng_() % 3000) - 1500;
      f32[i] = g(rng_);
    }
    if (n > 2) {
      f32[0] = std::numeric_limits<float>::infinity();
      f32[1] = -std::numeric_limits<float>::infinity();
    }
    std::vector<float> s(n), v(n);
    scalar().normalize_u8(u8.data(), n, 10, 200, 101.3, 55.7, s.data());
    avx2().normalize_u8(u8.data(), n, 10, 200, 101.3, 55.7, v.data());
    EXPECT_TRUE(same_bits(s, v)) << n;
    scalar().normalize_i16(i16.data(), n, -900.5, 1100, 33.1, 270.9, s.data());
    avx2().normalize_i16(i16.data(), n, -900.5, 1100, 33.1, 270.9, v.data());
    EXPECT_TRUE(same_bits(s, v)) << n;
    scalar().normalize_f32(f32.data(), n, -100, 180, 40.25, 79.5, s.data());
    avx2().normalize_f32(f32.data(), n, -100, 180, 40.25, 79.5, v.data());
    EXPECT_TRUE(same_bits(s, v)) << n;
  }
}

TEST_F(SimdEquivalence, ColumnKernelsAndLessEqual) {
  for (std::size_t n : kLengths) {
    const auto seeds = bits(n, 0.3);
    std::vector<std::uint16_t> cs(n), cv(n);
    scalar().column_seed(seeds.data(), n, cs.data());
    avx2().column_seed(seeds.data(), n, cv.data());
    EXPECT_TRUE(same_bits(cs, cv)) << n;

    std::vector<std::uint16_t> neighbour(n);
    std::uniform_int_distribution<int> step(0, 40);
    for (std::size_t i = 0; i < n; ++i) neighbour[i] = i % 5 == 0 ? 0xFFFF : (i % 7 == 0 ? 0xFFFE : step(rng_));
    scalar().column_relax(cs.data(), neighbour.data(), n);
    avx2().column_relax(cv.data(), neighbour.data(), n);
    EXPECT_TRUE(same_bits(cs, cv)) << n;

    std::vector<double> s(n), v(n);
    for (double w : {1.0, 25.0, 1.373291015625, 0.3}) {
      scalar().column_squared(neighbour.data(), n, w, s.data());
      avx2().column_squared(neighbour.data(), n, w, v.data());
      EXPECT_TRUE(same_bits(s, v)) << n;
    }

    std::vector<double> values(n);
    std::uniform_int_distribution<int> u(0, 20);
    for (auto& x : values) x = u(rng_) * 0.25;
    if (n > 1) values[0] = std::numeric_limits<double>::infinity();
    std::vector<std::uint8_t> a(n), b(n);
    for (double limit : {0.0, 1.0, 2.5, 1e300}) {
      scalar().less_equal(values.data(), n, limit, a.data());
      avx2().less_equal(values.data(), n, limit, b.data());
      EXPECT_TRUE(same_bits(a, b)) << n;
    }
  }
}

TEST_F(SimdEquivalence, SurfaceRow) {
  for (std::size_t n : kLengths) {
    for (double density : {0.5, 0.9, 1.0}) {
      const auto row = bits(n, density);
      const auto yp = bits(n, density), yn = bits(n, density), zp = bits(n, density), zn = bits(n, density);
      for (int border = 0; border < 16; ++border) {
        const std::uint8_t* p[4] = {(border & 1) ? nullptr : yp.data(), (border & 2) ? nullptr : yn.data(),
                                    (border & 4) ? nullptr : zp.data(), (border & 8) ? nullptr : zn.data()};
        std::vector<std::uint8_t> s(n), v(n);
        scalar().surface_row(row.data(), p[0], p[1], p[2], p[3], n, s.data());
        avx2().surface_row(row.data(), p[0], p[1], p[2], p[3], n, v.data());
        EXPECT_TRUE(same_bits(s, v)) << n << " border " << border;
      }
    }
  }
}

TEST(SimdScalar, WindowRoundsHalfAwayFromZero) {
  const std::vector<std::int16_t> hu{-160, 240, 40, -161, 1000};
  std::vector<std::uint8_t> out(hu.size());
  scalar().window_i16(hu.data(), hu.size(), -160, 240, out.data());
  EXPECT_EQ(out, (std::vector<std::uint8_t>{0, 255, 128, 0, 255}));
}

TEST(SimdScalar, SurfaceRowTreatsRowEndsAndMissingRowsAsBackground) {
  const std::vector<std::uint8_t> full(5, 1);
  std::vector<std::uint8_t> out(5);
  scalar().surface_row(full.data(), full.data(), full.data(), full.data(), full.data(), 5, out.data());
  EXPECT_EQ(out, (std::vector<std::uint8_t>{1, 0, 0, 0, 1}));
  scalar().surface_row(full.data(), nullptr, full.data(), full.data(), full.data(), 5, out.data());
  EXPECT_EQ(out, (std::vector<std::uint8_t>{1, 1, 1, 1, 1}));
}
