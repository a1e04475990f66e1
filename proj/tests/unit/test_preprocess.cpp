#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "voxmetric/preprocess.hpp"

using namespace voxmetric;
using oracle::kind_of;

namespace {

Volume hu_row(std::vector<std::int16_t> values) {
  const Geometry g({values.size(), 1, 1}, {1, 1, 1});
  return Volume(g, std::move(values), IntensityUnit::HU);
}

}  // namespace

TEST(WindowLut, EndpointsAndHalfway) {
  const Volume out = window_lut(hu_row({-160, 240, 40}));
  EXPECT_EQ(out.kind(), ElementKind::UInt8);
  EXPECT_EQ(out.unit(), IntensityUnit::Display8Bit);
  const auto v = out.values<std::uint8_t>();
  EXPECT_EQ(v[0], 0);
  EXPECT_EQ(v[1], 255);
  EXPECT_EQ(v[2], 128);
}

TEST(WindowLut, MonotoneAndConstantOutsideWindow) {
  std::vector<std::int16_t> hu;
  for (int h = -1200; h <= 1500; ++h) hu.push_back(static_cast<std::int16_t>(h));
  const Volume out = window_lut(hu_row(hu));
  const auto v = out.values<std::uint8_t>();
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LE(v[i - 1], v[i]);
  for (std::size_t i = 0; i < hu.size(); ++i) {
    if (hu[i] <= -160) EXPECT_EQ(v[i], 0);
    if (hu[i] >= 240) EXPECT_EQ(v[i], 255);
    // Direct formula with half-away-from-zero rounding.
    const double x = (hu[i] + 160.0) / 400.0 * 255.0;
    const double expected = std::clamp(std::floor(x + 0.5), 0.0, 255.0);
    EXPECT_EQ(v[i], static_cast<std::uint8_t>(expected)) << hu[i];
  }
}

TEST(WindowLut, RejectsNonHuAndBadWindow) {
  const Geometry g({1, 1, 1}, {1, 1, 1});
  EXPECT_EQ(kind_of([&] { window_lut(Volume(g, std::vector<float>{0}, IntensityUnit::Normalized)); }),
            ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([&] { window_lut(hu_row({0}), {10, 10}); }), ErrorKind::InvalidArgument);
}

TEST(ForegroundStats, Examples) {
  const Geometry g({5, 1, 1}, {1, 1, 1});
  const std::vector<Volume> vols{Volume(g, std::vector<std::int16_t>{10, 20, 30, 40, 999}, IntensityUnit::HU)};
  const std::vector<BinaryMask> masks{BinaryMask(g, {1, 1, 1, 1, 0})};
  const NormStats s = foreground_stats(vols, masks);
  EXPECT_DOUBLE_EQ(s.mean, 25.0);
  EXPECT_NEAR(s.stddev, std::sqrt(125.0), 1e-12);
  EXPECT_EQ(s.sample_count, 4u);
  // rank (n - 1) q = 3 * 0.005 = 0.015 -> 10 + 0.015 * 10
  EXPECT_NEAR(s.p_low, 10.15, 1e-12);
  EXPECT_NEAR(s.p_high, 39.85, 1e-12);

  const Geometry one({1, 1, 1}, {1, 1, 1});
  const std::vector<Volume> two{Volume(one, std::vector<std::int16_t>{1}, IntensityUnit::HU),
                                Volume(one, std::vector<std::int16_t>{3}, IntensityUnit::HU)};
  const std::vector<BinaryMask> full{BinaryMask(one, {1}), BinaryMask(one, {1})};
  EXPECT_DOUBLE_EQ(foreground_stats(two, full).mean, 2.0);
}

TEST(ForegroundStats, ConstantForeground) {
  const Geometry g({3, 1, 1}, {1, 1, 1});
  const std::vector<Volume> vols{Volume(g, std::vector<float>{7, 7, 7}, IntensityUnit::HU)};
  const std::vector<BinaryMask> masks{BinaryMask(g, {1, 1, 1})};
  const NormStats s = foreground_stats(vols, masks);
  EXPECT_EQ(s.mean, 7.0);
  EXPECT_EQ(s.stddev, 0.0);
  EXPECT_EQ(s.p_low, 7.0);
  EXPECT_EQ(s.p_high, 7.0);
  EXPECT_EQ(kind_of([&] { normalize(vols[0], s); }), ErrorKind::DegenerateStats);
}

TEST(ForegroundStats, Errors) {
  const Geometry g({3, 1, 1}, {1, 1, 1});
  const std::vector<Volume> vols{Volume(g, std::vector<float>{7, 7, 7}, IntensityUnit::HU)};
  const std::vector<BinaryMask> empty{BinaryMask(g)};
  EXPECT_EQ(kind_of([&] { foreground_stats(vols, empty); }), ErrorKind::EmptyForeground);
  const std::vector<BinaryMask> none;
  EXPECT_EQ(kind_of([&] { foreground_stats(vols, none); }), ErrorKind::InvalidArgument);
  const std::vector<BinaryMask> other{BinaryMask(Geometry({2, 1, 1}, {1, 1, 1}), {1, 1})};
  EXPECT_EQ(kind_of([&] { foreground_stats(vols, other); }), ErrorKind::GeometryMismatch);
}

TEST(Normalize, Examples) {
  const NormStats s{25.0, std::sqrt(125.0), 10.15, 39.85, 4};
  const Volume out = normalize(hu_row({25, 20, 3000, -3000}), s);
  EXPECT_EQ(out.kind(), ElementKind::Float32);
  EXPECT_EQ(out.unit(), IntensityUnit::Normalized);
  const auto v = out.values<float>();
  EXPECT_EQ(v[0], 0.0f);
  EXPECT_NEAR(v[1], -0.4472136, 1e-6);
  EXPECT_FLOAT_EQ(v[2], static_cast<float>((39.85 - 25.0) / std::sqrt(125.0)));
  EXPECT_FLOAT_EQ(v[3], static_cast<float>((10.15 - 25.0) / std::sqrt(125.0)));
}

TEST(Normalize, InverseOnClippedRangeAndUnitMoments) {
  std::mt19937_64 rng(17);
  const Geometry g({30, 20, 10}, {1, 1, 1});
  std::vector<std::int16_t> hu(g.voxel_count());
  std::normal_distribution<double> n(40.0, 60.0);
  for (auto& h : hu) h = static_cast<std::int16_t>(std::lround(n(rng)));
  const std::vector<Volume> vols{Volume(g, hu, IntensityUnit::HU)};
  const std::vector<BinaryMask> masks{BinaryMask(g, std::vector<std::uint8_t>(g.voxel_count(), 1))};
  NormStats s = foreground_stats(vols, masks);
  const Volume normalized = normalize(vols[0], s);
  const auto v = normalized.values<float>();
  for (std::size_t i = 0; i < hu.size(); ++i)
    if (hu[i] >= s.p_low && hu[i] <= s.p_high) EXPECT_NEAR(s.mean + s.stddev * v[i], hu[i], 1e-5 * s.stddev + 1e-4);

  // Without effective clipping the foreground has zero mean and unit spread.
  s.p_low = -1e9;
  s.p_high = 1e9;
  const Volume unclipped = normalize(vols[0], s);
  const auto w = unclipped.values<float>();
  double sum = 0, sq = 0;
  for (float x : w) sum += x;
  const double mean = sum / static_cast<double>(w.size());
  for (float x : w) sq += (x - mean) * (x - mean);
  EXPECT_NEAR(mean, 0.0, 1e-5);
  EXPECT_NEAR(std::sqrt(sq / static_cast<double>(w.size())), 1.0, 1e-5);
}
