#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "voxmetric/distance.hpp"

using namespace voxmetric;
using oracle::kind_of;

namespace {

BinaryMask single(const Geometry& g, std::size_t x, std::size_t y, std::size_t z) {
  std::vector<std::uint8_t> bits(g.voxel_count(), 0);
  bits[g.index(x, y, z)] = 1;
  return BinaryMask(g, std::move(bits));
}

}  // namespace

TEST(Surface, Examples) {
  const Geometry g({5, 5, 5}, {1, 1, 1});
  const BinaryMask one = single(g, 2, 2, 2);
  EXPECT_EQ(surface_voxels(one), one);

  std::vector<std::uint8_t> cube(g.voxel_count(), 0);
  for (std::size_t z = 1; z < 4; ++z)
    for (std::size_t y = 1; y < 4; ++y)
      for (std::size_t x = 1; x < 4; ++x) cube[g.index(x, y, z)] = 1;
  const BinaryMask shell = surface_voxels(BinaryMask(g, cube));
  EXPECT_EQ(shell.voxel_count(), 26u);
  EXPECT_FALSE(shell.test(2, 2, 2));

  const BinaryMask full(g, std::vector<std::uint8_t>(g.voxel_count(), 1));
  const BinaryMask border = surface_voxels(full);
  EXPECT_EQ(border.voxel_count(), 125u - 27u);
  EXPECT_FALSE(border.test(2, 2, 2));
  EXPECT_TRUE(border.test(0, 2, 2));
}

TEST(Surface, MatchesOracleOnRandomMasks) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const Geometry g(oracle::random_dims(rng, 1, 14), {1, 1, 1});
    const BinaryMask m = oracle::random_mask(rng, g, 0.6, trial % 2 == 0);
    const BinaryMask s = surface_voxels(m);
    EXPECT_EQ(s, oracle::brute_surface(m));
    for (std::size_t i : oracle::set_voxels(s)) EXPECT_TRUE(m.test(i));
  }
}

TEST(Surface, RemovingASurfaceVoxelChangesTheSurface) {
  std::mt19937_64 rng(23);
  const Geometry g({8, 8, 8}, {1, 1, 1});
  const BinaryMask m = oracle::random_mask(rng, g, 0.0, true);
  const BinaryMask s = surface_voxels(m);
  const auto voxels = oracle::set_voxels(s);
  ASSERT_FALSE(voxels.empty());
  for (std::size_t k = 0; k < voxels.size(); k += 7) {
    std::vector<std::uint8_t> bits(m.bits().begin(), m.bits().end());
    bits[voxels[k]] = 0;
    EXPECT_NE(surface_voxels(BinaryMask(g, bits)), s);
  }
}

TEST(Edt, AxisAndPythagoras) {
  const Geometry line({9, 1, 1}, {2, 1, 1});
  const DistanceField d = edt(single(line, 3, 0, 0));
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(d.mm(i), 2.0 * std::abs(static_cast<double>(i) - 3.0));

  const Geometry g({6, 6, 2}, {1, 1, 1});
  EXPECT_EQ(edt(single(g, 0, 0, 0)).mm(3, 4, 0), 5.0);
}

TEST(Edt, EmptySeeds) {
  const Geometry g({3, 3, 3}, {1, 1, 1});
  EXPECT_EQ(kind_of([&] { edt(BinaryMask(g)); }), ErrorKind::EmptySeeds);
}

TEST(Edt, ExactAgainstBruteForceIntegerSpacing) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const Geometry g(oracle::random_dims(rng, 1, 12), oracle::random_spacing(rng, true));
    BinaryMask seeds = oracle::random_mask(rng, g, 0.05 * (1 + trial % 4));
    if (seeds.empty()) seeds = single(g, 0, 0, 0);
    const DistanceField d = edt(seeds, g.spacing());
    const auto expected = oracle::brute_edt_squared(seeds);
    for (std::size_t i = 0; i < expected.size(); ++i) ASSERT_EQ(d.squared()[i], expected[i]) << trial << " @" << i;
  }
}

TEST(Edt, AgainstBruteForceRealSpacing) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    const Geometry g(oracle::random_dims(rng, 1, 12), oracle::random_spacing(rng, false));
    BinaryMask seeds = oracle::random_mask(rng, g, 0.03 * (1 + trial % 5));
    if (seeds.empty()) seeds = single(g, g.dims().nx - 1, 0, 0);
    const DistanceField d = edt(seeds, g.spacing());
    const auto expected = oracle::brute_edt_squared(seeds);
    for (std::size_t i = 0; i < expected.size(); ++i)
      ASSERT_NEAR(d.mm(i), std::sqrt(expected[i]), 1e-9) << trial << " @" << i;
  }
}

TEST(Edt, ThreadedMatchesSingleThreaded) {
  std::mt19937_64 rng(41);
  const Geometry g({40, 30, 20}, {0.8, 1.3, 2.5});
  const BinaryMask seeds = oracle::random_mask(rng, g, 0.0, true);
  ASSERT_FALSE(seeds.empty());
  const DistanceField a = edt(seeds, g.spacing(), {1});
  const DistanceField b = edt(seeds, g.spacing(), {4});
  EXPECT_TRUE(std::equal(a.squared().begin(), a.squared().end(), b.squared().begin()));
}

TEST(Edt, ZeroAtSeedsAndLipschitz) {
  std::mt19937_64 rng(43);
  const Geometry g({14, 11, 9}, {1.1, 0.7, 3.0});
  const BinaryMask seeds = oracle::random_mask(rng, g, 0.02);
  ASSERT_FALSE(seeds.empty());
  const DistanceField d = edt(seeds, g.spacing());
  const Dims& n = g.dims();
  for (std::size_t z = 0; z < n.nz; ++z)
    for (std::size_t y = 0; y < n.ny; ++y)
      for (std::size_t x = 0; x < n.nx; ++x) {
        if (seeds.test(x, y, z)) EXPECT_EQ(d.mm(x, y, z), 0.0);
        if (x + 1 < n.nx) EXPECT_LE(std::abs(d.mm(x, y, z) - d.mm(x + 1, y, z)), 1.1 + 1e-12);
        if (y + 1 < n.ny) EXPECT_LE(std::abs(d.mm(x, y, z) - d.mm(x, y + 1, z)), 0.7 + 1e-12);
        if (z + 1 < n.nz) EXPECT_LE(std::abs(d.mm(x, y, z) - d.mm(x, y, z + 1)), 3.0 + 1e-12);
      }
}

TEST(DirectedSurfaceDistances, Examples) {
  const Geometry g({12, 12, 1}, {1, 1, 1});
  std::mt19937_64 rng(47);
  const BinaryMask m = oracle::random_mask(rng, g, 0.5);
  for (double v : directed_surface_distances(m, m, g.spacing())) EXPECT_EQ(v, 0.0);

  EXPECT_EQ(directed_surface_distances(single(g, 0, 0, 0), single(g, 3, 4, 0), g.spacing()),
            std::vector<double>{5.0});

  std::vector<std::uint8_t> line(g.voxel_count(), 0);
  for (std::size_t x = 0; x < 10; ++x) line[g.index(x, 0, 0)] = 1;
  std::vector<std::uint8_t> augmented = line;
  augmented[g.index(0, 10, 0)] = 1;
  const BinaryMask a(g, line), b(g, augmented);
  EXPECT_EQ(directed_surface_distances(a, b, g.spacing()), std::vector<double>(10, 0.0));
  std::vector<double> expected(10, 0.0);
  expected.push_back(10.0);
  EXPECT_EQ(directed_surface_distances(b, a, g.spacing()), expected);

  EXPECT_EQ(kind_of([&] { directed_surface_distances(BinaryMask(g), a, g.spacing()); }), ErrorKind::EmptyMask);
  EXPECT_EQ(kind_of([&] { directed_surface_distances(a, BinaryMask(g), g.spacing()); }), ErrorKind::EmptyMask);
}

TEST(DirectedSurfaceDistances, MatchesAllPairsOracle) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 40; ++trial) {
    const Geometry g(oracle::random_dims(rng, 2, 12), oracle::random_spacing(rng, trial % 2 == 0));
    const BinaryMask a = oracle::random_mask(rng, g, 0.3, trial % 3 == 0);
    const BinaryMask b = oracle::random_mask(rng, g, 0.2, trial % 3 != 0);
    if (a.empty() || b.empty()) continue;
    const auto got = directed_surface_distances(a, b, g.spacing());
    const auto want = oracle::brute_directed(a, b);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-9);
    const SurfaceDistances both = surface_distances(a, b, g.spacing());
    EXPECT_EQ(both.a_to_b, got);
    EXPECT_EQ(both.b_to_a, directed_surface_distances(b, a, g.spacing()));
  }
}
