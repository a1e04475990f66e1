#pragma once

#include <cstdint>

#include "voxmetric/volume.hpp"

namespace voxmetric {

// Synthetic whole-body-like CT phantoms with known contours.
//
// Random numbers come from std::mt19937_64 (a fully specified engine), turned
// into doubles as (bits >> 11) * 2^-53, so a (spec, seed) pair reproduces the
// same case bit for bit on any conforming platform.
//
// Tissue values (HU) are fixed constants chosen for contrast ordering only.
inline constexpr std::int16_t kAirHu = -1000;
inline constexpr std::int16_t kSoftTissueHu = 20;
inline constexpr std::int16_t kLymphNodeHu = 30;
inline constexpr std::int16_t kSpleenHu = 60;
inline constexpr std::int16_t kBoneHu = 700;

// CTV -> PTV margins (mm).
inline constexpr double kBoneMarrowMarginMm = 2.0;
inline constexpr double kSpleenMarginMm = 5.0;
inline constexpr double kLymphNodeMarginMm = 5.0;

struct MmRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct PhantomSpec {
  Geometry geometry{{96, 64, 48}, {1.5, 1.5, 2.5}};
  std::uint64_t seed = 1;

  // Bone along the body axis (spine, long bones); these are also the
  // "segmented" bones returned in PhantomCase::bones.
  int bone_tubes = 4;
  MmRange tube_radius_mm{3.0, 6.0};
  // Ellipsoidal marrow-bearing bones outside the segmented set.
  int bone_blocks = 2;
  MmRange block_radius_mm{6.0, 12.0};

  int spleen_count = 1;
  MmRange spleen_radius_mm{8.0, 14.0};

  int lymph_chains = 3;
  int nodes_per_chain = 4;
  MmRange node_diameter_mm{4.0, 15.0};

  /// Uniform integer noise in [-noise_hu, noise_hu] added to every voxel.
  double noise_hu = 10.0;
};

struct PhantomCase {
  Volume ct;  // int16, HU
  BinaryMask ctv_bm;
  BinaryMask ctv_spleen;
  BinaryMask ctv_ln;
  BinaryMask bones;  // subset of ctv_bm
  BinaryMask ptv;    // build_ptv of the three CTVs with margins 2 / 5 / 5 mm

  bool operator==(const PhantomCase&) const = default;
};

/// Throws SpecInfeasible when a structure cannot fit in the body/grid and
/// InvalidArgument for negative counts or inverted ranges.
PhantomCase generate_phantom(const PhantomSpec& spec);

/// Simulated prediction: the boundary moves in and out by a smooth random
/// field bounded by boundary_noise_mm, then floor(drop_fraction * components)
/// randomly chosen 6-connected components are deleted. Zero noise and zero
/// drop return the input unchanged.
BinaryMask perturb_mask(const BinaryMask& mask, const Spacing& spacing, double boundary_noise_mm,
                        double drop_fraction, std::uint64_t seed);

}  // namespace voxmetric
