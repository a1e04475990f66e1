#pragma once

#include <span>
#include <utility>
#include <vector>

#include "voxmetric/volume.hpp"

namespace voxmetric {

struct MarginSpec {
  double margin_mm = 0.0;
};

/// Voxelwise OR. Throws EmptyInput for no masks, GeometryMismatch for differing grids.
BinaryMask mask_union(std::span<const BinaryMask> masks);

/// a AND NOT b.
BinaryMask subtract(const BinaryMask& a, const BinaryMask& b);

/// Closed-ball expansion: a voxel is set iff its centre lies within
/// margin_mm of some mask voxel centre. Throws EmptySeeds for an empty mask.
BinaryMask expand_margin(const BinaryMask& mask, MarginSpec margin, const Spacing& spacing);

struct PtvPart {
  BinaryMask ctv;
  MarginSpec margin;
};

/// Union of each part's expansion. Parts with an empty CTV contribute nothing;
/// regional margins (e.g. limbs) are expressed as separate parts.
BinaryMask build_ptv(std::span<const PtvPart> parts, const Spacing& spacing);

}  // namespace voxmetric
