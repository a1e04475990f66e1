#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "voxmetric/volume.hpp"

namespace voxmetric {

/// Distance (mm) from every voxel centre to the nearest seed voxel centre.
/// Held as squared millimetres; mm() takes the root on access.
class DistanceField {
 public:
  DistanceField(Geometry geometry, std::vector<double> squared_mm);

  const Geometry& geometry() const noexcept { return geometry_; }
  std::span<const double> squared() const noexcept { return squared_; }
  double mm(std::size_t linear) const { return std::sqrt(squared_[linear]); }
  double mm(std::size_t x, std::size_t y, std::size_t z) const {
    return mm(geometry_.index(x, y, z));
  }

 private:
  Geometry geometry_;
  std::vector<double> squared_;
};

struct EdtOptions {
  /// Threads for the per-axis line passes.
  unsigned threads = 1;
};

/// Voxels of `mask` with at least one 6-neighbour that is background or off-grid.
BinaryMask surface_voxels(const BinaryMask& mask);

/// Exact Euclidean distance transform with per-axis spacing. Separable lower
/// envelope of parabolas along x, y, then z, each pass linear in the line length.
/// Throws EmptySeeds when no voxel is set.
DistanceField edt(const BinaryMask& seeds, const Spacing& spacing, const EdtOptions& options = {});
inline DistanceField edt(const BinaryMask& seeds) { return edt(seeds, seeds.geometry().spacing()); }

/// For each surface voxel of `from`, the distance to the nearest surface voxel
/// of `to`, sorted ascending. Throws EmptyMask if either mask is empty.
std::vector<double> directed_surface_distances(const BinaryMask& from, const BinaryMask& to,
                                               const Spacing& spacing);

struct SurfaceDistances {
  std::vector<double> a_to_b;  // sorted ascending
  std::vector<double> b_to_a;  // sorted ascending
};

/// Both directed sequences, sharing one crop and one pair of surface extractions.
SurfaceDistances surface_distances(const BinaryMask& a, const BinaryMask& b, const Spacing& spacing,
                                   const EdtOptions& options = {});

}  // namespace voxmetric
