#pragma once

// Crop/paste helpers and the raw squared-distance transform shared by the
// distance, margin and phantom code.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "voxmetric/geometry.hpp"
#include "voxmetric/volume.hpp"

namespace voxmetric::detail {

/// Grows `box` by pad[a] voxels per axis, clamped to the grid.
BoundingBox pad_box(const BoundingBox& box, const std::int64_t pad[3], const Dims& dims);
BoundingBox union_box(const BoundingBox& a, const BoundingBox& b);
Dims box_dims(const BoundingBox& box);

std::vector<std::uint8_t> crop(std::span<const std::uint8_t> bits, const Dims& dims,
                               const BoundingBox& box);
/// Writes `sub` (laid out over `box`) into `full`.
void paste(std::span<const std::uint8_t> sub, const BoundingBox& box, std::span<std::uint8_t> full,
           const Dims& dims);

/// 6-connected boundary of a byte grid; off-grid neighbours count as background.
std::vector<std::uint8_t> surface_bits(std::span<const std::uint8_t> bits, const Dims& dims);

/// Receives one finished z-slice (nx * ny squared mm distances). May be
/// called concurrently for different z.
using SliceSink = std::function<void(std::size_t z, std::span<const double> slice)>;

/// Squared mm distance from every voxel to the nearest seed, handed to `sink`
/// slice by slice; +inf everywhere when there are no seeds.
void squared_edt_slices(std::span<const std::uint8_t> seeds, const Dims& dims, const Spacing& spacing,
                        unsigned threads, const SliceSink& sink);

}  // namespace voxmetric::detail
