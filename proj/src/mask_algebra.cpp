#include "voxmetric/mask_algebra.hpp"

#include <cmath>

#include "grid_ops.hpp"
#include "voxmetric/error.hpp"
#include "voxmetric/simd.hpp"

namespace voxmetric {

BinaryMask mask_union(std::span<const BinaryMask> masks) {
  if (masks.empty()) throw Error(ErrorKind::EmptyInput, "union of zero masks");
  const Geometry& geometry = masks.front().geometry();
  std::vector<std::uint8_t> bits(masks.front().bits().begin(), masks.front().bits().end());
  for (const BinaryMask& m : masks.subspan(1)) {
    require_compatible(geometry, m.geometry(), "union operands");
    simd::kernels().mask_or(bits.data(), m.bits().data(), bits.data(), bits.size());
  }
  return BinaryMask(geometry, std::move(bits));
}

BinaryMask subtract(const BinaryMask& a, const BinaryMask& b) {
  require_compatible(a.geometry(), b.geometry(), "subtract operands");
  std::vector<std::uint8_t> bits(a.bits().size());
  simd::kernels().mask_andnot(a.bits().data(), b.bits().data(), bits.data(), bits.size());
  return BinaryMask(a.geometry(), std::move(bits));
}

BinaryMask expand_margin(const BinaryMask& mask, MarginSpec margin, const Spacing& spacing) {
  if (!(margin.margin_mm >= 0.0) || !std::isfinite(margin.margin_mm))
    throw Error(ErrorKind::InvalidArgument, "margin must be a finite non-negative length");
  const auto box = bounding_box(mask);
  if (!box) throw Error(ErrorKind::EmptySeeds, "cannot expand an empty mask");

  // Nothing farther than the margin along any single axis can be reached; the
  // extra voxel absorbs rounding in margin / spacing.
  const Dims& dims = mask.geometry().dims();
  auto reach = [&](double s) { return static_cast<std::int64_t>(std::floor(margin.margin_mm / s)) + 1; };
  const std::int64_t pad[3] = {reach(spacing.x), reach(spacing.y), reach(spacing.z)};
  const BoundingBox region = detail::pad_box(*box, pad, dims);
  const Dims sub = detail::box_dims(region);

  std::vector<std::uint8_t> inside(sub.voxel_count());
  const double limit = margin.margin_mm * margin.margin_mm;
  detail::squared_edt_slices(detail::crop(mask.bits(), dims, region), sub, spacing, 1,
                             [&](std::size_t z, std::span<const double> slice) {
                               simd::kernels().less_equal(slice.data(), slice.size(), limit,
                                                          inside.data() + z * slice.size());
                             });

  std::vector<std::uint8_t> bits(mask.geometry().voxel_count(), 0);
  detail::paste(inside, region, bits, dims);
  return BinaryMask(mask.geometry(), std::move(bits));
}

BinaryMask build_ptv(std::span<const PtvPart> parts, const Spacing& spacing) {
  if (parts.empty()) throw Error(ErrorKind::EmptyInput, "PTV needs at least one CTV part");
  const Geometry& geometry = parts.front().ctv.geometry();
  std::vector<std::uint8_t> bits(geometry.voxel_count(), 0);
  for (const PtvPart& part : parts) {
    require_compatible(geometry, part.ctv.geometry(), "PTV parts");
    if (part.ctv.empty()) continue;
    const BinaryMask grown = expand_margin(part.ctv, part.margin, spacing);
    simd::kernels().mask_or(bits.data(), grown.bits().data(), bits.data(), bits.size());
  }
  return BinaryMask(geometry, std::move(bits));
}

}  // namespace voxmetric
