#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "voxmetric/geometry.hpp"

namespace voxmetric {

enum class ElementKind { UInt8, Int16, Float32 };
enum class IntensityUnit { HU, Normalized, Display8Bit };

using VoxelStorage =
    std::variant<std::vector<std::uint8_t>, std::vector<std::int16_t>, std::vector<float>>;

/// Dense scalar grid. Immutable after construction.
class Volume {
 public:
  /// Throws InvalidArgument if the storage length does not match the grid,
  /// or if HU is paired with 8-bit storage.
  Volume(Geometry geometry, VoxelStorage values, IntensityUnit unit);

  const Geometry& geometry() const noexcept { return geometry_; }
  IntensityUnit unit() const noexcept { return unit_; }
  ElementKind kind() const noexcept { return static_cast<ElementKind>(values_.index()); }
  const VoxelStorage& storage() const noexcept { return values_; }

  template <typename T>
  std::span<const T> values() const {
    return std::get<std::vector<T>>(values_);
  }

  /// Voxel value widened to double, for code that does not care about storage.
  double at(std::size_t linear) const;

  bool operator==(const Volume&) const = default;

 private:
  Geometry geometry_;
  VoxelStorage values_;
  IntensityUnit unit_;
};

/// Dense boolean grid stored one byte per voxel (0 or 1).
class BinaryMask {
 public:
  /// Empty (all false) mask.
  explicit BinaryMask(Geometry geometry);
  /// Any non-zero byte is taken as true; stored bits are normalized to 0/1.
  BinaryMask(Geometry geometry, std::vector<std::uint8_t> bits);

  const Geometry& geometry() const noexcept { return geometry_; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  bool test(std::size_t linear) const noexcept { return bits_[linear] != 0; }
  bool test(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return bits_[geometry_.index(x, y, z)] != 0;
  }

  std::size_t voxel_count() const;
  bool empty() const { return voxel_count() == 0; }

  /// Releases the storage; used by pipelines that build a new mask from an old one.
  std::vector<std::uint8_t> take_bits() && { return std::move(bits_); }

  bool operator==(const BinaryMask&) const = default;

 private:
  Geometry geometry_;
  std::vector<std::uint8_t> bits_;
};

/// Inclusive voxel-index box.
struct BoundingBox {
  Index3 min;
  Index3 max;

  bool contains(const Index3& p) const noexcept {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
           p.z <= max.z;
  }
  bool operator==(const BoundingBox&) const = default;
};

/// Bit set iff value > threshold.
BinaryMask threshold_to_mask(const Volume& volume, double threshold);

/// Tight box over the true bits; nullopt for an empty mask.
std::optional<BoundingBox> bounding_box(const BinaryMask& mask);

}  // namespace voxmetric
