#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace voxmetric {

struct Dims {
  std::size_t nx = 1;
  std::size_t ny = 1;
  std::size_t nz = 1;

  std::size_t voxel_count() const noexcept { return nx * ny * nz; }
  bool operator==(const Dims&) const = default;
};

/// Millimetres per voxel along each axis.
struct Spacing {
  double x = 1.0;
  double y = 1.0;
  double z = 1.0;

  std::array<double, 3> as_array() const noexcept { return {x, y, z}; }
  bool operator==(const Spacing&) const = default;
};

struct Index3 {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;

  bool operator==(const Index3&) const = default;
};

inline constexpr double kSpacingTolerance = 1e-6;

/// Grid shape plus voxel size. Voxels are stored x fastest, then y, then z.
class Geometry {
 public:
  /// Throws InvalidArgument unless every dim >= 1 and every spacing > 0.
  Geometry(Dims dims, Spacing spacing);

  const Dims& dims() const noexcept { return dims_; }
  const Spacing& spacing() const noexcept { return spacing_; }
  std::size_t voxel_count() const noexcept { return dims_.voxel_count(); }

  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return (z * dims_.ny + y) * dims_.nx + x;
  }
  Index3 coordinates(std::size_t linear) const noexcept {
    const std::size_t plane = dims_.nx * dims_.ny;
    return {static_cast<std::int64_t>(linear % dims_.nx),
            static_cast<std::int64_t>((linear % plane) / dims_.nx),
            static_cast<std::int64_t>(linear / plane)};
  }

  /// Equal dims and spacing within kSpacingTolerance mm.
  bool compatible_with(const Geometry& other) const noexcept;

  bool operator==(const Geometry&) const = default;

 private:
  Dims dims_;
  Spacing spacing_;
};

/// Throws GeometryMismatch naming `what` when the grids differ.
void require_compatible(const Geometry& a, const Geometry& b, const char* what);

}  // namespace voxmetric
