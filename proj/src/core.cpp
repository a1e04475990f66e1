#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "voxmetric/error.hpp"
#include "voxmetric/geometry.hpp"
#include "voxmetric/simd.hpp"
#include "voxmetric/volume.hpp"

namespace voxmetric {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnsupportedDatatype: return "UnsupportedDatatype";
    case ErrorKind::UnsupportedDimensionality: return "UnsupportedDimensionality";
    case ErrorKind::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorKind::MalformedFile: return "MalformedFile";
    case ErrorKind::MissingArtifact: return "MissingArtifact";
    case ErrorKind::WriteError: return "WriteError";
    case ErrorKind::GeometryMismatch: return "GeometryMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EmptySeeds: return "EmptySeeds";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::EmptyForeground: return "EmptyForeground";
    case ErrorKind::DegenerateStats: return "DegenerateStats";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::UndefinedMetric: return "UndefinedMetric";
    case ErrorKind::SpecInfeasible: return "SpecInfeasible";
    case ErrorKind::ManifestError: return "ManifestError";
    case ErrorKind::InvalidFoldCount: return "InvalidFoldCount";
    case ErrorKind::EvaluationFailed: return "EvaluationFailed";
  }
  return "Unknown";
}

Geometry::Geometry(Dims dims, Spacing spacing) : dims_(dims), spacing_(spacing) {
  if (dims.nx < 1 || dims.ny < 1 || dims.nz < 1)
    throw Error(ErrorKind::InvalidArgument, "grid dimensions must be >= 1");
  for (double s : spacing.as_array())
    if (!(s > 0.0) || !std::isfinite(s))
      throw Error(ErrorKind::InvalidArgument, "voxel spacing must be positive and finite");
}

bool Geometry::compatible_with(const Geometry& other) const noexcept {
  return dims_ == other.dims_ && std::abs(spacing_.x - other.spacing_.x) <= kSpacingTolerance &&
         std::abs(spacing_.y - other.spacing_.y) <= kSpacingTolerance &&
         std::abs(spacing_.z - other.spacing_.z) <= kSpacingTolerance;
}

void require_compatible(const Geometry& a, const Geometry& b, const char* what) {
  if (!a.compatible_with(b)) throw Error(ErrorKind::GeometryMismatch, what);
}

Volume::Volume(Geometry geometry, VoxelStorage values, IntensityUnit unit)
    : geometry_(geometry), values_(std::move(values)), unit_(unit) {
  const std::size_t length = std::visit([](const auto& v) { return v.size(); }, values_);
  if (length != geometry_.voxel_count())
    throw Error(ErrorKind::InvalidArgument,
                "voxel buffer holds " + std::to_string(length) + " values, grid needs " +
                    std::to_string(geometry_.voxel_count()));
  if (unit_ == IntensityUnit::HU && kind() == ElementKind::UInt8)
    throw Error(ErrorKind::InvalidArgument, "HU volumes need int16 or float32 storage");
}

double Volume::at(std::size_t linear) const {
  return std::visit([linear](const auto& v) { return static_cast<double>(v[linear]); }, values_);
}

BinaryMask::BinaryMask(Geometry geometry)
    : geometry_(geometry), bits_(geometry.voxel_count(), 0) {}

BinaryMask::BinaryMask(Geometry geometry, std::vector<std::uint8_t> bits)
    : geometry_(geometry), bits_(std::move(bits)) {
  if (bits_.size() != geometry_.voxel_count())
    throw Error(ErrorKind::InvalidArgument, "mask buffer length does not match the grid");
  for (auto& b : bits_) b = b != 0;
}

std::size_t BinaryMask::voxel_count() const {
  return simd::kernels().count_nonzero(bits_.data(), bits_.size());
}

BinaryMask threshold_to_mask(const Volume& volume, double threshold) {
  std::vector<std::uint8_t> bits(volume.geometry().voxel_count());
  const auto& k = simd::kernels();
  switch (volume.kind()) {
    case ElementKind::UInt8: {
      auto v = volume.values<std::uint8_t>();
      k.threshold_u8(v.data(), v.size(), threshold, bits.data());
      break;
    }
    case ElementKind::Int16: {
      auto v = volume.values<std::int16_t>();
      k.threshold_i16(v.data(), v.size(), threshold, bits.data());
      break;
    }
    case ElementKind::Float32: {
      auto v = volume.values<float>();
      k.threshold_f32(v.data(), v.size(), threshold, bits.data());
      break;
    }
  }
  return BinaryMask(volume.geometry(), std::move(bits));
}

std::optional<BoundingBox> bounding_box(const BinaryMask& mask) {
  const Dims& d = mask.geometry().dims();
  const auto bits = mask.bits();
  constexpr auto big = std::numeric_limits<std::int64_t>::max();
  BoundingBox box{{big, big, big}, {-1, -1, -1}};
  for (std::size_t z = 0; z < d.nz; ++z) {
    for (std::size_t y = 0; y < d.ny; ++y) {
      const std::uint8_t* row = bits.data() + (z * d.ny + y) * d.nx;
      const std::uint8_t* first = std::find(row, row + d.nx, std::uint8_t{1});
      if (first == row + d.nx) continue;
      std::size_t last = d.nx - 1;
      while (!row[last]) --last;
      const auto x0 = static_cast<std::int64_t>(first - row);
      const auto x1 = static_cast<std::int64_t>(last);
      const auto yy = static_cast<std::int64_t>(y);
      const auto zz = static_cast<std::int64_t>(z);
      box.min = {std::min(box.min.x, x0), std::min(box.min.y, yy), std::min(box.min.z, zz)};
      box.max = {std::max(box.max.x, x1), std::max(box.max.y, yy), std::max(box.max.z, zz)};
    }
  }
  if (box.max.x < 0) return std::nullopt;
  return box;
}

}  // namespace voxmetric
