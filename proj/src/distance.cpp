#include "voxmetric/distance.hpp"

#include <algorithm>
#include <limits>

#include "grid_ops.hpp"
#include "voxmetric/error.hpp"
#include "voxmetric/parallel.hpp"
#include "voxmetric/simd.hpp"

namespace voxmetric {
namespace detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lines gathered together for the strided passes; one cache line of doubles
// per row read keeps the gathers from thrashing.
constexpr std::size_t kBlock = 8;

struct LineScratch {
  std::vector<std::size_t> sites;
  std::vector<double> bounds;
  std::vector<double> in;
  std::vector<double> out;

  explicit LineScratch(std::size_t n) : sites(n), bounds(n + 1), in(n * kBlock), out(n) {}
};

// Lower envelope of the parabolas f[q] + w2 * (p - q)^2 over the finite f[q],
// evaluated at every integer p. Returns false when every input is infinite.
bool envelope_1d(const double* f, double* out, std::size_t n, double w2, LineScratch& s) {
  std::size_t* v = s.sites.data();
  double* z = s.bounds.data();
  std::ptrdiff_t k = -1;
  for (std::size_t q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double boundary;
    while (true) {
      const std::size_t r = v[k];
      const double gap = static_cast<double>(q - r);
      boundary = 0.5 * static_cast<double>(q + r) + (f[q] - f[r]) / (2.0 * w2 * gap);
      if (boundary <= z[k]) {
        --k;  // z[0] is -inf, so k never drops below 0 here
        continue;
      }
      break;
    }
    ++k;
    v[k] = q;
    z[k] = boundary;
    z[k + 1] = kInf;
  }
  if (k < 0) return false;
  std::size_t j = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const double pos = static_cast<double>(p);
    while (z[j + 1] < pos) ++j;
    const double d = pos - static_cast<double>(v[j]);
    out[p] = w2 * d * d + f[v[j]];
  }
  return true;
}

// Transforms the lines grid[base + i * stride], i < n, for `count` consecutive
// bases starting at first_base (unit apart).
void strided_pass(double* grid, std::size_t first_base, std::size_t count, std::size_t n,
                  std::size_t stride, double w2, LineScratch& s) {
  for (std::size_t b0 = 0; b0 < count; b0 += kBlock) {
    const std::size_t width = std::min(kBlock, count - b0);
    double* origin = grid + first_base + b0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = origin + i * stride;
      for (std::size_t b = 0; b < width; ++b) s.in[b * n + i] = row[b];
    }
    for (std::size_t b = 0; b < width; ++b) {
      if (!envelope_1d(s.in.data() + b * n, s.out.data(), n, w2, s)) continue;
      for (std::size_t i = 0; i < n; ++i) origin[i * stride + b] = s.out[i];
    }
  }
}

}  // namespace

BoundingBox pad_box(const BoundingBox& box, const std::int64_t pad[3], const Dims& dims) {
  const std::int64_t hi[3] = {static_cast<std::int64_t>(dims.nx) - 1,
                              static_cast<std::int64_t>(dims.ny) - 1,
                              static_cast<std::int64_t>(dims.nz) - 1};
  return {{std::max<std::int64_t>(0, box.min.x - pad[0]), std::max<std::int64_t>(0, box.min.y - pad[1]),
           std::max<std::int64_t>(0, box.min.z - pad[2])},
          {std::min(hi[0], box.max.x + pad[0]), std::min(hi[1], box.max.y + pad[1]),
           std::min(hi[2], box.max.z + pad[2])}};
}

BoundingBox union_box(const BoundingBox& a, const BoundingBox& b) {
  return {{std::min(a.min.x, b.min.x), std::min(a.min.y, b.min.y), std::min(a.min.z, b.min.z)},
          {std::max(a.max.x, b.max.x), std::max(a.max.y, b.max.y), std::max(a.max.z, b.max.z)}};
}

Dims box_dims(const BoundingBox& box) {
  return {static_cast<std::size_t>(box.max.x - box.min.x + 1),
          static_cast<std::size_t>(box.max.y - box.min.y + 1),
          static_cast<std::size_t>(box.max.z - box.min.z + 1)};
}

std::vector<std::uint8_t> crop(std::span<const std::uint8_t> bits, const Dims& dims,
                               const BoundingBox& box) {
  const Dims sub = box_dims(box);
  std::vector<std::uint8_t> out(sub.voxel_count());
  for (std::size_t z = 0; z < sub.nz; ++z)
    for (std::size_t y = 0; y < sub.ny; ++y) {
      const std::size_t src = ((z + box.min.z) * dims.ny + (y + box.min.y)) * dims.nx + box.min.x;
      std::copy_n(bits.data() + src, sub.nx, out.data() + (z * sub.ny + y) * sub.nx);
    }
  return out;
}

void paste(std::span<const std::uint8_t> sub_bits, const BoundingBox& box, std::span<std::uint8_t> full,
           const Dims& dims) {
  const Dims sub = box_dims(box);
  for (std::size_t z = 0; z < sub.nz; ++z)
    for (std::size_t y = 0; y < sub.ny; ++y) {
      const std::size_t dst = ((z + box.min.z) * dims.ny + (y + box.min.y)) * dims.nx + box.min.x;
      std::copy_n(sub_bits.data() + (z * sub.ny + y) * sub.nx, sub.nx, full.data() + dst);
    }
}

std::vector<std::uint8_t> surface_bits(std::span<const std::uint8_t> bits, const Dims& d) {
  std::vector<std::uint8_t> out(bits.size());
  const auto& k = simd::kernels();
  const std::size_t plane = d.nx * d.ny;
  for (std::size_t z = 0; z < d.nz; ++z)
    for (std::size_t y = 0; y < d.ny; ++y) {
      const std::size_t at = (z * d.ny + y) * d.nx;
      const std::uint8_t* row = bits.data() + at;
      k.surface_row(row, y > 0 ? row - d.nx : nullptr, y + 1 < d.ny ? row + d.nx : nullptr,
                    z > 0 ? row - plane : nullptr, z + 1 < d.nz ? row + plane : nullptr, d.nx,
                    out.data() + at);
    }
  return out;
}

void squared_edt_slices(std::span<const std::uint8_t> seeds, const Dims& d, const Spacing& spacing,
                        unsigned threads, const SliceSink& sink) {
  if (d.nz >= simd::kColumnLimit)
    throw Error(ErrorKind::InvalidArgument, "distance transform supports at most 65534 slices");
  const std::size_t plane = d.nx * d.ny;
  const auto& k = simd::kernels();

  // z first, as whole-row sweeps over a compact step count per voxel.
  std::vector<std::uint16_t> steps(seeds.size());
  parallel_for(d.ny, threads, [&](std::size_t y) {
    const std::size_t row = y * d.nx;
    k.column_seed(seeds.data() + row, d.nx, steps.data() + row);
    for (std::size_t z = 1; z < d.nz; ++z) {
      std::uint16_t* cur = steps.data() + z * plane + row;
      k.column_seed(seeds.data() + z * plane + row, d.nx, cur);
      k.column_relax(cur, cur - plane, d.nx);
    }
    for (std::size_t z = d.nz - 1; z-- > 0;) {
      std::uint16_t* cur = steps.data() + z * plane + row;
      k.column_relax(cur, cur + plane, d.nx);
    }
  });

  // Then y and x inside each slice, which never needs more than one slice of doubles.
  const double wx = spacing.x * spacing.x;
  const double wy = spacing.y * spacing.y;
  const double wz = spacing.z * spacing.z;
  parallel_for(d.nz, threads, [&](std::size_t z) {
    std::vector<double> slice(plane);
    k.column_squared(steps.data() + z * plane, plane, wz, slice.data());
    if (d.ny > 1) {
      LineScratch s(d.ny);
      strided_pass(slice.data(), 0, d.nx, d.ny, d.nx, wy, s);
    }
    LineScratch s(d.nx);
    for (std::size_t y = 0; y < d.ny; ++y) {
      double* line = slice.data() + y * d.nx;
      std::copy_n(line, d.nx, s.in.data());
      if (envelope_1d(s.in.data(), s.out.data(), d.nx, wx, s)) std::copy_n(s.out.data(), d.nx, line);
    }
    sink(z, slice);
  });
}

}  // namespace detail

DistanceField::DistanceField(Geometry geometry, std::vector<double> squared_mm)
    : geometry_(geometry), squared_(std::move(squared_mm)) {
  if (squared_.size() != geometry_.voxel_count())
    throw Error(ErrorKind::InvalidArgument, "distance buffer length does not match the grid");
}

BinaryMask surface_voxels(const BinaryMask& mask) {
  return BinaryMask(mask.geometry(), detail::surface_bits(mask.bits(), mask.geometry().dims()));
}

DistanceField edt(const BinaryMask& seeds, const Spacing& spacing, const EdtOptions& options) {
  if (seeds.empty()) throw Error(ErrorKind::EmptySeeds, "distance transform needs at least one seed");
  const Geometry geometry(seeds.geometry().dims(), spacing);
  const Dims& d = geometry.dims();
  std::vector<double> squared(geometry.voxel_count());
  detail::squared_edt_slices(seeds.bits(), d, spacing, effective_workers(options.threads),
                             [&](std::size_t z, std::span<const double> slice) {
                               std::copy(slice.begin(), slice.end(), squared.begin() + z * slice.size());
                             });
  return DistanceField(geometry, std::move(squared));
}

namespace {

SurfaceDistances compute_surface_distances(const BinaryMask& a, const BinaryMask& b,
                                           const Spacing& spacing, unsigned requested_threads,
                                           bool both_directions) {
  require_compatible(a.geometry(), b.geometry(), "surface distance masks");
  const auto box_a = bounding_box(a);
  const auto box_b = bounding_box(b);
  if (!box_a || !box_b) throw Error(ErrorKind::EmptyMask, "surface distances need two non-empty masks");

  // Every seed lies inside the union box, so the transform restricted to it is
  // exact there. The one-voxel pad keeps real background around the surfaces.
  const Dims& full = a.geometry().dims();
  const std::int64_t pad[3] = {1, 1, 1};
  const BoundingBox box = detail::pad_box(detail::union_box(*box_a, *box_b), pad, full);
  const Dims sub = detail::box_dims(box);
  const unsigned threads = effective_workers(requested_threads);

  const auto surf_a = detail::surface_bits(detail::crop(a.bits(), full, box), sub);
  const auto surf_b = detail::surface_bits(detail::crop(b.bits(), full, box), sub);

  auto directed = [&](const std::vector<std::uint8_t>& from, const std::vector<std::uint8_t>& to) {
    // Only the distances at `from` surface voxels are kept, slice by slice.
    std::vector<std::vector<double>> per_slice(sub.nz);
    detail::squared_edt_slices(to, sub, spacing, threads, [&](std::size_t z, std::span<const double> slice) {
      const std::uint8_t* marks = from.data() + z * slice.size();
      for (std::size_t i = 0; i < slice.size(); ++i)
        if (marks[i]) per_slice[z].push_back(std::sqrt(slice[i]));
    });
    std::vector<double> out;
    for (auto& v : per_slice) out.insert(out.end(), v.begin(), v.end());
    std::sort(out.begin(), out.end());
    return out;
  };
  SurfaceDistances result;
  result.a_to_b = directed(surf_a, surf_b);
  if (both_directions) result.b_to_a = directed(surf_b, surf_a);
  return result;
}

}  // namespace

SurfaceDistances surface_distances(const BinaryMask& a, const BinaryMask& b, const Spacing& spacing,
                                   const EdtOptions& options) {
  return compute_surface_distances(a, b, spacing, options.threads, true);
}

std::vector<double> directed_surface_distances(const BinaryMask& from, const BinaryMask& to,
                                               const Spacing& spacing) {
  return compute_surface_distances(from, to, spacing, 1, false).a_to_b;
}

}  // namespace voxmetric
