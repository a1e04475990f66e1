#include "voxmetric/phantom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "grid_ops.hpp"
#include "voxmetric/error.hpp"
#include "voxmetric/mask_algebra.hpp"

namespace voxmetric {
namespace {

using Vec3 = std::array<double, 3>;

class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  double uniform(const MmRange& r) { return uniform(r.lo, r.hi); }
  /// Integer in [0, n). Modulo bias is irrelevant at these sizes.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

[[noreturn]] void infeasible(const std::string& what) {
  throw Error(ErrorKind::SpecInfeasible, what);
}

// Elliptic cylinder along z standing in for the body outline.
struct Body {
  double cx, cy, ax, ay;

  bool contains(double x, double y, double shrink) const {
    const double rx = ax - shrink;
    const double ry = ay - shrink;
    if (rx <= 0.0 || ry <= 0.0) return false;
    const double u = (x - cx) / rx;
    const double v = (y - cy) / ry;
    return u * u + v * v <= 1.0;
  }
};

class Canvas {
 public:
  explicit Canvas(const Geometry& g) : g_(g), sp_(g.spacing()) {}

  // Calls fn(linear) for voxel centres within the axis-aligned ellipsoid.
  template <typename Fn>
  void ellipsoid(const Vec3& c, const Vec3& r, Fn&& fn) const {
    const auto [x0, x1] = span(c[0], r[0], sp_.x, g_.dims().nx);
    const auto [y0, y1] = span(c[1], r[1], sp_.y, g_.dims().ny);
    const auto [z0, z1] = span(c[2], r[2], sp_.z, g_.dims().nz);
    for (std::size_t z = z0; z < z1; ++z)
      for (std::size_t y = y0; y < y1; ++y)
        for (std::size_t x = x0; x < x1; ++x) {
          const double u = (x * sp_.x - c[0]) / r[0];
          const double v = (y * sp_.y - c[1]) / r[1];
          const double w = (z * sp_.z - c[2]) / r[2];
          if (u * u + v * v + w * w <= 1.0) fn(g_.index(x, y, z));
        }
  }

  // Circular cylinder along z between z_lo and z_hi (mm).
  template <typename Fn>
  void tube(double cx, double cy, double radius, double z_lo, double z_hi, Fn&& fn) const {
    const auto [x0, x1] = span(cx, radius, sp_.x, g_.dims().nx);
    const auto [y0, y1] = span(cy, radius, sp_.y, g_.dims().ny);
    const double half = 0.5 * (z_hi - z_lo);
    const auto [z0, z1] = span(z_lo + half, half, sp_.z, g_.dims().nz);
    for (std::size_t z = z0; z < z1; ++z)
      for (std::size_t y = y0; y < y1; ++y)
        for (std::size_t x = x0; x < x1; ++x) {
          const double u = x * sp_.x - cx;
          const double v = y * sp_.y - cy;
          if (u * u + v * v <= radius * radius) fn(g_.index(x, y, z));
        }
  }

 private:
  static std::pair<std::size_t, std::size_t> span(double c, double r, double s, std::size_t n) {
    const double lo = std::ceil((c - r) / s);
    const double hi = std::floor((c + r) / s);
    const auto first = static_cast<std::size_t>(std::clamp(lo, 0.0, static_cast<double>(n)));
    const auto last = static_cast<std::size_t>(std::clamp(hi + 1.0, 0.0, static_cast<double>(n)));
    return {first, std::max(first, last)};
  }

  const Geometry& g_;
  Spacing sp_;
};

void check_range(const MmRange& r, const char* name) {
  if (!(r.lo > 0.0) || !(r.hi >= r.lo)) throw Error(ErrorKind::InvalidArgument, std::string(name) + " range is invalid");
}

// Rejection-samples an (x, y) inside the body shrunk by `shrink`.
std::pair<double, double> sample_in_body(Random& rng, const Body& body, double shrink,
                                         const char* what) {
  if (!body.contains(body.cx, body.cy, shrink))
    infeasible(std::string(what) + " does not fit inside the body outline");
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double x = rng.uniform(body.cx - body.ax, body.cx + body.ax);
    const double y = rng.uniform(body.cy - body.ay, body.cy + body.ay);
    if (body.contains(x, y, shrink)) return {x, y};
  }
  infeasible(std::string(what) + ": placement failed");
}

// Pulls (x, y) radially toward the body axis until it lies inside the shrunk outline.
void pull_inside(const Body& body, double shrink, double& x, double& y) {
  const double rx = body.ax - shrink;
  const double ry = body.ay - shrink;
  const double u = (x - body.cx) / rx;
  const double v = (y - body.cy) / ry;
  const double rho = std::sqrt(u * u + v * v);
  if (rho <= 1.0) return;
  const double scale = 0.999 / rho;
  x = body.cx + (x - body.cx) * scale;
  y = body.cy + (y - body.cy) * scale;
}

}  // namespace

PhantomCase generate_phantom(const PhantomSpec& spec) {
  if (spec.bone_tubes < 0 || spec.bone_blocks < 0 || spec.spleen_count < 0 ||
      spec.lymph_chains < 0 || spec.nodes_per_chain < 0 || !(spec.noise_hu >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "phantom counts and noise must be non-negative");
  check_range(spec.tube_radius_mm, "tube radius");
  check_range(spec.block_radius_mm, "block radius");
  check_range(spec.spleen_radius_mm, "spleen radius");
  check_range(spec.node_diameter_mm, "node diameter");

  const Geometry& g = spec.geometry;
  const Spacing& sp = g.spacing();
  const Dims& d = g.dims();
  const double lx = (d.nx - 1) * sp.x;
  const double ly = (d.ny - 1) * sp.y;
  const double lz = (d.nz - 1) * sp.z;
  const Body body{0.5 * lx, 0.5 * ly, 0.45 * lx, 0.42 * ly};
  const Canvas canvas(g);
  Random rng(spec.seed);

  auto require_depth = [&](double radius, const char* what) {
    if (2.0 * radius > lz) infeasible(std::string(what) + " is taller than the grid");
  };

  const std::size_t n = g.voxel_count();
  std::vector<std::uint8_t> in_body(n, 0), tubes(n, 0), blocks(n, 0), spleen(n, 0), nodes(n, 0);
  for (std::size_t z = 0; z < d.nz; ++z)
    for (std::size_t y = 0; y < d.ny; ++y)
      for (std::size_t x = 0; x < d.nx; ++x)
        in_body[g.index(x, y, z)] = body.contains(x * sp.x, y * sp.y, 0.0);

  for (int i = 0; i < spec.bone_tubes; ++i) {
    const double r = rng.uniform(spec.tube_radius_mm);
    const auto [cx, cy] = sample_in_body(rng, body, spec.tube_radius_mm.hi + sp.x, "bone tube");
    const double z_lo = rng.uniform(0.0, 0.3 * lz);
    const double z_hi = rng.uniform(0.7 * lz, lz);
    canvas.tube(cx, cy, r, z_lo, z_hi, [&](std::size_t v) { tubes[v] = 1; });
  }
  for (int i = 0; i < spec.bone_blocks; ++i) {
    const Vec3 r{rng.uniform(spec.block_radius_mm), rng.uniform(spec.block_radius_mm),
                 rng.uniform(spec.block_radius_mm)};
    require_depth(spec.block_radius_mm.hi, "bone block");
    const auto [cx, cy] = sample_in_body(rng, body, spec.block_radius_mm.hi, "bone block");
    const double cz = rng.uniform(spec.block_radius_mm.hi, lz - spec.block_radius_mm.hi);
    canvas.ellipsoid({cx, cy, cz}, r, [&](std::size_t v) { blocks[v] = 1; });
  }
  for (int i = 0; i < spec.spleen_count; ++i) {
    const Vec3 r{rng.uniform(spec.spleen_radius_mm), rng.uniform(spec.spleen_radius_mm),
                 rng.uniform(spec.spleen_radius_mm)};
    require_depth(spec.spleen_radius_mm.hi, "spleen");
    const auto [cx, cy] = sample_in_body(rng, body, spec.spleen_radius_mm.hi, "spleen");
    const double cz = rng.uniform(spec.spleen_radius_mm.hi, lz - spec.spleen_radius_mm.hi);
    canvas.ellipsoid({cx, cy, cz}, r, [&](std::size_t v) { spleen[v] = 1; });
  }
  const double node_r_max = 0.5 * spec.node_diameter_mm.hi;
  for (int chain = 0; chain < spec.lymph_chains && spec.nodes_per_chain > 0; ++chain) {
    require_depth(node_r_max, "lymph node");
    auto [x, y] = sample_in_body(rng, body, node_r_max, "lymph node");
    double z = rng.uniform(node_r_max, lz - node_r_max);
    double direction = rng.unit() < 0.5 ? -1.0 : 1.0;
    double previous = 0.0;
    for (int k = 0; k < spec.nodes_per_chain; ++k) {
      const double diameter = rng.uniform(spec.node_diameter_mm);
      if (k > 0) {
        const double step = 0.5 * (previous + diameter) + rng.uniform(2.0, 8.0);
        x += rng.uniform(-0.3, 0.3) * step;
        y += rng.uniform(-0.3, 0.3) * step;
        if (z + direction * step > lz - node_r_max || z + direction * step < node_r_max)
          direction = -direction;
        z = std::clamp(z + direction * step, node_r_max, lz - node_r_max);
        pull_inside(body, node_r_max, x, y);
      }
      const double r = 0.5 * diameter;
      canvas.ellipsoid({x, y, z}, {r, r, r}, [&](std::size_t v) { nodes[v] = 1; });
      previous = diameter;
    }
  }

  std::vector<std::int16_t> ct(n);
  const auto noise = static_cast<std::int64_t>(std::floor(spec.noise_hu));
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t hu = kAirHu;
    if (in_body[i]) hu = kSoftTissueHu;
    if (spleen[i]) hu = kSpleenHu;
    if (nodes[i]) hu = kLymphNodeHu;
    if (tubes[i] || blocks[i]) hu = kBoneHu;
    if (noise > 0) hu += static_cast<std::int64_t>(rng.below(2 * noise + 1)) - noise;
    ct[i] = static_cast<std::int16_t>(std::clamp<std::int64_t>(hu, -32768, 32767));
  }

  std::vector<std::uint8_t> marrow(n);
  for (std::size_t i = 0; i < n; ++i) marrow[i] = tubes[i] | blocks[i];

  BinaryMask ctv_bm(g, std::move(marrow));
  BinaryMask ctv_spleen(g, std::move(spleen));
  BinaryMask ctv_ln(g, std::move(nodes));
  const std::array<PtvPart, 3> parts{PtvPart{ctv_bm, {kBoneMarrowMarginMm}},
                                     PtvPart{ctv_spleen, {kSpleenMarginMm}},
                                     PtvPart{ctv_ln, {kLymphNodeMarginMm}}};
  BinaryMask ptv = build_ptv(parts, sp);
  return PhantomCase{Volume(g, std::move(ct), IntensityUnit::HU),
                     std::move(ctv_bm),
                     std::move(ctv_spleen),
                     std::move(ctv_ln),
                     BinaryMask(g, std::move(tubes)),
                     std::move(ptv)};
}

namespace {

// Smooth random displacement: uniform values on a coarse lattice, trilinearly
// interpolated at voxel centres. Bounded by the lattice extremes.
class DisplacementField {
 public:
  static constexpr double kCellMm = 12.0;

  DisplacementField(const Geometry& g, double amplitude, Random& rng) : sp_(g.spacing()) {
    const Dims& d = g.dims();
    n_[0] = static_cast<std::size_t>(std::ceil((d.nx - 1) * sp_.x / kCellMm)) + 2;
    n_[1] = static_cast<std::size_t>(std::ceil((d.ny - 1) * sp_.y / kCellMm)) + 2;
    n_[2] = static_cast<std::size_t>(std::ceil((d.nz - 1) * sp_.z / kCellMm)) + 2;
    values_.resize(n_[0] * n_[1] * n_[2]);
    for (double& v : values_) v = rng.uniform(-amplitude, amplitude);
  }

  double at(std::size_t x, std::size_t y, std::size_t z) const {
    const double p[3] = {x * sp_.x / kCellMm, y * sp_.y / kCellMm, z * sp_.z / kCellMm};
    std::size_t i[3];
    double f[3];
    for (int a = 0; a < 3; ++a) {
      i[a] = std::min(static_cast<std::size_t>(p[a]), n_[a] - 2);
      f[a] = p[a] - static_cast<double>(i[a]);
    }
    double acc = 0.0;
    for (int corner = 0; corner < 8; ++corner) {
      double w = 1.0;
      std::size_t idx[3];
      for (int a = 0; a < 3; ++a) {
        const bool up = (corner >> a) & 1;
        idx[a] = i[a] + up;
        w *= up ? f[a] : 1.0 - f[a];
      }
      acc += w * values_[(idx[2] * n_[1] + idx[1]) * n_[0] + idx[0]];
    }
    return acc;
  }

 private:
  Spacing sp_;
  std::size_t n_[3];
  std::vector<double> values_;
};

// 6-connected component labels (0 = background); returns the component count.
std::size_t label_components(std::span<const std::uint8_t> bits, const Dims& d,
                             std::vector<std::uint32_t>& labels) {
  labels.assign(bits.size(), 0);
  std::uint32_t next = 0;
  std::vector<std::size_t> stack;
  const std::size_t plane = d.nx * d.ny;
  for (std::size_t start = 0; start < bits.size(); ++start) {
    if (!bits[start] || labels[start]) continue;
    labels[start] = ++next;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      const std::size_t x = v % d.nx;
      const std::size_t y = (v / d.nx) % d.ny;
      const std::size_t z = v / plane;
      auto visit = [&](std::size_t u) {
        if (bits[u] && !labels[u]) {
          labels[u] = next;
          stack.push_back(u);
        }
      };
      if (x > 0) visit(v - 1);
      if (x + 1 < d.nx) visit(v + 1);
      if (y > 0) visit(v - d.nx);
      if (y + 1 < d.ny) visit(v + d.nx);
      if (z > 0) visit(v - plane);
      if (z + 1 < d.nz) visit(v + plane);
    }
  }
  return next;
}

}  // namespace

BinaryMask perturb_mask(const BinaryMask& mask, const Spacing& spacing, double boundary_noise_mm,
                        double drop_fraction, std::uint64_t seed) {
  if (!(boundary_noise_mm >= 0.0) || !std::isfinite(boundary_noise_mm))
    throw Error(ErrorKind::InvalidArgument, "boundary noise must be a finite non-negative length");
  if (!(drop_fraction >= 0.0 && drop_fraction < 1.0))
    throw Error(ErrorKind::InvalidArgument, "drop fraction must lie in [0, 1)");
  if (mask.empty()) throw Error(ErrorKind::EmptyMask, "cannot perturb an empty mask");

  const Geometry& g = mask.geometry();
  const Dims& dims = g.dims();
  std::vector<std::uint8_t> bits(mask.bits().begin(), mask.bits().end());

  if (boundary_noise_mm > 0.0) {
    Random rng(seed);
    const Geometry field_geometry(dims, spacing);
    const DisplacementField field(field_geometry, boundary_noise_mm, rng);
    // The boundary sits half a voxel out from the outermost centres, so a
    // displacement must exceed half the finest spacing to flip a voxel.
    const double half_voxel = 0.5 * std::min({spacing.x, spacing.y, spacing.z});
    const double reach = boundary_noise_mm + half_voxel;
    auto pad_for = [&](double s) { return static_cast<std::int64_t>(std::ceil(reach / s)) + 1; };
    const std::int64_t pad[3] = {pad_for(spacing.x), pad_for(spacing.y), pad_for(spacing.z)};
    const BoundingBox box = detail::pad_box(*bounding_box(mask), pad, dims);
    const Dims sub = detail::box_dims(box);

    const auto inside = detail::crop(bits, dims, box);
    std::vector<std::uint8_t> outside(inside.size());
    for (std::size_t i = 0; i < inside.size(); ++i) outside[i] = inside[i] ^ 1u;
    // Outside voxels only need the distance to the mask, inside ones only the
    // distance to the background, so each pass fills its own half.
    std::vector<std::uint8_t> result(inside.size());
    const std::size_t plane = sub.nx * sub.ny;
    auto decide = [&](bool want_inside) {
      return [&, want_inside](std::size_t z, std::span<const double> squared) {
        for (std::size_t y = 0; y < sub.ny; ++y)
          for (std::size_t x = 0; x < sub.nx; ++x) {
            const std::size_t j = y * sub.nx + x;
            const std::size_t i = z * plane + j;
            if (static_cast<bool>(inside[i]) != want_inside) continue;
            const double r = field.at(x + box.min.x, y + box.min.y, z + box.min.z);
            if (want_inside) {
              const double limit = half_voxel - r;  // erode where r < 0
              result[i] = !(r < 0.0 && squared[j] <= limit * limit);
            } else {
              const double limit = half_voxel + r;  // dilate where r > 0
              result[i] = r > 0.0 && squared[j] <= limit * limit;
            }
          }
      };
    };
    detail::squared_edt_slices(inside, sub, spacing, 1, decide(false));
    detail::squared_edt_slices(outside, sub, spacing, 1, decide(true));
    detail::paste(result, box, bits, dims);
  }

  if (drop_fraction > 0.0) {
    std::vector<std::uint32_t> labels;
    const std::size_t count = label_components(bits, dims, labels);
    const auto drop = static_cast<std::size_t>(std::floor(drop_fraction * static_cast<double>(count)));
    if (drop > 0) {
      // Partial Fisher-Yates over component ids, from its own stream.
      Random rng(seed ^ 0x9E3779B97F4A7C15ull);
      std::vector<std::uint32_t> ids(count);
      for (std::size_t i = 0; i < count; ++i) ids[i] = static_cast<std::uint32_t>(i + 1);
      std::vector<std::uint8_t> dropped(count + 1, 0);
      for (std::size_t i = 0; i < drop; ++i) {
        const std::size_t j = i + rng.below(count - i);
        std::swap(ids[i], ids[j]);
        dropped[ids[i]] = 1;
      }
      for (std::size_t v = 0; v < bits.size(); ++v)
        if (bits[v] && dropped[labels[v]]) bits[v] = 0;
    }
  }
  return BinaryMask(g, std::move(bits));
}

}  // namespace voxmetric
