#include "voxmetric/metrics.hpp"

#include <algorithm>

#include "voxmetric/error.hpp"
#include "voxmetric/mask_algebra.hpp"
#include "voxmetric/percentile.hpp"
#include "voxmetric/simd.hpp"

namespace voxmetric {
namespace {

SurfaceDistances checked_distances(const BinaryMask& gt, const BinaryMask& pred,
                                   const Spacing& spacing, const EdtOptions& options = {}) {
  require_compatible(gt.geometry(), pred.geometry(), "hausdorff masks");
  if (gt.empty() || pred.empty())
    throw Error(ErrorKind::UndefinedMetric, "surface distance undefined for an empty mask");
  return surface_distances(gt, pred, spacing, options);
}

double hd_from(const SurfaceDistances& d) { return std::max(d.a_to_b.back(), d.b_to_a.back()); }

double hd95_from(const SurfaceDistances& d) {
  return std::max(percentile_sorted(d.a_to_b, 0.95), percentile_sorted(d.b_to_a, 0.95));
}

}  // namespace

double dice(const BinaryMask& gt, const BinaryMask& pred) {
  require_compatible(gt.geometry(), pred.geometry(), "dice masks");
  const auto& k = simd::kernels();
  const auto a = gt.bits();
  const auto b = pred.bits();
  const std::size_t total = k.count_nonzero(a.data(), a.size()) + k.count_nonzero(b.data(), b.size());
  if (total == 0) return 1.0;
  const std::size_t overlap = k.count_and(a.data(), b.data(), a.size());
  return 2.0 * static_cast<double>(overlap) / static_cast<double>(total);
}

double hausdorff(const BinaryMask& gt, const BinaryMask& pred, const Spacing& spacing) {
  return hd_from(checked_distances(gt, pred, spacing));
}

double hd95(const BinaryMask& gt, const BinaryMask& pred, const Spacing& spacing) {
  return hd95_from(checked_distances(gt, pred, spacing));
}

MetricRecord evaluate_pair(const BinaryMask& gt, const BinaryMask& pred, const Spacing& spacing,
                           const BinaryMask* bones, const EdtOptions& options) {
  require_compatible(gt.geometry(), pred.geometry(), "ground truth vs prediction");
  if (bones) require_compatible(gt.geometry(), bones->geometry(), "ground truth vs bones");

  MetricRecord record;
  record.dsc = dice(gt, pred);
  if (!gt.empty() && !pred.empty()) {
    const SurfaceDistances d = checked_distances(gt, pred, spacing, options);
    record.hd_mm = hd_from(d);
    record.hd95_mm = hd95_from(d);
  }
  if (bones) record.dsc_bones_excluded = dice(subtract(gt, *bones), subtract(pred, *bones));
  return record;
}

}  // namespace voxmetric
