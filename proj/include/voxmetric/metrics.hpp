#pragma once

#include <optional>
#include <string>

#include "voxmetric/distance.hpp"
#include "voxmetric/volume.hpp"

namespace voxmetric {

/// Evaluation of one prediction against its ground truth.
/// hd/hd95 are nullopt (Undefined) when either mask is empty; the
/// bone-excluded Dice is nullopt (Absent) when no bone mask was supplied.
struct MetricRecord {
  std::string patient_id;
  std::string model_id;
  std::optional<int> fold;
  double dsc = 0.0;
  std::optional<double> hd_mm;
  std::optional<double> hd95_mm;
  std::optional<double> dsc_bones_excluded;

  bool operator==(const MetricRecord&) const = default;
};

/// 2|X ∩ Y| / (|X| + |Y|). Two empty masks score 1.0.
double dice(const BinaryMask& gt, const BinaryMask& pred);

/// Symmetric surface Hausdorff distance in mm. Throws UndefinedMetric when
/// either mask is empty.
double hausdorff(const BinaryMask& gt, const BinaryMask& pred, const Spacing& spacing);

/// Larger of the two directed 95th percentiles (linear interpolation at rank
/// (n - 1) * 0.95). Same preconditions as hausdorff().
double hd95(const BinaryMask& gt, const BinaryMask& pred, const Spacing& spacing);

/// DSC, HD and HD95 on the full masks; when `bones` is given also the DSC of
/// gt \ bones against pred \ bones. Distances are never taken on the
/// bone-subtracted masks.
MetricRecord evaluate_pair(const BinaryMask& gt, const BinaryMask& pred, const Spacing& spacing,
                           const BinaryMask* bones = nullptr, const EdtOptions& options = {});

}  // namespace voxmetric
