#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "voxmetric/phantom.hpp"

namespace voxmetric {

/// A "model" whose predictions are perturbed ground truth.
struct SimulatedModel {
  std::string model_id;
  double boundary_noise_mm = 0.0;
  double drop_fraction = 0.0;
};

struct CohortSpec {
  PhantomSpec phantom;  // patient i uses seed phantom.seed + i
  std::size_t patients = 20;
  std::vector<SimulatedModel> models;
  int folds = 5;  // 0 leaves fold ids out of the manifest
};

/// Writes one directory per patient (ct.nii, ptv.nii, bones.nii,
/// pred_<model>.nii) plus manifest.json, and returns the manifest path.
/// Output depends only on `spec`, never on `parallelism`.
std::filesystem::path write_phantom_cohort(const CohortSpec& spec, const std::filesystem::path& dir,
                                           unsigned parallelism = 1);

/// Seed of the perturbation for (patient seed, model index).
std::uint64_t prediction_seed(std::uint64_t patient_seed, std::size_t model_index);

// PhantomSpec as JSON. Every key is optional and falls back to the default:
//   { "dims": [nx, ny, nz], "spacing": [sx, sy, sz], "seed": 1,
//     "bone_tubes": 4, "tube_radius_mm": [3, 6], "bone_blocks": 2,
//     "block_radius_mm": [6, 12], "spleen_count": 1, "spleen_radius_mm": [8, 14],
//     "lymph_chains": 3, "nodes_per_chain": 4, "node_diameter_mm": [4, 15],
//     "noise_hu": 10 }
/// Throws InvalidArgument for malformed documents.
PhantomSpec phantom_spec_from_json(std::string_view text);
std::string phantom_spec_to_json(const PhantomSpec& spec);

}  // namespace voxmetric
