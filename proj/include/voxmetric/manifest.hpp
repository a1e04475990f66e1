#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace voxmetric {

// Cohort manifest (JSON):
//
//   {
//     "mask_threshold": 0.5,            // optional, default 0.5
//     "folds": 5,                       // optional k; fold ids must lie in [0, k)
//     "patients": [
//       { "patient_id": "P001",
//         "gt_mask_path": "P001/ptv.nii",
//         "ct_path": "P001/ct.nii",              // optional
//         "bone_mask_path": "P001/bones.nii",    // optional
//         "acquisition_date": "2021-03-04",      // optional, ISO-8601
//         "fold": 0 }                            // optional
//     ],
//     "models": [
//       { "model_id": "unet",
//         "predictions": { "P001": "P001/pred_unet.nii" } }
//     ]
//   }
//
// Relative paths resolve against the manifest's directory.

struct PatientEntry {
  std::string patient_id;
  std::optional<std::filesystem::path> ct_path;
  std::filesystem::path gt_mask_path;
  std::optional<std::filesystem::path> bone_mask_path;
  std::optional<std::string> acquisition_date;
  std::optional<int> fold;
};

struct ModelEntry {
  std::string model_id;
  std::map<std::string, std::filesystem::path> predictions;  // by patient_id
};

struct CohortManifest {
  std::vector<PatientEntry> patients;
  std::vector<ModelEntry> models;
  double mask_threshold = 0.5;
  int fold_count = 5;
};

/// Parses and validates; every referenced file must exist. Throws
/// ManifestError (message names the offending field path) or MissingArtifact.
CohortManifest load_manifest(const std::filesystem::path& path);

/// Validation shared with load_manifest, without touching the file system.
void validate_manifest(const CohortManifest& manifest);

/// Fold per patient (input order). With dates, patients are ordered by date
/// (ties keep input order) and dealt round-robin; otherwise dealt in input
/// order. Throws InvalidFoldCount unless 2 <= k <= patient count.
std::vector<int> make_folds(const std::vector<std::string>& patient_ids, int k,
                            const std::optional<std::vector<std::string>>& dates = std::nullopt);

}  // namespace voxmetric
