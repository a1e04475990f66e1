#include "voxmetric/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <regex>
#include <set>

#include <json.hpp>

#include "voxmetric/error.hpp"

namespace voxmetric {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

[[noreturn]] void schema_error(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::ManifestError, field + ": " + why);
}

const json& require(const json& object, const char* key, const std::string& where) {
  const auto it = object.find(key);
  if (it == object.end()) schema_error(where + "." + key, "missing");
  return *it;
}

std::string require_string(const json& object, const char* key, const std::string& where) {
  const json& v = require(object, key, where);
  if (!v.is_string() || v.get<std::string>().empty()) schema_error(where + "." + key, "expected a non-empty string");
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const json& object, const char* key, const std::string& where) {
  const auto it = object.find(key);
  if (it == object.end() || it->is_null()) return std::nullopt;
  if (!it->is_string() || it->get<std::string>().empty()) schema_error(where + "." + key, "expected a non-empty string");
  return it->get<std::string>();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

void require_file(const fs::path& path, const std::string& field) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec))
    throw Error(ErrorKind::MissingArtifact, field + ": " + path.string() + " does not exist");
}

bool is_iso_date(const std::string& s) {
  static const std::regex pattern(R"(\d{4}-\d{2}-\d{2}([T ][0-9:.+\-Z]*)?)");
  return std::regex_match(s, pattern);
}

}  // namespace

void validate_manifest(const CohortManifest& m) {
  if (m.patients.empty()) schema_error("patients", "at least one patient is required");
  if (m.models.empty()) schema_error("models", "at least one model is required");
  if (m.fold_count < 1) schema_error("folds", "must be >= 1");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < m.patients.size(); ++i) {
    const PatientEntry& p = m.patients[i];
    const std::string where = "patients[" + std::to_string(i) + "]";
    if (!ids.insert(p.patient_id).second)
      schema_error(where + ".patient_id", "duplicate patient_id '" + p.patient_id + "'");
    if (p.fold && (*p.fold < 0 || *p.fold >= m.fold_count))
      schema_error(where + ".fold", "must lie in [0, " + std::to_string(m.fold_count) + ")");
    if (p.acquisition_date && !is_iso_date(*p.acquisition_date))
      schema_error(where + ".acquisition_date", "not an ISO-8601 date");
  }
  std::set<std::string> model_ids;
  for (std::size_t j = 0; j < m.models.size(); ++j) {
    const ModelEntry& model = m.models[j];
    const std::string where = "models[" + std::to_string(j) + "]";
    if (!model_ids.insert(model.model_id).second)
      schema_error(where + ".model_id", "duplicate model_id '" + model.model_id + "'");
    for (const PatientEntry& p : m.patients)
      if (!model.predictions.contains(p.patient_id))
        schema_error(where + ".predictions",
                     "model '" + model.model_id + "' has no prediction for patient '" + p.patient_id + "'");
    for (const auto& [pid, path] : model.predictions)
      if (!ids.contains(pid))
        schema_error(where + ".predictions." + pid, "unknown patient '" + pid + "'");
  }
}

CohortManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingArtifact, path.string() + ": cannot open manifest");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    schema_error("<document>", e.what());
  }
  if (!doc.is_object()) schema_error("<document>", "expected an object");
  const fs::path base = path.parent_path();

  CohortManifest m;
  if (const auto it = doc.find("mask_threshold"); it != doc.end()) {
    if (!it->is_number()) schema_error("mask_threshold", "expected a number");
    m.mask_threshold = it->get<double>();
  }
  if (const auto it = doc.find("folds"); it != doc.end()) {
    if (!it->is_number_integer()) schema_error("folds", "expected an integer");
    m.fold_count = it->get<int>();
  }

  const json& patients = require(doc, "patients", "<document>");
  if (!patients.is_array()) schema_error("patients", "expected an array");
  for (std::size_t i = 0; i < patients.size(); ++i) {
    const json& p = patients[i];
    const std::string where = "patients[" + std::to_string(i) + "]";
    if (!p.is_object()) schema_error(where, "expected an object");
    PatientEntry entry;
    entry.patient_id = require_string(p, "patient_id", where);
    entry.gt_mask_path = resolve(base, require_string(p, "gt_mask_path", where));
    if (auto ct = optional_string(p, "ct_path", where)) entry.ct_path = resolve(base, *ct);
    if (auto bone = optional_string(p, "bone_mask_path", where)) entry.bone_mask_path = resolve(base, *bone);
    entry.acquisition_date = optional_string(p, "acquisition_date", where);
    if (const auto it = p.find("fold"); it != p.end() && !it->is_null()) {
      if (!it->is_number_integer()) schema_error(where + ".fold", "expected an integer");
      entry.fold = it->get<int>();
    }
    m.patients.push_back(std::move(entry));
  }

  const json& models = require(doc, "models", "<document>");
  if (!models.is_array()) schema_error("models", "expected an array");
  for (std::size_t j = 0; j < models.size(); ++j) {
    const json& model = models[j];
    const std::string where = "models[" + std::to_string(j) + "]";
    if (!model.is_object()) schema_error(where, "expected an object");
    ModelEntry entry;
    entry.model_id = require_string(model, "model_id", where);
    const json& preds = require(model, "predictions", where);
    if (!preds.is_object()) schema_error(where + ".predictions", "expected an object keyed by patient_id");
    for (const auto& [pid, value] : preds.items()) {
      if (!value.is_string()) schema_error(where + ".predictions." + pid, "expected a path string");
      entry.predictions[pid] = resolve(base, value.get<std::string>());
    }
    m.models.push_back(std::move(entry));
  }

  validate_manifest(m);

  for (std::size_t i = 0; i < m.patients.size(); ++i) {
    const PatientEntry& p = m.patients[i];
    const std::string where = "patients[" + std::to_string(i) + "]";
    require_file(p.gt_mask_path, where + ".gt_mask_path");
    if (p.ct_path) require_file(*p.ct_path, where + ".ct_path");
    if (p.bone_mask_path) require_file(*p.bone_mask_path, where + ".bone_mask_path");
  }
  for (std::size_t j = 0; j < m.models.size(); ++j)
    for (const auto& [pid, file] : m.models[j].predictions)
      require_file(file, "models[" + std::to_string(j) + "].predictions." + pid);
  return m;
}

std::vector<int> make_folds(const std::vector<std::string>& patient_ids, int k,
                            const std::optional<std::vector<std::string>>& dates) {
  const std::size_t n = patient_ids.size();
  if (k < 2 || static_cast<std::size_t>(k) > n)
    throw Error(ErrorKind::InvalidFoldCount,
                "k = " + std::to_string(k) + " with " + std::to_string(n) + " patients");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (dates) {
    if (dates->size() != n) throw Error(ErrorKind::InvalidArgument, "one date per patient is required");
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return (*dates)[a] < (*dates)[b]; });
  }
  std::vector<int> folds(n);
  for (std::size_t rank = 0; rank < n; ++rank) folds[order[rank]] = static_cast<int>(rank % k);
  return folds;
}

}  // namespace voxmetric
