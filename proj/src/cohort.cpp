#include "voxmetric/cohort.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "voxmetric/error.hpp"
#include "voxmetric/manifest.hpp"
#include "voxmetric/nifti.hpp"
#include "voxmetric/parallel.hpp"

namespace voxmetric {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string patient_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "P%03zu", i + 1);
  return buf;
}

// Weekly acquisitions from 2020-01-06 so folds can be stratified by date.
std::string acquisition_date(std::size_t i) {
  using namespace std::chrono;
  const year_month_day d{sys_days{year{2020} / January / 6} + days{7 * static_cast<int>(i)}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

MmRange range_from(const json& v, const char* key) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw Error(ErrorKind::InvalidArgument, std::string(key) + ": expected [lo, hi]");
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

std::uint64_t prediction_seed(std::uint64_t patient_seed, std::size_t model_index) {
  // splitmix64 finalizer over the pair, so neighbouring seeds decorrelate.
  std::uint64_t z = patient_seed * 0x9E3779B97F4A7C15ull + (model_index + 1) * 0xD1B54A32D192ED03ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

fs::path write_phantom_cohort(const CohortSpec& spec, const fs::path& dir, unsigned parallelism) {
  if (spec.patients == 0) throw Error(ErrorKind::InvalidArgument, "cohort needs at least one patient");
  if (spec.models.empty()) throw Error(ErrorKind::InvalidArgument, "cohort needs at least one model");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::WriteError, dir.string() + ": " + ec.message());

  parallel_for(spec.patients, effective_workers(parallelism), [&](std::size_t i) {
    PhantomSpec ps = spec.phantom;
    ps.seed = spec.phantom.seed + i;
    const PhantomCase c = generate_phantom(ps);
    const fs::path pdir = dir / patient_name(i);
    fs::create_directories(pdir);
    save_nifti(c.ct, pdir / "ct.nii");
    save_mask_nifti(c.ptv, pdir / "ptv.nii");
    save_mask_nifti(c.bones, pdir / "bones.nii");
    for (std::size_t m = 0; m < spec.models.size(); ++m) {
      const SimulatedModel& model = spec.models[m];
      const BinaryMask pred = perturb_mask(c.ptv, ps.geometry.spacing(), model.boundary_noise_mm,
                                           model.drop_fraction, prediction_seed(ps.seed, m));
      save_mask_nifti(pred, pdir / ("pred_" + model.model_id + ".nii"));
    }
  });

  std::vector<std::string> ids, dates;
  for (std::size_t i = 0; i < spec.patients; ++i) {
    ids.push_back(patient_name(i));
    dates.push_back(acquisition_date(i));
  }
  std::vector<int> folds;
  if (spec.folds > 0) folds = make_folds(ids, spec.folds, dates);

  ordered_json doc;
  doc["mask_threshold"] = 0.5;
  if (spec.folds > 0) doc["folds"] = spec.folds;
  ordered_json patients = ordered_json::array();
  for (std::size_t i = 0; i < spec.patients; ++i) {
    ordered_json p;
    p["patient_id"] = ids[i];
    p["ct_path"] = ids[i] + "/ct.nii";
    p["gt_mask_path"] = ids[i] + "/ptv.nii";
    p["bone_mask_path"] = ids[i] + "/bones.nii";
    p["acquisition_date"] = dates[i];
    if (spec.folds > 0) p["fold"] = folds[i];
    patients.push_back(std::move(p));
  }
  doc["patients"] = std::move(patients);
  ordered_json models = ordered_json::array();
  for (const SimulatedModel& m : spec.models) {
    ordered_json preds = ordered_json::object();
    for (const std::string& id : ids) preds[id] = id + "/pred_" + m.model_id + ".nii";
    models.push_back({{"model_id", m.model_id}, {"predictions", std::move(preds)}});
  }
  doc["models"] = std::move(models);

  const fs::path manifest = dir / "manifest.json";
  std::ofstream out(manifest, std::ios::binary);
  out << doc.dump(2) << "\n";
  out.flush();
  if (!out) throw Error(ErrorKind::WriteError, manifest.string() + ": write failed");
  return manifest;
}

PhantomSpec phantom_spec_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("phantom spec: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::InvalidArgument, "phantom spec: expected an object");

  PhantomSpec s;
  try {
    Dims dims = s.geometry.dims();
    Spacing spacing = s.geometry.spacing();
    if (doc.contains("dims")) {
      const auto v = doc["dims"].get<std::vector<std::size_t>>();
      if (v.size() != 3) throw Error(ErrorKind::InvalidArgument, "dims: expected [nx, ny, nz]");
      dims = {v[0], v[1], v[2]};
    }
    if (doc.contains("spacing")) {
      const auto v = doc["spacing"].get<std::vector<double>>();
      if (v.size() != 3) throw Error(ErrorKind::InvalidArgument, "spacing: expected [sx, sy, sz]");
      spacing = {v[0], v[1], v[2]};
    }
    s.geometry = Geometry(dims, spacing);
    s.seed = doc.value("seed", s.seed);
    s.bone_tubes = doc.value("bone_tubes", s.bone_tubes);
    s.bone_blocks = doc.value("bone_blocks", s.bone_blocks);
    s.spleen_count = doc.value("spleen_count", s.spleen_count);
    s.lymph_chains = doc.value("lymph_chains", s.lymph_chains);
    s.nodes_per_chain = doc.value("nodes_per_chain", s.nodes_per_chain);
    s.noise_hu = doc.value("noise_hu", s.noise_hu);
    if (doc.contains("tube_radius_mm")) s.tube_radius_mm = range_from(doc["tube_radius_mm"], "tube_radius_mm");
    if (doc.contains("block_radius_mm")) s.block_radius_mm = range_from(doc["block_radius_mm"], "block_radius_mm");
    if (doc.contains("spleen_radius_mm")) s.spleen_radius_mm = range_from(doc["spleen_radius_mm"], "spleen_radius_mm");
    if (doc.contains("node_diameter_mm")) s.node_diameter_mm = range_from(doc["node_diameter_mm"], "node_diameter_mm");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("phantom spec: ") + e.what());
  }
  return s;
}

std::string phantom_spec_to_json(const PhantomSpec& s) {
  const Dims& d = s.geometry.dims();
  const Spacing& sp = s.geometry.spacing();
  ordered_json doc;
  doc["dims"] = {d.nx, d.ny, d.nz};
  doc["spacing"] = {sp.x, sp.y, sp.z};
  doc["seed"] = s.seed;
  doc["bone_tubes"] = s.bone_tubes;
  doc["tube_radius_mm"] = {s.tube_radius_mm.lo, s.tube_radius_mm.hi};
  doc["bone_blocks"] = s.bone_blocks;
  doc["block_radius_mm"] = {s.block_radius_mm.lo, s.block_radius_mm.hi};
  doc["spleen_count"] = s.spleen_count;
  doc["spleen_radius_mm"] = {s.spleen_radius_mm.lo, s.spleen_radius_mm.hi};
  doc["lymph_chains"] = s.lymph_chains;
  doc["nodes_per_chain"] = s.nodes_per_chain;
  doc["node_diameter_mm"] = {s.node_diameter_mm.lo, s.node_diameter_mm.hi};
  doc["noise_hu"] = s.noise_hu;
  return doc.dump(2) + "\n";
}

}  // namespace voxmetric
