#include "voxmetric/evaluation.hpp"

#include <optional>

#include "voxmetric/error.hpp"
#include "voxmetric/nifti.hpp"
#include "voxmetric/parallel.hpp"

namespace voxmetric {
namespace {

struct PatientOutcome {
  std::vector<MetricRecord> records;
  std::vector<CaseFailure> failures;
};

std::string describe(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

BinaryMask load_mask(const std::filesystem::path& path, double threshold) {
  return threshold_to_mask(load_nifti(path), threshold);
}

PatientOutcome evaluate_patient(const CohortManifest& manifest, const PatientEntry& patient,
                                const EvaluationOptions& options) {
  PatientOutcome out;
  std::optional<BinaryMask> gt;
  std::optional<BinaryMask> bones;
  try {
    gt = load_mask(patient.gt_mask_path, manifest.mask_threshold);
    if (options.with_bone_subtraction && patient.bone_mask_path)
      bones = load_mask(*patient.bone_mask_path, manifest.mask_threshold);
  } catch (...) {
    const std::string reason = "ground truth: " + describe(std::current_exception());
    for (const ModelEntry& model : manifest.models) out.failures.push_back({patient.patient_id, model.model_id, reason});
    return out;
  }

  for (const ModelEntry& model : manifest.models) {
    try {
      const BinaryMask pred = load_mask(model.predictions.at(patient.patient_id), manifest.mask_threshold);
      MetricRecord record =
          evaluate_pair(*gt, pred, gt->geometry().spacing(), bones ? &*bones : nullptr);
      record.patient_id = patient.patient_id;
      record.model_id = model.model_id;
      record.fold = patient.fold;
      out.records.push_back(std::move(record));
    } catch (...) {
      out.failures.push_back({patient.patient_id, model.model_id, describe(std::current_exception())});
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::Dsc: return "dsc";
    case Metric::Hd: return "hd_mm";
    case Metric::Hd95: return "hd95_mm";
    case Metric::DscBonesExcluded: return "dsc_bones_excluded";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics)
    if (name == to_string(m)) return m;
  if (name == "hd") return Metric::Hd;
  if (name == "hd95") return Metric::Hd95;
  throw Error(ErrorKind::InvalidArgument, "unknown metric '" + std::string(name) + "'");
}

std::optional<double> metric_value(const MetricRecord& record, Metric metric) {
  switch (metric) {
    case Metric::Dsc: return record.dsc;
    case Metric::Hd: return record.hd_mm;
    case Metric::Hd95: return record.hd95_mm;
    case Metric::DscBonesExcluded: return record.dsc_bones_excluded;
  }
  return std::nullopt;
}

std::vector<std::vector<double>> metric_groups(const EvaluationReport& report, Metric metric) {
  std::vector<std::vector<double>> groups(report.model_ids.size());
  for (const MetricRecord& r : report.records) {
    const auto value = metric_value(r, metric);
    if (!value) continue;
    for (std::size_t m = 0; m < report.model_ids.size(); ++m)
      if (report.model_ids[m] == r.model_id) groups[m].push_back(*value);
  }
  return groups;
}

void aggregate(EvaluationReport& report) {
  report.summaries.clear();
  report.tests.clear();
  for (const std::string& id : report.model_ids) report.summaries.push_back({id, {}});

  for (Metric metric : kAllMetrics) {
    const auto groups = metric_groups(report, metric);
    bool any = false;
    for (std::size_t m = 0; m < groups.size(); ++m) {
      if (groups[m].empty()) continue;
      any = true;
      report.summaries[m].by_metric[static_cast<std::size_t>(metric)] = summarize(groups[m]);
    }
    if (!any) continue;

    MetricTests tests;
    tests.metric = metric;
    try {
      tests.kruskal_wallis = kruskal_wallis(groups);
      tests.dunn = dunn_posthoc(groups);
    } catch (const Error& e) {
      tests.kruskal_wallis.reset();
      tests.dunn.clear();
      tests.error = e.what();
    }
    report.tests.push_back(std::move(tests));
  }
}

EvaluationReport run_evaluation(const CohortManifest& manifest, const EvaluationOptions& options) {
  validate_manifest(manifest);
  std::vector<PatientOutcome> outcomes(manifest.patients.size());
  parallel_for(manifest.patients.size(), effective_workers(options.parallelism), [&](std::size_t i) {
    outcomes[i] = evaluate_patient(manifest, manifest.patients[i], options);
  });

  EvaluationReport report;
  report.with_bone_subtraction = options.with_bone_subtraction;
  for (const ModelEntry& m : manifest.models) report.model_ids.push_back(m.model_id);
  for (PatientOutcome& o : outcomes) {
    for (MetricRecord& r : o.records) report.records.push_back(std::move(r));
    for (CaseFailure& f : o.failures) report.failures.push_back(std::move(f));
  }
  if (report.records.empty()) {
    std::string reason = report.failures.empty() ? "no cases" : report.failures.front().reason;
    throw Error(ErrorKind::EvaluationFailed, "every case failed; first failure: " + reason);
  }
  aggregate(report);
  return report;
}

}  // namespace voxmetric
