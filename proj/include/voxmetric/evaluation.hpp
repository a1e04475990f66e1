#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "voxmetric/manifest.hpp"
#include "voxmetric/metrics.hpp"
#include "voxmetric/stats.hpp"

namespace voxmetric {

enum class Metric { Dsc, Hd, Hd95, DscBonesExcluded };

inline constexpr std::array<Metric, 4> kAllMetrics{Metric::Dsc, Metric::Hd, Metric::Hd95,
                                                   Metric::DscBonesExcluded};

/// "dsc", "hd_mm", "hd95_mm", "dsc_bones_excluded" (also the CSV/JSON names).
std::string_view to_string(Metric metric) noexcept;
/// Accepts the names above plus "hd" and "hd95". Throws InvalidArgument.
Metric parse_metric(std::string_view name);

/// The metric's value in a record, if defined.
std::optional<double> metric_value(const MetricRecord& record, Metric metric);

/// A (patient, model) evaluation that did not produce a record.
struct CaseFailure {
  std::string patient_id;
  std::string model_id;
  std::string reason;

  bool operator==(const CaseFailure&) const = default;
};

struct ModelSummary {
  std::string model_id;
  std::array<std::optional<Summary>, kAllMetrics.size()> by_metric;  // indexed by Metric

  bool operator==(const ModelSummary&) const = default;
};

/// Kruskal-Wallis across models plus Dunn/Holm pairs (indices into
/// EvaluationReport::model_ids). When the test cannot run, `error` holds the
/// reason and the results are empty.
struct MetricTests {
  Metric metric = Metric::Dsc;
  std::optional<TestResult> kruskal_wallis;
  std::vector<PairwiseResult> dunn;
  std::optional<std::string> error;

  bool operator==(const MetricTests&) const = default;
};

struct EvaluationReport {
  bool with_bone_subtraction = false;
  std::vector<std::string> model_ids;  // manifest order
  std::vector<MetricRecord> records;   // patient (manifest order), then model
  std::vector<CaseFailure> failures;   // same order
  std::vector<ModelSummary> summaries;  // one per model
  std::vector<MetricTests> tests;       // one per metric that has any value

  bool operator==(const EvaluationReport&) const = default;
};

struct EvaluationOptions {
  bool with_bone_subtraction = false;
  unsigned parallelism = 1;  // patients in flight; 0 = hardware concurrency
};

/// Loads and evaluates every (patient, model) pair. Individual failures are
/// recorded, never thrown; EvaluationFailed when nothing succeeded. The
/// result does not depend on `parallelism`.
EvaluationReport run_evaluation(const CohortManifest& manifest, const EvaluationOptions& options = {});

/// Summaries and tests from records alone (used by run_evaluation and when a
/// report is re-analysed).
void aggregate(EvaluationReport& report);

/// Values of `metric` grouped per model (model_ids order), patients in record order.
std::vector<std::vector<double>> metric_groups(const EvaluationReport& report, Metric metric);

enum class ReportFormat { Csv, Json };

std::string report_to_json(const EvaluationReport& report);
/// Throws MalformedFile on anything that is not a report document.
EvaluationReport report_from_json(std::string_view text);
std::string report_to_csv(const EvaluationReport& report);

/// Throws WriteError on I/O failure.
void emit_report(const EvaluationReport& report, ReportFormat format, const std::filesystem::path& path);
/// Reads a JSON report. Throws MissingArtifact or MalformedFile.
EvaluationReport load_report(const std::filesystem::path& path);

}  // namespace voxmetric
