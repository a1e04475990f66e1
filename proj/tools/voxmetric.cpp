// voxmetric command line: eval, folds, phantom, stats, report.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "voxmetric/cohort.hpp"
#include "voxmetric/error.hpp"
#include "voxmetric/evaluation.hpp"
#include "voxmetric/manifest.hpp"
#include "voxmetric/stats.hpp"

namespace fs = std::filesystem;
using namespace voxmetric;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingArtifact, p.string() + ": cannot open");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::optional<fs::path>& out, const std::string& text) {
  if (!out) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(*out, std::ios::binary);
  f << text;
  f.flush();
  if (!f) throw Error(ErrorKind::WriteError, out->string() + ": write failed");
}

ReportFormat format_for(const std::string& name, const std::optional<fs::path>& out) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  // auto: by extension, JSON otherwise
  return out && out->extension() == ".csv" ? ReportFormat::Csv : ReportFormat::Json;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string manifest;
  bool bones = false;
  std::string out;
  std::string format = "auto";
  unsigned workers = 1;
};

int run_eval(const EvalArgs& a) {
  const CohortManifest manifest = load_manifest(a.manifest);
  const EvaluationReport report = run_evaluation(manifest, {a.bones, a.workers});
  const fs::path out = a.out;
  emit_report(report, format_for(a.format, out), out);
  std::cerr << "evaluated " << report.records.size() << " cases";
  if (!report.failures.empty()) std::cerr << ", " << report.failures.size() << " failed";
  std::cerr << "; report written to " << out.string() << "\n";
  for (const CaseFailure& f : report.failures)
    std::cerr << "  " << f.patient_id << " / " << f.model_id << ": " << f.reason << "\n";
  return kExitOk;
}

// --- folds -----------------------------------------------------------------

struct FoldsArgs {
  std::string manifest;
  int k = 0;  // 0: the manifest's "folds"
  std::string out;
};

int run_folds(const FoldsArgs& a) {
  const CohortManifest manifest = load_manifest(a.manifest);
  std::vector<std::string> ids, dates;
  for (const PatientEntry& p : manifest.patients) {
    ids.push_back(p.patient_id);
    if (p.acquisition_date) dates.push_back(*p.acquisition_date);
  }
  const bool dated = dates.size() == ids.size();
  if (!dated && !dates.empty())
    std::cerr << "note: some patients lack acquisition_date; folds follow manifest order\n";
  const int k = a.k > 0 ? a.k : manifest.fold_count;
  const auto folds = make_folds(ids, k, dated ? std::optional(dates) : std::nullopt);
  std::string text = "patient_id,fold\n";
  for (std::size_t i = 0; i < ids.size(); ++i) text += ids[i] + "," + std::to_string(folds[i]) + "\n";
  write_text(a.out.empty() ? std::nullopt : std::optional<fs::path>(a.out), text);
  return kExitOk;
}

// --- phantom ---------------------------------------------------------------

struct PhantomArgs {
  std::string spec;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::size_t patients = 1;
  std::vector<std::string> models{"exact:0", "noise_1mm:1", "noise_3mm:3"};
  std::optional<int> folds;
  unsigned workers = 1;
};

SimulatedModel parse_model(const std::string& text) {
  // id:noise_mm[:drop_fraction]
  std::vector<std::string> parts;
  std::stringstream s(text);
  for (std::string part; std::getline(s, part, ':');) parts.push_back(part);
  if (parts.size() < 2 || parts.size() > 3 || parts[0].empty())
    throw CLI::ValidationError("--model", "expected id:noise_mm[:drop_fraction], got '" + text + "'");
  try {
    SimulatedModel m{parts[0], std::stod(parts[1]), parts.size() == 3 ? std::stod(parts[2]) : 0.0};
    return m;
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--model", "not a number in '" + text + "'");
  }
}

int run_phantom(const PhantomArgs& a) {
  CohortSpec spec;
  if (!a.spec.empty()) spec.phantom = phantom_spec_from_json(read_text(a.spec));
  if (a.seed) spec.phantom.seed = *a.seed;
  spec.patients = a.patients;
  spec.models.clear();
  for (const std::string& m : a.models) spec.models.push_back(parse_model(m));
  spec.folds = a.folds ? *a.folds : (a.patients >= 5 ? 5 : 0);
  const fs::path manifest = write_phantom_cohort(spec, a.out_dir, a.workers);
  std::cerr << "wrote " << a.patients << " phantom patient(s); manifest " << manifest.string() << "\n";
  return kExitOk;
}

// --- stats -----------------------------------------------------------------

struct StatsArgs {
  std::string report;
  std::string metric = "dsc";
  std::string test = "kw";
  std::vector<std::string> models;
};

int run_stats(const StatsArgs& a) {
  Metric metric;
  try {
    metric = parse_metric(a.metric);
  } catch (const Error& e) {
    throw CLI::ValidationError("--metric", e.what());
  }
  const EvaluationReport report = load_report(a.report);
  const auto groups = metric_groups(report, metric);
  std::ostringstream out;
  out << "metric " << to_string(metric) << "\n";

  if (a.test == "paired-t") {
    if (a.models.size() != 2) throw CLI::ValidationError("--models", "paired-t needs exactly two model ids");
    // Pair the two models' values by patient.
    std::map<std::string, std::pair<std::optional<double>, std::optional<double>>> by_patient;
    std::vector<std::string> order;
    bool seen[2] = {false, false};
    for (const MetricRecord& r : report.records) {
      for (int side = 0; side < 2; ++side) {
        if (r.model_id != a.models[side]) continue;
        seen[side] = true;
        if (!by_patient.count(r.patient_id)) order.push_back(r.patient_id);
        auto& slot = by_patient[r.patient_id];
        (side == 0 ? slot.first : slot.second) = metric_value(r, metric);
      }
    }
    for (int side = 0; side < 2; ++side)
      if (!seen[side]) throw Error(ErrorKind::InvalidArgument, "model '" + a.models[side] + "' not in report");
    std::vector<double> x, y;
    for (const std::string& id : order) {
      const auto& [u, v] = by_patient[id];
      if (u && v) {
        x.push_back(*u);
        y.push_back(*v);
      }
    }
    const TestResult t = paired_t(x, y);
    out << "paired t (" << a.models[0] << " - " << a.models[1] << "), " << x.size() << " patients: t = "
        << num(t.statistic) << ", df = " << num(t.df) << ", p = " << num(t.p_value) << "\n";
    write_text(std::nullopt, out.str());
    return kExitOk;
  }

  out << "model\tn\tmedian\tq1\tq3\tmin\tmax\n";
  for (std::size_t m = 0; m < groups.size(); ++m) {
    out << report.model_ids[m];
    if (groups[m].empty()) {
      out << "\t0\n";
      continue;
    }
    const Summary s = summarize(groups[m]);
    out << "\t" << s.n << "\t" << num(s.median) << "\t" << num(s.q1) << "\t" << num(s.q3) << "\t" << num(s.min)
        << "\t" << num(s.max) << "\n";
  }
  write_text(std::nullopt, out.str());
  out.str("");
  const TestResult kw = kruskal_wallis(groups);
  out << "kruskal-wallis: H = " << num(kw.statistic) << ", df = " << num(kw.df) << ", p = " << num(kw.p_value)
      << "\n";
  for (const PairwiseResult& p : dunn_posthoc(groups))
    out << "dunn " << report.model_ids[p.pair.first] << " vs " << report.model_ids[p.pair.second]
        << ": z = " << num(p.z) << ", p = " << num(p.p_raw) << ", p (holm) = " << num(p.p_adjusted) << "\n";
  write_text(std::nullopt, out.str());
  return kExitOk;
}

// --- report ----------------------------------------------------------------

struct ReportArgs {
  std::string report;
  std::string format = "auto";
  std::string out;
};

int run_report(const ReportArgs& a) {
  const EvaluationReport report = load_report(a.report);
  const std::optional<fs::path> out = a.out.empty() ? std::nullopt : std::optional<fs::path>(a.out);
  const ReportFormat f = format_for(a.format, out);
  write_text(out, f == ReportFormat::Csv ? report_to_csv(report) : report_to_json(report));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voxmetric: segmentation evaluation on volumetric masks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML/INI file; command-line flags take precedence");
  const auto formats = CLI::IsMember({"auto", "csv", "json"});

  EvalArgs eval;
  CLI::App* e = app.add_subcommand("eval", "Evaluate every (patient, model) pair of a manifest");
  e->add_option("--manifest", eval.manifest, "Cohort manifest (JSON)")->required();
  e->add_flag("--bones", eval.bones, "Also report DSC with bone voxels removed");
  e->add_option("--out", eval.out, "Report path")->required();
  e->add_option("--format", eval.format, "csv, json or auto (from the --out extension)")->check(formats);
  e->add_option("--workers", eval.workers, "Patients evaluated concurrently (0: all hardware threads)");

  FoldsArgs folds;
  CLI::App* f = app.add_subcommand("folds", "Assign cross-validation folds (date-ordered round robin)");
  f->add_option("--manifest", folds.manifest, "Cohort manifest (JSON)")->required();
  f->add_option("-k,--folds", folds.k, "Fold count (default: the manifest's \"folds\")")
      ->check(CLI::NonNegativeNumber);
  f->add_option("--out", folds.out, "CSV output (default: stdout)");

  PhantomArgs phantom;
  CLI::App* p = app.add_subcommand("phantom", "Write a synthetic cohort with simulated model predictions");
  p->add_option("--spec", phantom.spec, "Phantom spec (JSON); defaults apply to missing keys");
  p->add_option("--seed", phantom.seed, "Seed of the first patient (overrides the --spec file)");
  p->add_option("--out-dir", phantom.out_dir, "Output directory")->required();
  p->add_option("--patients", phantom.patients, "Patient count")->check(CLI::PositiveNumber);
  p->add_option("--model", phantom.models, "Simulated model id:noise_mm[:drop_fraction] (repeatable)");
  p->add_option("--folds", phantom.folds, "Folds written to the manifest (default 5 when patients >= 5, else none)");
  p->add_option("--workers", phantom.workers, "Patients generated concurrently");

  StatsArgs stats;
  CLI::App* s = app.add_subcommand("stats", "Summaries and model comparison from a JSON report");
  s->add_option("--report", stats.report, "JSON report from eval")->required();
  s->add_option("--metric", stats.metric, "dsc, hd_mm, hd95_mm or dsc_bones_excluded");
  s->add_option("--test", stats.test, "kw (Kruskal-Wallis + Dunn/Holm) or paired-t")
      ->check(CLI::IsMember({"kw", "paired-t"}));
  s->add_option("--models", stats.models, "Two model ids for paired-t")->delimiter(',');

  ReportArgs rep;
  CLI::App* r = app.add_subcommand("report", "Convert a JSON report to CSV or JSON");
  r->add_option("--report", rep.report, "JSON report from eval")->required();
  r->add_option("--format", rep.format, "csv, json or auto (from the --out extension)")->check(formats);
  r->add_option("--out", rep.out, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
    if (e->parsed()) return run_eval(eval);
    if (f->parsed()) return run_folds(folds);
    if (p->parsed()) return run_phantom(phantom);
    if (s->parsed()) return run_stats(stats);
    if (r->parsed()) return run_report(rep);
    return kExitUsage;
  } catch (const CLI::Success& ok) {
    return app.exit(ok);
  } catch (const CLI::Error& err) {
    app.exit(err);
    return kExitUsage;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitData;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return kExitInternal;
  } catch (...) {
    std::cerr << "internal error\n";
    return kExitInternal;
  }
}
