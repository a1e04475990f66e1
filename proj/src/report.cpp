#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "voxmetric/error.hpp"
#include "voxmetric/evaluation.hpp"

// JSON report layout:
//
//   { "format": "voxmetric-report", "version": 1,
//     "with_bone_subtraction": bool,
//     "models": [model_id, ...],
//     "records": [{patient_id, model_id, fold, dsc, hd_mm, hd95_mm, dsc_bones_excluded}],
//     "failures": [{patient_id, model_id, reason}],
//     "summaries": {model_id: {metric: {n, median, min, max, q1, q3} | null}},
//     "tests": {metric: {"kruskal_wallis": {statistic, df, p_value} | null,
//                        "dunn": [{a, b, z, p_raw, p_adjusted}],
//                        "error": string | null}} }
//
// Undefined or absent values are null. a/b in "dunn" are model ids.

namespace voxmetric {
namespace {

using nlohmann::ordered_json;

constexpr const char* kFormatTag = "voxmetric-report";
constexpr int kFormatVersion = 1;

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json summary_json(const Summary& s) {
  return {{"n", s.n}, {"median", s.median}, {"min", s.min}, {"max", s.max}, {"q1", s.q1}, {"q3", s.q3}};
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorKind::MalformedFile, "report: " + what);
}

const ordered_json& field(const ordered_json& obj, const char* key) {
  if (!obj.is_object()) malformed(std::string("expected an object holding '") + key + "'");
  const auto it = obj.find(key);
  if (it == obj.end()) malformed(std::string("missing '") + key + "'");
  return *it;
}

double number(const ordered_json& obj, const char* key) {
  const ordered_json& v = field(obj, key);
  if (!v.is_number()) malformed(std::string("'") + key + "' is not a number");
  return v.get<double>();
}

std::optional<double> optional_number(const ordered_json& obj, const char* key) {
  const ordered_json& v = field(obj, key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) malformed(std::string("'") + key + "' is not a number");
  return v.get<double>();
}

std::string string_field(const ordered_json& obj, const char* key) {
  const ordered_json& v = field(obj, key);
  if (!v.is_string()) malformed(std::string("'") + key + "' is not a string");
  return v.get<std::string>();
}

std::size_t model_index(const EvaluationReport& r, const std::string& id) {
  for (std::size_t m = 0; m < r.model_ids.size(); ++m)
    if (r.model_ids[m] == id) return m;
  malformed("unknown model '" + id + "'");
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_csv_field(std::string& out, const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) {
    out += s;
    return;
  }
  out += '"';
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::WriteError, path.string() + ": cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw Error(ErrorKind::WriteError, path.string() + ": write failed");
}

}  // namespace

std::string report_to_json(const EvaluationReport& r) {
  ordered_json doc;
  doc["format"] = kFormatTag;
  doc["version"] = kFormatVersion;
  doc["with_bone_subtraction"] = r.with_bone_subtraction;
  doc["models"] = r.model_ids;

  ordered_json records = ordered_json::array();
  for (const MetricRecord& rec : r.records) {
    records.push_back({{"patient_id", rec.patient_id},
                       {"model_id", rec.model_id},
                       {"fold", rec.fold ? ordered_json(*rec.fold) : ordered_json(nullptr)},
                       {"dsc", rec.dsc},
                       {"hd_mm", optional_number(rec.hd_mm)},
                       {"hd95_mm", optional_number(rec.hd95_mm)},
                       {"dsc_bones_excluded", optional_number(rec.dsc_bones_excluded)}});
  }
  doc["records"] = std::move(records);

  ordered_json failures = ordered_json::array();
  for (const CaseFailure& f : r.failures)
    failures.push_back({{"patient_id", f.patient_id}, {"model_id", f.model_id}, {"reason", f.reason}});
  doc["failures"] = std::move(failures);

  ordered_json summaries = ordered_json::object();
  for (const ModelSummary& s : r.summaries) {
    ordered_json per_metric = ordered_json::object();
    for (Metric m : kAllMetrics) {
      const auto& v = s.by_metric[static_cast<std::size_t>(m)];
      per_metric[std::string(to_string(m))] = v ? summary_json(*v) : ordered_json(nullptr);
    }
    summaries[s.model_id] = std::move(per_metric);
  }
  doc["summaries"] = std::move(summaries);

  ordered_json tests = ordered_json::object();
  for (const MetricTests& t : r.tests) {
    ordered_json entry;
    if (t.kruskal_wallis)
      entry["kruskal_wallis"] = {{"statistic", t.kruskal_wallis->statistic},
                                 {"df", t.kruskal_wallis->df},
                                 {"p_value", t.kruskal_wallis->p_value}};
    else
      entry["kruskal_wallis"] = nullptr;
    ordered_json dunn = ordered_json::array();
    for (const PairwiseResult& p : t.dunn)
      dunn.push_back({{"a", r.model_ids.at(p.pair.first)},
                      {"b", r.model_ids.at(p.pair.second)},
                      {"z", p.z},
                      {"p_raw", p.p_raw},
                      {"p_adjusted", p.p_adjusted}});
    entry["dunn"] = std::move(dunn);
    entry["error"] = t.error ? ordered_json(*t.error) : ordered_json(nullptr);
    tests[std::string(to_string(t.metric))] = std::move(entry);
  }
  doc["tests"] = std::move(tests);
  return doc.dump(2) + "\n";
}

EvaluationReport report_from_json(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    malformed(e.what());
  }
  if (!doc.is_object() || doc.value("format", std::string()) != kFormatTag) malformed("not a voxmetric report");
  if (doc.value("version", 0) != kFormatVersion) malformed("unsupported report version");

  try {
    EvaluationReport r;
    r.with_bone_subtraction = field(doc, "with_bone_subtraction").get<bool>();
    r.model_ids = field(doc, "models").get<std::vector<std::string>>();

    for (const ordered_json& rec : field(doc, "records")) {
      MetricRecord m;
      m.patient_id = string_field(rec, "patient_id");
      m.model_id = string_field(rec, "model_id");
      if (const ordered_json& f = field(rec, "fold"); !f.is_null()) m.fold = f.get<int>();
      m.dsc = number(rec, "dsc");
      m.hd_mm = optional_number(rec, "hd_mm");
      m.hd95_mm = optional_number(rec, "hd95_mm");
      m.dsc_bones_excluded = optional_number(rec, "dsc_bones_excluded");
      model_index(r, m.model_id);
      r.records.push_back(std::move(m));
    }
    for (const ordered_json& f : field(doc, "failures"))
      r.failures.push_back({string_field(f, "patient_id"), string_field(f, "model_id"), string_field(f, "reason")});

    const ordered_json& summaries = field(doc, "summaries");
    for (const auto& [model_id, per_metric] : summaries.items()) {
      ModelSummary s{model_id, {}};
      for (Metric m : kAllMetrics) {
        const ordered_json& v = field(per_metric, std::string(to_string(m)).c_str());
        if (v.is_null()) continue;
        s.by_metric[static_cast<std::size_t>(m)] = Summary{field(v, "n").get<std::size_t>(),
                                                           number(v, "median"), number(v, "min"),
                                                           number(v, "max"),    number(v, "q1"),
                                                           number(v, "q3")};
      }
      r.summaries.push_back(std::move(s));
    }

    for (const auto& [name, entry] : field(doc, "tests").items()) {
      MetricTests t;
      t.metric = parse_metric(name);
      if (const ordered_json& kw = field(entry, "kruskal_wallis"); !kw.is_null())
        t.kruskal_wallis = TestResult{TestKind::KruskalWallis, number(kw, "statistic"), number(kw, "df"),
                                      number(kw, "p_value")};
      for (const ordered_json& p : field(entry, "dunn"))
        t.dunn.push_back({{model_index(r, string_field(p, "a")), model_index(r, string_field(p, "b"))},
                          number(p, "z"),
                          number(p, "p_raw"),
                          number(p, "p_adjusted")});
      if (const ordered_json& e = field(entry, "error"); !e.is_null()) t.error = e.get<std::string>();
      r.tests.push_back(std::move(t));
    }
    return r;
  } catch (const ordered_json::exception& e) {
    malformed(e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::MalformedFile) throw;
    malformed(e.what());
  }
}

std::string report_to_csv(const EvaluationReport& r) {
  std::string out = "patient_id,model_id,dsc,hd_mm,hd95_mm,dsc_bones_excluded\n";
  for (const MetricRecord& rec : r.records) {
    append_csv_field(out, rec.patient_id);
    out += ',';
    append_csv_field(out, rec.model_id);
    for (Metric m : kAllMetrics) {
      out += ',';
      if (const auto v = metric_value(rec, m)) append_number(out, *v);
    }
    out += '\n';
  }
  return out;
}

void emit_report(const EvaluationReport& report, ReportFormat format, const std::filesystem::path& path) {
  write_file(path, format == ReportFormat::Csv ? report_to_csv(report) : report_to_json(report));
}

EvaluationReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingArtifact, path.string() + ": cannot open report");
  std::ostringstream text;
  text << in.rdbuf();
  return report_from_json(text.str());
}

}  // namespace voxmetric
