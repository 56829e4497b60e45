#include "heatseq/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "heatseq/dataset.hpp"
#include "heatseq/errors.hpp"

namespace heatseq {

namespace {

constexpr std::size_t kPredictChunk = 256;

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::vector<Prediction> predict_all(const ModelParams& params, std::span<const SequenceInstance> data) {
  std::vector<Prediction> out;
  out.reserve(data.size());
  std::vector<Matrix> xs;
  for (std::size_t lo = 0; lo < data.size(); lo += kPredictChunk) {
    const std::size_t hi = std::min(data.size(), lo + kPredictChunk);
    xs.clear();
    // forward() wants one T per call; sequences of a table always share it.
    for (std::size_t i = lo; i < hi; ++i) xs.push_back(data[i].features);
    for (Prediction& p : predict_batch(params, xs)) out.push_back(std::move(p));
  }
  return out;
}

EvalReport evaluate_model(const ModelParams& params, std::span<const SequenceInstance> data) {
  if (data.empty()) throw ArgumentError("evaluate: no test sequences");
  const std::size_t d = data.front().features.cols();
  if (d != params.config.input_dim) {
    throw ShapeError("checkpoint expects " + std::to_string(params.config.input_dim) + " features per step but the data has " +
                     std::to_string(d));
  }
  const std::vector<Prediction> preds = predict_all(params, data);
  std::vector<RiskLevel> actual, predicted;
  std::vector<std::array<double, kNumClasses>> probs;
  for (std::size_t i = 0; i < data.size(); ++i) {
    actual.push_back(data[i].label);
    predicted.push_back(preds[i].label);
    probs.push_back(preds[i].probabilities);
  }
  EvalReport r;
  r.instances = data.size();
  r.confusion = build_confusion(actual, predicted);
  r.severity = severity_errors(r.confusion);
  r.metrics = compute_metrics(r.confusion);
  r.roc = roc_auc(actual, probs);
  return r;
}

std::string report_json(const EvalReport& report, std::string_view checkpoint_id, std::string_view data_hash) {
  using J = nlohmann::ordered_json;
  J j;
  j["schema_version"] = kReportSchemaVersion;
  j["checkpoint_id"] = std::string(checkpoint_id);
  j["data_hash"] = std::string(data_hash);
  j["instances"] = report.instances;
  J names = J::array();
  for (RiskLevel r : kAllRiskLevels) names.push_back(std::string(to_string(r)));
  j["class_names"] = names;
  J cm = J::array();
  for (const auto& row : report.confusion.counts) cm.push_back(J(row));
  j["confusion_matrix"] = cm;
  j["severity_errors"] = {{"over_predicted", report.severity.over_predicted},
                          {"under_predicted", report.severity.under_predicted}};
  J per_class = J::object();
  for (RiskLevel r : kAllRiskLevels) {
    const ClassScores& s = report.metrics.per_class[index_of(r)];
    per_class[std::string(to_string(r))] = {
        {"tp", s.counts.tp},
        {"fp", s.counts.fp},
        {"fn", s.counts.fn},
        {"tn", s.counts.tn},
        {"precision", s.precision},
        {"recall", s.recall},
        {"f1", s.f1},
        {"accuracy_one_vs_rest", s.accuracy},
        {"support", s.support},
        {"precision_undefined", s.precision_undefined},
        {"recall_undefined", s.recall_undefined},
        {"f1_undefined", s.f1_undefined},
    };
  }
  j["per_class"] = per_class;
  j["macro"] = {{"precision", report.metrics.macro_precision},
                {"recall", report.metrics.macro_recall},
                {"f1", report.metrics.macro_f1},
                {"auc", optional_number(report.roc.macro_auc)}};
  j["overall_accuracy"] = report.metrics.overall_accuracy;
  J roc = J::object();
  for (const RocCurve& c : report.roc.curves) {
    J pts = J::array();
    for (const RocPoint& p : c.points) pts.push_back(J::array({p.fpr, p.tpr}));
    roc[std::string(to_string(c.cls))] = {{"auc", optional_number(c.auc)}, {"points", pts}};
  }
  j["roc"] = roc;
  return j.dump(2) + "\n";
}

void write_roc_csv(std::ostream& out, const RocSet& roc) {
  out << "class,fpr,tpr\n";
  for (const RocCurve& c : roc.curves)
    for (const RocPoint& p : c.points) out << to_string(c.cls) << ',' << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
}

std::string metrics_table(const EvalReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %9s %9s %9s %9s %8s\n", "class", "precision", "recall", "f1", "accuracy",
                "support");
  out += line;
  for (RiskLevel r : kAllRiskLevels) {
    const ClassScores& s = report.metrics.per_class[index_of(r)];
    std::snprintf(line, sizeof line, "%-10s %9.4f %9.4f %9.4f %9.4f %8llu\n", std::string(to_string(r)).c_str(),
                  s.precision, s.recall, s.f1, s.accuracy, static_cast<unsigned long long>(s.support));
    out += line;
  }
  const ClassMetrics& m = report.metrics;
  std::snprintf(line, sizeof line, "%-10s %9.4f %9.4f %9.4f %9s %8zu\n", "macro", m.macro_precision, m.macro_recall,
                m.macro_f1, "", report.instances);
  out += line;
  std::snprintf(line, sizeof line, "overall accuracy %.4f\n", m.overall_accuracy);
  out += line;
  if (report.roc.macro_auc) {
    std::snprintf(line, sizeof line, "macro AUC %.4f\n", *report.roc.macro_auc);
    out += line;
  }
  std::snprintf(line, sizeof line, "over-predicted %llu, under-predicted %llu\n",
                static_cast<unsigned long long>(report.severity.over_predicted),
                static_cast<unsigned long long>(report.severity.under_predicted));
  out += line;
  return out;
}

}  // namespace heatseq
