#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heatseq/metrics.hpp"
#include "heatseq/model.hpp"
#include "heatseq/sequences.hpp"

namespace heatseq {

inline constexpr int kReportSchemaVersion = 1;

struct EvalReport {
  std::size_t instances = 0;
  ConfusionMatrix confusion;
  SeverityErrors severity;
  ClassMetrics metrics;
  RocSet roc;
};

/// Infer-mode predictions over `data` and every metric built from them. Throws
/// ShapeError naming both dimensions when the data does not fit the model.
EvalReport evaluate_model(const ModelParams& params, std::span<const SequenceInstance> data);

/// Predictions in chunks, in input order.
std::vector<Prediction> predict_all(const ModelParams& params, std::span<const SequenceInstance> data);

std::string report_json(const EvalReport& report, std::string_view checkpoint_id, std::string_view data_hash);

// `class,fpr,tpr`
void write_roc_csv(std::ostream& out, const RocSet& roc);

/// Per-class precision / recall / F1 / accuracy table plus macro and overall rows.
std::string metrics_table(const EvalReport& report);

}  // namespace heatseq
