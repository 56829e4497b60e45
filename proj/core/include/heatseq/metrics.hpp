#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "heatseq/types.hpp"

namespace heatseq {

/// Rows are actual classes, columns predicted (Low, Moderate, High).
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  std::uint64_t total() const;
  std::uint64_t at(RiskLevel actual, RiskLevel predicted) const {
    return counts[index_of(actual)][index_of(predicted)];
  }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Throws ArgumentError on length mismatch or empty input.
ConfusionMatrix build_confusion(std::span<const RiskLevel> actual, std::span<const RiskLevel> predicted);

/// One-vs-rest counts for a single class.
struct BinaryCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  friend bool operator==(const BinaryCounts&, const BinaryCounts&) = default;
};
BinaryCounts one_vs_rest(const ConfusionMatrix& cm, RiskLevel cls);

/// Severity-ordered error split: predictions above the actual level (false alarms)
/// and below it (missed risk).
struct SeverityErrors {
  std::uint64_t over_predicted = 0;
  std::uint64_t under_predicted = 0;
};
SeverityErrors severity_errors(const ConfusionMatrix& cm);

struct ClassScores {
  BinaryCounts counts;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;  // one-vs-rest: (TP + TN) / total
  std::uint64_t support = 0;
  // Set when the metric's denominator was zero and 0 was reported instead.
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
};

struct ClassMetrics {
  std::array<ClassScores, kNumClasses> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double overall_accuracy = 0.0;
};

/// Throws ArgumentError when the matrix is empty.
ClassMetrics compute_metrics(const ConfusionMatrix& cm);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  RiskLevel cls = RiskLevel::Low;
  std::vector<RocPoint> points;  // empty when undefined
  std::optional<double> auc;     // absent when the class has no positives or no negatives
};

struct RocSet {
  std::array<RocCurve, kNumClasses> curves;
  std::optional<double> macro_auc;  // mean over the defined classes
};

/// One-vs-rest ROC on exact distinct-score thresholds; tied scores form one step.
/// `positive` holds 1 for members of the class; it must match `scores` in length.
RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> positive);

/// Probabilities are per-instance class distributions that must sum to 1 within 1e-9.
RocSet roc_auc(std::span<const RiskLevel> actual, std::span<const std::array<double, kNumClasses>> probabilities);

}  // namespace heatseq
