#include "heatseq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "heatseq/errors.hpp"

namespace heatseq {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t n = 0;
  for (const auto& row : counts)
    for (auto v : row) n += v;
  return n;
}

ConfusionMatrix build_confusion(std::span<const RiskLevel> actual, std::span<const RiskLevel> predicted) {
  if (actual.size() != predicted.size()) {
    throw ArgumentError("build_confusion: " + std::to_string(actual.size()) + " actual vs " +
                        std::to_string(predicted.size()) + " predicted labels");
  }
  if (actual.empty()) throw ArgumentError("build_confusion: no labels");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < actual.size(); ++i) ++cm.counts[index_of(actual[i])][index_of(predicted[i])];
  return cm;
}

BinaryCounts one_vs_rest(const ConfusionMatrix& cm, RiskLevel cls) {
  const std::size_t k = index_of(cls);
  BinaryCounts b;
  for (std::size_t a = 0; a < kNumClasses; ++a) {
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      const auto n = cm.counts[a][p];
      if (a == k && p == k) b.tp += n;
      else if (p == k) b.fp += n;
      else if (a == k) b.fn += n;
      else b.tn += n;
    }
  }
  return b;
}

SeverityErrors severity_errors(const ConfusionMatrix& cm) {
  SeverityErrors e;
  for (std::size_t a = 0; a < kNumClasses; ++a) {
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      if (p > a) e.over_predicted += cm.counts[a][p];
      if (p < a) e.under_predicted += cm.counts[a][p];
    }
  }
  return e;
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den, bool& undefined) {
  undefined = den == 0;
  return undefined ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ClassMetrics compute_metrics(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) throw ArgumentError("compute_metrics: empty confusion matrix");
  ClassMetrics m;
  std::uint64_t trace = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    trace += cm.counts[k][k];
    ClassScores& s = m.per_class[k];
    s.counts = one_vs_rest(cm, static_cast<RiskLevel>(k));
    const BinaryCounts& b = s.counts;
    s.support = b.tp + b.fn;
    s.precision = ratio(b.tp, b.tp + b.fp, s.precision_undefined);
    s.recall = ratio(b.tp, b.tp + b.fn, s.recall_undefined);
    const double pr = s.precision + s.recall;
    s.f1_undefined = pr == 0.0;
    s.f1 = s.f1_undefined ? 0.0 : 2.0 * s.precision * s.recall / pr;
    s.accuracy = static_cast<double>(b.tp + b.tn) / static_cast<double>(total);
    m.macro_precision += s.precision / kNumClasses;
    m.macro_recall += s.recall / kNumClasses;
    m.macro_f1 += s.f1 / kNumClasses;
  }
  m.overall_accuracy = static_cast<double>(trace) / static_cast<double>(total);
  return m;
}

RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> positive) {
  if (scores.size() != positive.size()) throw ArgumentError("roc_curve: scores and labels differ in length");
  RocCurve curve;
  const auto pos = static_cast<std::uint64_t>(std::count_if(positive.begin(), positive.end(), [](std::uint8_t p) { return p != 0; }));
  const std::uint64_t neg = positive.size() - pos;
  if (pos == 0 || neg == 0) return curve;

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  curve.points.push_back({0.0, 0.0});
  std::uint64_t tp = 0, fp = 0;
  double area2 = 0.0;  // twice the area, in count units
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    const std::uint64_t tp0 = tp, fp0 = fp;
    while (i < order.size() && scores[order[i]] == threshold) {
      (positive[order[i]] ? tp : fp) += 1;
      ++i;
    }
    area2 += static_cast<double>(fp - fp0) * static_cast<double>(tp + tp0);
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                            static_cast<double>(tp) / static_cast<double>(pos)});
  }
  curve.auc = area2 / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return curve;
}

RocSet roc_auc(std::span<const RiskLevel> actual, std::span<const std::array<double, kNumClasses>> probabilities) {
  if (actual.size() != probabilities.size()) throw ArgumentError("roc_auc: labels and probabilities differ in length");
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const auto& p = probabilities[i];
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ArgumentError("roc_auc: probabilities of instance " + std::to_string(i) + " sum to " + std::to_string(sum));
    }
  }
  RocSet set;
  std::vector<double> scores(actual.size());
  std::vector<std::uint8_t> positive(actual.size());
  double sum = 0.0;
  int defined = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    for (std::size_t i = 0; i < actual.size(); ++i) {
      scores[i] = probabilities[i][k];
      positive[i] = index_of(actual[i]) == k;
    }
    set.curves[k] = roc_curve(scores, positive);
    set.curves[k].cls = static_cast<RiskLevel>(k);
    if (set.curves[k].auc) {
      sum += *set.curves[k].auc;
      ++defined;
    }
  }
  if (defined > 0) set.macro_auc = sum / defined;
  return set;
}

}  // namespace heatseq
