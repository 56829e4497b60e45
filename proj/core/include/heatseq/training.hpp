#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "heatseq/errors.hpp"
#include "heatseq/model.hpp"
#include "heatseq/sequences.hpp"

namespace heatseq {

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 20;
  std::size_t patience = 5;
  double min_improvement = 1e-6;
  double dropout = 0.3;
  std::uint64_t seed = 0;
  // Worker threads for gradient evaluation. Results do not depend on this.
  std::size_t threads = 1;

  /// 20 epochs for the baseline, 50 for the attention variant; the rest is shared.
  static TrainConfig defaults_for(Variant v);
  void validate() const;
};

/// Bias-corrected Adam moments, mirroring the parameter tensors.
struct AdamState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  ModelParams m;
  ModelParams v;
  std::uint64_t step = 0;

  static AdamState for_params(const ModelParams& params);
};

/// One Adam update in checkpoint tensor order. Validates the whole gradient first and
/// throws NonFiniteGradientError (tensor name, flat index) without touching anything.
void adam_step(ModelParams& params, const Gradients& grads, AdamState& state, double learning_rate);

inline constexpr double kMinProbability = 1e-12;

/// -ln p_target, with p_target clamped to kMinProbability; `clamped` reports the clamp.
double cross_entropy_loss(std::span<const double> probabilities, RiskLevel target, bool* clamped = nullptr);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double seconds = 0.0;
};

enum class StopReason { MaxEpochs, EarlyStop };
std::string_view to_string(StopReason r);

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::optional<StopReason> stop_reason;
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
  std::size_t clamped_probabilities = 0;
};

/// Patience-based stopping on validation loss.
class EarlyStopping {
 public:
  EarlyStopping(std::size_t patience, double min_improvement) : patience_(patience), min_improvement_(min_improvement) {}

  /// Records one epoch; true when it is a new best.
  bool update(double val_loss);
  bool should_stop() const { return stale_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_; }

 private:
  std::size_t patience_;
  double min_improvement_;
  std::size_t epoch_ = 0;
  std::size_t best_epoch_ = 0;
  std::size_t stale_ = 0;
  double best_ = 0.0;
};

struct BatchGradient {
  Gradients grads;  // gradient of the summed loss
  double loss_sum = 0.0;
  std::size_t clamped = 0;
};

/// Train-mode forward/backward over `batch`, split into fixed chunks whose results are
/// summed in chunk order, so the answer is the same for any thread count.
BatchGradient batch_gradient(const ModelParams& params, std::span<const SequenceInstance* const> batch,
                             Rng& rng, std::size_t threads = 1);

struct LossAccuracy {
  double loss = 0.0;
  double accuracy = 0.0;
  std::size_t clamped = 0;
};

/// Infer-mode mean loss and accuracy.
LossAccuracy evaluate_loss(const ModelParams& params, std::span<const SequenceInstance> data, std::size_t threads = 1);

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, ModelParams last_good, TrainLog log)
      : Error(what), last_good_(std::move(last_good)), log_(std::move(log)) {}
  const ModelParams& last_good() const { return last_good_; }
  const TrainLog& log() const { return log_; }

 private:
  ModelParams last_good_;
  TrainLog log_;
};

struct TrainResult {
  ModelParams params;
  TrainLog log;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam with early stopping on validation loss. Returns the parameters of
/// the best validation epoch. Throws DivergenceError (carrying those parameters) when
/// the loss stops being finite.
TrainResult train(ModelConfig model_config, std::span<const SequenceInstance> train_set,
                  std::span<const SequenceInstance> validation_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

}  // namespace heatseq
