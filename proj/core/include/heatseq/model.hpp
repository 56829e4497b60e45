#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heatseq/matrix.hpp"
#include "heatseq/rng.hpp"
#include "heatseq/types.hpp"

namespace heatseq {

enum class Variant { Lstm, LstmAttention };

std::string_view to_string(Variant v);  // "lstm" / "lstm-am"
std::optional<Variant> parse_variant(std::string_view s);

struct ModelConfig {
  Variant variant = Variant::LstmAttention;
  std::size_t layers = 2;
  std::size_t hidden = 128;
  std::size_t input_dim = 0;
  // 0 means "same as hidden".
  std::size_t attention_dim = 0;
  double dropout = 0.3;

  std::size_t resolved_attention_dim() const { return attention_dim == 0 ? hidden : attention_dim; }
  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Gate blocks are stacked [input, forget, candidate, output], each `hidden` rows tall.
struct LstmLayerParams {
  Matrix w_input;      // 4H x D
  Matrix w_recurrent;  // 4H x H
  std::vector<double> bias;  // 4H
  friend bool operator==(const LstmLayerParams&, const LstmLayerParams&) = default;
};

struct AttentionParams {
  Matrix w_score;              // A x H
  std::vector<double> b_score; // A
  std::vector<double> v_score; // A
  friend bool operator==(const AttentionParams&, const AttentionParams&) = default;
};

struct ModelParams {
  ModelConfig config;
  std::vector<LstmLayerParams> layers;
  std::optional<AttentionParams> attention;
  Matrix w_out;               // 3 x H
  std::vector<double> b_out;  // 3

  /// Visits every tensor in checkpoint order as (name, flat row-major values).
  template <typename Fn>
  void for_each_tensor(Fn&& fn) {
    visit(*this, fn);
  }
  template <typename Fn>
  void for_each_tensor(Fn&& fn) const {
    visit(*this, fn);
  }

  /// Same shapes, all zeros. Used for gradients and optimizer moments.
  ModelParams zeros_like() const;
  std::size_t parameter_count() const;
  bool all_finite() const;
  /// Throws ShapeError unless every tensor matches `config`.
  void check_shapes() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  template <typename Self, typename Fn>
  static void visit(Self& self, Fn& fn) {
    for (std::size_t l = 0; l < self.layers.size(); ++l) {
      const std::string prefix = "layer" + std::to_string(l) + ".";
      fn(prefix + "w_input", self.layers[l].w_input.values());
      fn(prefix + "w_recurrent", self.layers[l].w_recurrent.values());
      fn(prefix + "bias", std::span(self.layers[l].bias));
    }
    if (self.attention) {
      fn(std::string("attention.w_score"), self.attention->w_score.values());
      fn(std::string("attention.b_score"), std::span(self.attention->b_score));
      fn(std::string("attention.v_score"), std::span(self.attention->v_score));
    }
    fn(std::string("output.w_out"), self.w_out.values());
    fn(std::string("output.b_out"), std::span(self.b_out));
  }
};

using Gradients = ModelParams;

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases except the forget gate (1.0).
ModelParams init_params(const ModelConfig& config, Rng& rng);

enum class Mode { Train, Infer };

struct LayerTrace {
  // All per-timestep matrices are batch x width.
  std::vector<Matrix> input;      // layer input x_t (dropped output of the layer below)
  std::vector<Matrix> gates;      // activated [i f g o], batch x 4H
  std::vector<Matrix> cell;       // c_t
  std::vector<Matrix> cell_tanh;  // tanh(c_t)
  std::vector<Matrix> hidden;     // h_t before dropout
  std::vector<Matrix> mask;       // inverted-dropout multipliers; empty in infer mode
  std::vector<Matrix> output;     // h_t after dropout
};

/// Everything backward() needs, for a batch of equal-length sequences.
struct ForwardTrace {
  Mode mode = Mode::Infer;
  std::size_t batch = 0;
  std::size_t steps = 0;
  std::vector<LayerTrace> layers;
  std::vector<Matrix> score_hidden;  // attention: tanh(W h_t + b), batch x A per step
  Matrix scores;                     // attention: batch x T
  Matrix weights;                    // attention: batch x T
  Matrix features;                   // classifier input (h_T or context), batch x H
  Matrix logits;                     // batch x 3
  Matrix probabilities;              // batch x 3

  std::vector<double> attention_weights(std::size_t b) const;
  std::array<double, kNumClasses> class_probabilities(std::size_t b) const;
};

/// Runs the stacked LSTM (and attention pooling for the attention variant) over
/// every sequence in `batch`. Each sequence is a T x D matrix; all must share T.
/// Train mode needs `rng` for dropout masks.
ForwardTrace forward(const ModelParams& params, std::span<const Matrix> batch, Mode mode,
                     Rng* rng = nullptr);
ForwardTrace forward(const ModelParams& params, const Matrix& sequence, Mode mode, Rng* rng = nullptr);

/// Gradient of the summed cross-entropy loss over the traced batch.
Gradients backward(const ModelParams& params, const ForwardTrace& trace, std::span<const RiskLevel> targets);
Gradients backward(const ModelParams& params, const ForwardTrace& trace, RiskLevel target);

/// Lowest class index wins ties.
RiskLevel argmax_label(std::span<const double> probabilities);

struct Prediction {
  RiskLevel label = RiskLevel::Low;
  std::array<double, kNumClasses> probabilities{};
  std::optional<std::vector<double>> attention_weights;
};

Prediction predict(const ModelParams& params, const Matrix& sequence);
std::vector<Prediction> predict_batch(const ModelParams& params, std::span<const Matrix> batch);

}  // namespace heatseq
