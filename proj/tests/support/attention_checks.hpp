#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <heatseq/model.hpp>
#include <heatseq/rng.hpp>

namespace heatseq::testing {

struct AttentionStats {
  std::size_t passes = 0;
  double min_weight = 1.0;
  double max_sum_error = 0.0;  // max |sum_t a_t - 1|
};

/// Random models, random inputs, random lengths; infer and train mode alternate.
inline AttentionStats attention_sweep(std::size_t passes, std::uint64_t seed) {
  Rng rng(seed);
  AttentionStats s;
  for (std::size_t i = 0; i < passes; ++i) {
    ModelConfig cfg;
    cfg.variant = Variant::LstmAttention;
    cfg.layers = 1 + rng.below(2);
    cfg.hidden = 2 + rng.below(7);
    cfg.input_dim = 1 + rng.below(6);
    cfg.attention_dim = 1 + rng.below(6);
    const ModelParams p = init_params(cfg, rng);
    const std::size_t steps = 1 + rng.below(20);
    const double scale = std::pow(10.0, rng.uniform(-1.0, 1.5));
    Matrix x(steps, cfg.input_dim);
    for (double& v : x.values()) v = rng.uniform(-scale, scale);
    const ForwardTrace tr = forward(p, x, i % 2 ? Mode::Train : Mode::Infer, &rng);
    double sum = 0.0;
    for (double w : tr.weights.values()) {
      s.min_weight = std::min(s.min_weight, w);
      sum += w;
    }
    s.max_sum_error = std::max(s.max_sum_error, std::abs(sum - 1.0));
    ++s.passes;
  }
  return s;
}

/// Attention weights when every step carries the same hidden state: constant input,
/// no recurrent weights and a closed forget gate, so h_t cannot drift.
inline std::vector<double> weights_for_identical_states(std::size_t steps, std::uint64_t seed) {
  Rng rng(seed);
  ModelConfig cfg;
  cfg.variant = Variant::LstmAttention;
  cfg.layers = 2;
  cfg.hidden = 6;
  cfg.input_dim = 4;
  cfg.dropout = 0.0;
  ModelParams p = init_params(cfg, rng);
  for (LstmLayerParams& l : p.layers) {
    l.w_recurrent.fill(0.0);
    for (std::size_t r = cfg.hidden; r < 2 * cfg.hidden; ++r) {
      for (double& v : l.w_input.row(r)) v = 0.0;
      l.bias[r] = -1e3;
    }
  }
  Matrix x(steps, cfg.input_dim);
  for (std::size_t k = 0; k < cfg.input_dim; ++k) {
    const double v = rng.uniform(-1.0, 1.0);
    for (std::size_t t = 0; t < steps; ++t) x(t, k) = v;
  }
  return forward(p, x, Mode::Infer).attention_weights(0);
}

}  // namespace heatseq::testing
