#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include <heatseq/errors.hpp>
#include <heatseq/model.hpp>

#include "attention_checks.hpp"

namespace heatseq {
namespace {

ModelConfig config(Variant v, std::size_t hidden = 8, std::size_t dim = 5) {
  ModelConfig c;
  c.variant = v;
  c.hidden = hidden;
  c.input_dim = dim;
  return c;
}

Matrix random_input(std::size_t steps, std::size_t dim, Rng& rng) {
  Matrix x(steps, dim);
  for (double& v : x.values()) v = rng.uniform(0.0, 1.0);
  return x;
}

TEST(InitParams, TableShapes) {
  Rng rng(1);
  const ModelParams p = init_params(config(Variant::LstmAttention, 128, 10), rng);
  ASSERT_EQ(p.layers.size(), 2u);
  EXPECT_EQ(p.layers[0].w_input.rows(), 512u);
  EXPECT_EQ(p.layers[0].w_input.cols(), 10u);
  EXPECT_EQ(p.layers[0].w_recurrent.rows(), 512u);
  EXPECT_EQ(p.layers[0].w_recurrent.cols(), 128u);
  EXPECT_EQ(p.layers[0].bias.size(), 512u);
  EXPECT_EQ(p.layers[1].w_input.cols(), 128u);
  ASSERT_TRUE(p.attention.has_value());
  EXPECT_EQ(p.attention->w_score.rows(), 128u);
  EXPECT_EQ(p.w_out.rows(), 3u);
  EXPECT_EQ(p.w_out.cols(), 128u);
  EXPECT_NO_THROW(p.check_shapes());
}

TEST(InitParams, RangesAndForgetBias) {
  Rng rng(2);
  const ModelParams p = init_params(config(Variant::Lstm, 16, 9), rng);
  for (double w : p.layers[0].w_input.values()) EXPECT_LE(std::abs(w), 1.0 / 3.0);
  for (double w : p.layers[0].w_recurrent.values()) EXPECT_LE(std::abs(w), 0.25);
  for (std::size_t r = 0; r < 64; ++r) EXPECT_EQ(p.layers[0].bias[r], r >= 16 && r < 32 ? 1.0 : 0.0);
}

TEST(InitParams, SameSeedSameParams) {
  Rng a(3), b(3);
  EXPECT_EQ(init_params(config(Variant::LstmAttention), a), init_params(config(Variant::LstmAttention), b));
}

TEST(InitParams, BaselineHasNoAttention) {
  Rng rng(4);
  EXPECT_FALSE(init_params(config(Variant::Lstm), rng).attention.has_value());
}

TEST(InitParams, ZeroDimsRejected) {
  Rng rng(5);
  EXPECT_THROW(init_params(config(Variant::Lstm, 0, 5), rng), ArgumentError);
  EXPECT_THROW(init_params(config(Variant::Lstm, 8, 0), rng), ArgumentError);
}

TEST(Forward, ZeroWeightsGiveSoftmaxOfOutputBias) {
  for (Variant v : {Variant::Lstm, Variant::LstmAttention}) {
    Rng rng(6);
    ModelParams p = init_params(config(v), rng).zeros_like();
    p.b_out = {0.3, -1.2, 2.0};
    const Matrix x = random_input(7, 5, rng);
    const ForwardTrace tr = forward(p, x, Mode::Infer);
    for (const LayerTrace& lt : tr.layers)
      for (const Matrix& h : lt.hidden)
        for (double x : h.values()) EXPECT_EQ(x, 0.0);
    const auto expect = softmax(p.b_out);
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_EQ(tr.logits(0, c), p.b_out[c]);
      EXPECT_NEAR(tr.probabilities(0, c), expect[c], 1e-15);
    }
  }
}

TEST(Forward, SingleStepAttentionIsIdentity) {
  Rng rng(7);
  const ModelParams p = init_params(config(Variant::LstmAttention), rng);
  const ForwardTrace tr = forward(p, random_input(1, 5, rng), Mode::Infer);
  EXPECT_EQ(tr.weights(0, 0), 1.0);
  for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(tr.features(0, j), tr.layers.back().output[0](0, j));
}

TEST(Forward, IdenticalStatesGiveUniformWeights) {
  for (std::size_t steps : {2u, 5u, 15u}) {
    for (double w : testing::weights_for_identical_states(steps, 8)) EXPECT_NEAR(w, 1.0 / steps, 1e-12);
  }
}

TEST(Forward, AttentionIsADistribution) {
  const auto s = testing::attention_sweep(2000, 9);
  EXPECT_GE(s.min_weight, 0.0);
  EXPECT_LE(s.max_sum_error, 1e-12);
}

TEST(Forward, DimensionMismatchThrows) {
  Rng rng(10);
  const ModelParams p = init_params(config(Variant::Lstm), rng);
  EXPECT_THROW(forward(p, random_input(4, 6, rng), Mode::Infer), ShapeError);
  const std::vector<Matrix> ragged{random_input(4, 5, rng), random_input(3, 5, rng)};
  EXPECT_THROW(forward(p, ragged, Mode::Infer), ShapeError);
  EXPECT_THROW(forward(p, random_input(4, 5, rng), Mode::Train), ArgumentError);
}

TEST(Forward, InferModeIsDeterministicAndMaskFree) {
  Rng rng(11);
  const ModelParams p = init_params(config(Variant::LstmAttention), rng);
  const Matrix x = random_input(6, 5, rng);
  const ForwardTrace a = forward(p, x, Mode::Infer);
  const ForwardTrace b = forward(p, x, Mode::Infer);
  EXPECT_EQ(a.probabilities, b.probabilities);
  EXPECT_TRUE(a.layers[0].mask.empty());
}

TEST(Forward, BatchMatchesSingleSequences) {
  Rng rng(12);
  const ModelParams p = init_params(config(Variant::LstmAttention), rng);
  std::vector<Matrix> batch;
  for (int i = 0; i < 5; ++i) batch.push_back(random_input(6, 5, rng));
  const ForwardTrace all = forward(p, batch, Mode::Infer);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const ForwardTrace one = forward(p, batch[b], Mode::Infer);
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(all.probabilities(b, c), one.probabilities(0, c));
  }
}

TEST(Dropout, InvertedMaskKeepsExpectation) {
  Rng rng(13);
  ModelConfig c = config(Variant::Lstm, 10, 3);
  c.layers = 1;
  const ModelParams p = init_params(c, rng);
  const Matrix x = random_input(2, 3, rng);
  double sum = 0.0;
  std::size_t n = 0, dropped = 0;
  for (int pass = 0; pass < 10000; ++pass) {
    const ForwardTrace tr = forward(p, x, Mode::Train, &rng);
    for (const Matrix& m : tr.layers[0].mask)
      for (double v : m.values()) {
        EXPECT_TRUE(v == 0.0 || v == 1.0 / 0.7);
        sum += v;
        dropped += v == 0.0;
        ++n;
      }
    // The recurrence runs on the undropped state.
    for (std::size_t t = 0; t < 2; ++t)
      for (std::size_t j = 0; j < 10; ++j)
        EXPECT_EQ(tr.layers[0].output[t](0, j), tr.layers[0].hidden[t](0, j) * tr.layers[0].mask[t](0, j));
  }
  EXPECT_NEAR(sum / static_cast<double>(n), 1.0, 0.02);
  EXPECT_NEAR(static_cast<double>(dropped) / static_cast<double>(n), 0.3, 0.02 * 0.3);
}

TEST(Predict, ArgmaxAndTies) {
  EXPECT_EQ(argmax_label(std::vector<double>{0.1, 0.7, 0.2}), RiskLevel::Moderate);
  EXPECT_EQ(argmax_label(std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}), RiskLevel::Low);
  EXPECT_EQ(argmax_label(std::vector<double>{0.2, 0.4, 0.4}), RiskLevel::Moderate);
}

TEST(Predict, BaselineHasNoWeights) {
  Rng rng(14);
  const Prediction p = predict(init_params(config(Variant::Lstm), rng), random_input(4, 5, rng));
  EXPECT_FALSE(p.attention_weights.has_value());
  const Prediction q = predict(init_params(config(Variant::LstmAttention), rng), random_input(4, 5, rng));
  ASSERT_TRUE(q.attention_weights.has_value());
  EXPECT_EQ(q.attention_weights->size(), 4u);
}

TEST(Predict, BatchOrderDoesNotMatter) {
  Rng rng(15);
  const ModelParams p = init_params(config(Variant::LstmAttention), rng);
  std::vector<Matrix> batch;
  for (int i = 0; i < 8; ++i) batch.push_back(random_input(5, 5, rng));
  const auto forward_order = predict_batch(p, batch);
  std::vector<Matrix> reversed(batch.rbegin(), batch.rend());
  const auto backward_order = predict_batch(p, reversed);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    EXPECT_EQ(forward_order[i].probabilities, backward_order[batch.size() - 1 - i].probabilities);
    EXPECT_EQ(forward_order[i].label, backward_order[batch.size() - 1 - i].label);
  }
}

TEST(Backward, MismatchedTraceThrows) {
  Rng rng(16);
  const ModelParams a = init_params(config(Variant::LstmAttention), rng);
  const ModelParams b = init_params(config(Variant::Lstm), rng);
  const ForwardTrace tr = forward(a, random_input(3, 5, rng), Mode::Infer);
  EXPECT_THROW(backward(b, tr, RiskLevel::Low), StateError);
  const std::vector<RiskLevel> two{RiskLevel::Low, RiskLevel::High};
  EXPECT_THROW(backward(a, tr, two), StateError);
}

}  // namespace
}  // namespace heatseq
