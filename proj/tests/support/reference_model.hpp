#pragma once

// Straight-line re-implementation of the forward pass and the summed cross-entropy,
// templated on the scalar so it can run in binary128 for finite differences.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <heatseq/model.hpp>

#if defined(__SIZEOF_FLOAT128__) && defined(HEATSEQ_WITH_QUAD)
#include <quadmath.h>
#endif

namespace heatseq::testing {

inline double r_tanh(double x) { return std::tanh(x); }
inline double r_exp(double x) { return std::exp(x); }
inline double r_log(double x) { return std::log(x); }

#if defined(__SIZEOF_FLOAT128__) && defined(HEATSEQ_WITH_QUAD)
using quad = __float128;
inline quad r_tanh(quad x) { return tanhq(x); }
inline quad r_exp(quad x) { return expq(x); }
inline quad r_log(quad x) { return logq(x); }
#endif

template <typename T>
T r_sigmoid(T x) {
  return T(1) / (T(1) + r_exp(-x));
}

// Every parameter, flattened in checkpoint order.
template <typename T>
std::vector<T> flatten(const ModelParams& p) {
  std::vector<T> out;
  p.for_each_tensor([&](const std::string&, auto values) {
    for (double v : values) out.push_back(T(v));
  });
  return out;
}

template <typename T>
struct RefOutput {
  T loss = T(0);
  std::vector<std::vector<T>> logits;   // batch x 3
  std::vector<std::vector<T>> weights;  // batch x steps, attention only
};

/// `masks[l][t]` is the batch x H dropout multiplier matrix (empty: no dropout).
template <typename T>
RefOutput<T> reference_forward(const ModelConfig& cfg, const std::vector<T>& theta, std::span<const Matrix> batch,
                               const std::vector<std::vector<Matrix>>& masks, std::span<const RiskLevel> targets) {
  const std::size_t H = cfg.hidden;
  const std::size_t G = 4 * H;
  const std::size_t steps = batch.front().rows();
  std::size_t pos = 0;
  auto take = [&](std::size_t n) {
    const std::size_t at = pos;
    pos += n;
    return at;
  };

  struct Layer {
    std::size_t w_in, w_rec, bias, in_dim;
  };
  std::vector<Layer> layers;
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const std::size_t d = l == 0 ? cfg.input_dim : H;
    Layer L;
    L.in_dim = d;
    L.w_in = take(G * d);
    L.w_rec = take(G * H);
    L.bias = take(G);
    layers.push_back(L);
  }
  const bool attention = cfg.variant == Variant::LstmAttention;
  const std::size_t A = cfg.resolved_attention_dim();
  std::size_t w_score = 0, b_score = 0, v_score = 0;
  if (attention) {
    w_score = take(A * H);
    b_score = take(A);
    v_score = take(A);
  }
  const std::size_t w_out = take(3 * H);
  const std::size_t b_out = take(3);

  RefOutput<T> out;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    // seq[t][k]: input of the current layer
    std::vector<std::vector<T>> seq(steps);
    for (std::size_t t = 0; t < steps; ++t) {
      for (std::size_t k = 0; k < cfg.input_dim; ++k) seq[t].push_back(T(batch[b](t, k)));
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const Layer& L = layers[l];
      std::vector<T> h(H, T(0)), c(H, T(0));
      std::vector<std::vector<T>> next(steps, std::vector<T>(H));
      for (std::size_t t = 0; t < steps; ++t) {
        std::vector<T> z(G);
        for (std::size_t r = 0; r < G; ++r) {
          T acc = theta[L.bias + r];
          for (std::size_t k = 0; k < L.in_dim; ++k) acc += theta[L.w_in + r * L.in_dim + k] * seq[t][k];
          for (std::size_t k = 0; k < H; ++k) acc += theta[L.w_rec + r * H + k] * h[k];
          z[r] = acc;
        }
        for (std::size_t j = 0; j < H; ++j) {
          const T i = r_sigmoid(z[j]);
          const T f = r_sigmoid(z[H + j]);
          const T g = r_tanh(z[2 * H + j]);
          const T o = r_sigmoid(z[3 * H + j]);
          c[j] = f * c[j] + i * g;
          h[j] = o * r_tanh(c[j]);
          const T m = masks.empty() ? T(1) : T(masks[l][t](b, j));
          next[t][j] = h[j] * m;
        }
      }
      seq = std::move(next);
    }

    std::vector<T> feat(H, T(0));
    if (attention) {
      std::vector<T> e(steps);
      for (std::size_t t = 0; t < steps; ++t) {
        T score = T(0);
        for (std::size_t a = 0; a < A; ++a) {
          T u = theta[b_score + a];
          for (std::size_t k = 0; k < H; ++k) u += theta[w_score + a * H + k] * seq[t][k];
          score += theta[v_score + a] * r_tanh(u);
        }
        e[t] = score;
      }
      T mx = e[0];
      for (const T& x : e) mx = x > mx ? x : mx;
      T sum = T(0);
      for (T& x : e) {
        x = r_exp(x - mx);
        sum += x;
      }
      for (T& x : e) x /= sum;
      for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t k = 0; k < H; ++k) feat[k] += e[t] * seq[t][k];
      }
      out.weights.push_back(e);
    } else {
      feat = seq.back();
    }

    std::vector<T> logit(3);
    for (std::size_t c = 0; c < 3; ++c) {
      T acc = theta[b_out + c];
      for (std::size_t k = 0; k < H; ++k) acc += theta[w_out + c * H + k] * feat[k];
      logit[c] = acc;
    }
    T mx = logit[0];
    for (const T& x : logit) mx = x > mx ? x : mx;
    T z = T(0);
    for (const T& x : logit) z += r_exp(x - mx);
    out.loss += -(logit[index_of(targets[b])] - mx - r_log(z));
    out.logits.push_back(logit);
  }
  return out;
}

/// Dropout masks of a traced batch, in the layout reference_forward expects.
inline std::vector<std::vector<Matrix>> masks_of(const ForwardTrace& tr) {
  std::vector<std::vector<Matrix>> m;
  if (tr.layers.empty() || tr.layers.front().mask.empty()) return m;
  for (const LayerTrace& lt : tr.layers) m.push_back(lt.mask);
  return m;
}

}  // namespace heatseq::testing
