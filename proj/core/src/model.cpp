#include "heatseq/model.hpp"

#include <algorithm>
#include <cmath>

#include "heatseq/errors.hpp"

namespace heatseq {

namespace {

// y += a * x over n contiguous entries.
inline void axpy(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

inline double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void fill_uniform(std::span<double> values, double bound, Rng& rng) {
  for (double& v : values) v = rng.uniform(-bound, bound);
}

std::string shape_str(std::size_t r, std::size_t c) { return std::to_string(r) + "x" + std::to_string(c); }

void expect_shape(const Matrix& m, std::size_t r, std::size_t c, const char* name) {
  if (m.rows() != r || m.cols() != c) {
    throw ShapeError(std::string(name) + " is " + shape_str(m.rows(), m.cols()) + ", expected " +
                     shape_str(r, c));
  }
}

void expect_size(const std::vector<double>& v, std::size_t n, const char* name) {
  if (v.size() != n) {
    throw ShapeError(std::string(name) + " has " + std::to_string(v.size()) + " entries, expected " +
                     std::to_string(n));
  }
}

}  // namespace

std::string_view to_string(Variant v) { return v == Variant::Lstm ? "lstm" : "lstm-am"; }

std::optional<Variant> parse_variant(std::string_view s) {
  if (s == "lstm") return Variant::Lstm;
  if (s == "lstm-am") return Variant::LstmAttention;
  return std::nullopt;
}

void ModelConfig::validate() const {
  if (layers == 0 || hidden == 0 || input_dim == 0) {
    throw ArgumentError("model dimensions must be >= 1 (layers=" + std::to_string(layers) +
                        ", hidden=" + std::to_string(hidden) + ", input_dim=" + std::to_string(input_dim) +
                        ")");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ArgumentError("dropout must be in [0, 1)");
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  z.for_each_tensor([](const std::string&, std::span<double> v) { std::fill(v.begin(), v.end(), 0.0); });
  return z;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for_each_tensor([&](const std::string&, std::span<const double> v) { n += v.size(); });
  return n;
}

bool ModelParams::all_finite() const {
  bool ok = true;
  for_each_tensor([&](const std::string&, std::span<const double> v) {
    for (double x : v) ok = ok && std::isfinite(x);
  });
  return ok;
}

void ModelParams::check_shapes() const {
  config.validate();
  const std::size_t h = config.hidden;
  if (layers.size() != config.layers) throw ShapeError("layer count does not match config");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::size_t in = l == 0 ? config.input_dim : h;
    expect_shape(layers[l].w_input, 4 * h, in, "w_input");
    expect_shape(layers[l].w_recurrent, 4 * h, h, "w_recurrent");
    expect_size(layers[l].bias, 4 * h, "bias");
  }
  const bool wants_attention = config.variant == Variant::LstmAttention;
  if (wants_attention != attention.has_value()) {
    throw ShapeError("attention parameters must be present exactly for the lstm-am variant");
  }
  if (attention) {
    const std::size_t a = config.resolved_attention_dim();
    expect_shape(attention->w_score, a, h, "w_score");
    expect_size(attention->b_score, a, "b_score");
    expect_size(attention->v_score, a, "v_score");
  }
  expect_shape(w_out, kNumClasses, h, "w_out");
  expect_size(b_out, kNumClasses, "b_out");
}

ModelParams init_params(const ModelConfig& config, Rng& rng) {
  config.validate();
  const std::size_t h = config.hidden;
  ModelParams p;
  p.config = config;
  for (std::size_t l = 0; l < config.layers; ++l) {
    const std::size_t in = l == 0 ? config.input_dim : h;
    LstmLayerParams layer{Matrix(4 * h, in), Matrix(4 * h, h), std::vector<double>(4 * h, 0.0)};
    fill_uniform(layer.w_input.values(), 1.0 / std::sqrt(static_cast<double>(in)), rng);
    fill_uniform(layer.w_recurrent.values(), 1.0 / std::sqrt(static_cast<double>(h)), rng);
    std::fill(layer.bias.begin() + h, layer.bias.begin() + 2 * h, 1.0);
    p.layers.push_back(std::move(layer));
  }
  if (config.variant == Variant::LstmAttention) {
    const std::size_t a = config.resolved_attention_dim();
    AttentionParams att{Matrix(a, h), std::vector<double>(a, 0.0), std::vector<double>(a, 0.0)};
    fill_uniform(att.w_score.values(), 1.0 / std::sqrt(static_cast<double>(h)), rng);
    fill_uniform(att.v_score, 1.0 / std::sqrt(static_cast<double>(a)), rng);
    p.attention = std::move(att);
  }
  p.w_out = Matrix(kNumClasses, h);
  fill_uniform(p.w_out.values(), 1.0 / std::sqrt(static_cast<double>(h)), rng);
  p.b_out.assign(kNumClasses, 0.0);
  return p;
}

std::vector<double> ForwardTrace::attention_weights(std::size_t b) const {
  auto r = weights.row(b);
  return {r.begin(), r.end()};
}

std::array<double, kNumClasses> ForwardTrace::class_probabilities(std::size_t b) const {
  std::array<double, kNumClasses> out{};
  for (std::size_t c = 0; c < kNumClasses; ++c) out[c] = probabilities(b, c);
  return out;
}

ForwardTrace forward(const ModelParams& params, std::span<const Matrix> batch, Mode mode, Rng* rng) {
  const ModelConfig& cfg = params.config;
  if (batch.empty()) throw ArgumentError("forward: empty batch");
  const std::size_t steps = batch.front().rows();
  if (steps == 0) throw ShapeError("forward: sequence has no time steps");
  for (const Matrix& x : batch) {
    if (x.rows() != steps) throw ShapeError("forward: sequences in a batch must share their length");
    if (x.cols() != cfg.input_dim) {
      throw ShapeError("forward: input has " + std::to_string(x.cols()) + " features, model expects " +
                       std::to_string(cfg.input_dim));
    }
  }
  const bool use_dropout = mode == Mode::Train && cfg.dropout > 0.0;
  if (use_dropout && rng == nullptr) throw ArgumentError("forward: train mode needs an Rng");

  const std::size_t bsz = batch.size();
  const std::size_t h = cfg.hidden;
  const double keep = 1.0 - cfg.dropout;
  const double keep_scale = 1.0 / keep;

  ForwardTrace tr;
  tr.mode = mode;
  tr.batch = bsz;
  tr.steps = steps;
  tr.layers.resize(params.layers.size());

  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const LstmLayerParams& lp = params.layers[l];
    LayerTrace& lt = tr.layers[l];
    const std::size_t in_dim = lp.w_input.cols();
    const Matrix wt_in = lp.w_input.transposed();        // D x 4H
    const Matrix wt_rec = lp.w_recurrent.transposed();   // H x 4H

    if (l == 0) {
      lt.input.reserve(steps);
      for (std::size_t t = 0; t < steps; ++t) {
        Matrix xt(bsz, in_dim);
        for (std::size_t b = 0; b < bsz; ++b) {
          std::copy_n(batch[b].row(t).data(), in_dim, xt.row(b).data());
        }
        lt.input.push_back(std::move(xt));
      }
    } else {
      lt.input = tr.layers[l - 1].output;
    }

    for (std::size_t t = 0; t < steps; ++t) {
      Matrix z(bsz, 4 * h);
      Matrix c(bsz, h), ct(bsz, h), hid(bsz, h);
      for (std::size_t b = 0; b < bsz; ++b) {
        double* zr = z.row(b).data();
        std::copy(lp.bias.begin(), lp.bias.end(), zr);
        const double* xr = lt.input[t].row(b).data();
        for (std::size_t k = 0; k < in_dim; ++k) axpy(zr, xr[k], wt_in.row(k).data(), 4 * h);
        if (t > 0) {
          const double* hp = lt.hidden[t - 1].row(b).data();
          for (std::size_t k = 0; k < h; ++k) axpy(zr, hp[k], wt_rec.row(k).data(), 4 * h);
        }
        for (std::size_t j = 0; j < h; ++j) {
          zr[j] = sigmoid(zr[j]);
          zr[h + j] = sigmoid(zr[h + j]);
          zr[2 * h + j] = std::tanh(zr[2 * h + j]);
          zr[3 * h + j] = sigmoid(zr[3 * h + j]);
        }
        const double* cp = t > 0 ? lt.cell[t - 1].row(b).data() : nullptr;
        for (std::size_t j = 0; j < h; ++j) {
          const double cprev = cp ? cp[j] : 0.0;
          const double cv = zr[h + j] * cprev + zr[j] * zr[2 * h + j];
          c(b, j) = cv;
          ct(b, j) = std::tanh(cv);
          hid(b, j) = zr[3 * h + j] * ct(b, j);
        }
      }
      lt.gates.push_back(std::move(z));
      lt.cell.push_back(std::move(c));
      lt.cell_tanh.push_back(std::move(ct));
      if (use_dropout) {
        Matrix mask(bsz, h);
        Matrix out(bsz, h);
        for (std::size_t i = 0; i < mask.size(); ++i) {
          mask.data()[i] = rng->bernoulli(keep) ? keep_scale : 0.0;
          out.data()[i] = hid.data()[i] * mask.data()[i];
        }
        lt.mask.push_back(std::move(mask));
        lt.output.push_back(std::move(out));
      } else {
        lt.output.push_back(hid);
      }
      lt.hidden.push_back(std::move(hid));
    }
  }

  const LayerTrace& top = tr.layers.back();
  if (params.attention) {
    const AttentionParams& ap = *params.attention;
    const std::size_t a = ap.w_score.rows();
    const Matrix wt_score = ap.w_score.transposed();  // H x A
    tr.scores = Matrix(bsz, steps);
    tr.weights = Matrix(bsz, steps);
    tr.features = Matrix(bsz, h);
    for (std::size_t t = 0; t < steps; ++t) {
      Matrix u(bsz, a);
      for (std::size_t b = 0; b < bsz; ++b) {
        double* ur = u.row(b).data();
        std::copy(ap.b_score.begin(), ap.b_score.end(), ur);
        const double* hr = top.output[t].row(b).data();
        for (std::size_t k = 0; k < h; ++k) axpy(ur, hr[k], wt_score.row(k).data(), a);
        for (std::size_t j = 0; j < a; ++j) ur[j] = std::tanh(ur[j]);
        tr.scores(b, t) = dot(ap.v_score.data(), ur, a);
      }
      tr.score_hidden.push_back(std::move(u));
    }
    for (std::size_t b = 0; b < bsz; ++b) {
      const std::vector<double> w = softmax(tr.scores.row(b));
      std::copy(w.begin(), w.end(), tr.weights.row(b).data());
      double* ctx = tr.features.row(b).data();
      for (std::size_t t = 0; t < steps; ++t) axpy(ctx, w[t], top.output[t].row(b).data(), h);
    }
  } else {
    tr.features = top.output.back();
  }

  tr.logits = Matrix(bsz, kNumClasses);
  tr.probabilities = Matrix(bsz, kNumClasses);
  for (std::size_t b = 0; b < bsz; ++b) {
    const double* f = tr.features.row(b).data();
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      tr.logits(b, c) = params.b_out[c] + dot(params.w_out.row(c).data(), f, h);
    }
    const std::vector<double> p = softmax(tr.logits.row(b));
    std::copy(p.begin(), p.end(), tr.probabilities.row(b).data());
  }
  return tr;
}

ForwardTrace forward(const ModelParams& params, const Matrix& sequence, Mode mode, Rng* rng) {
  return forward(params, std::span<const Matrix>(&sequence, 1), mode, rng);
}

Gradients backward(const ModelParams& params, const ForwardTrace& tr, std::span<const RiskLevel> targets) {
  const ModelConfig& cfg = params.config;
  const std::size_t h = cfg.hidden;
  const std::size_t bsz = tr.batch;
  const std::size_t steps = tr.steps;
  if (targets.size() != bsz) throw StateError("backward: target count does not match traced batch");
  if (tr.layers.size() != params.layers.size() || tr.features.cols() != h ||
      tr.probabilities.rows() != bsz || params.attention.has_value() != !tr.score_hidden.empty()) {
    throw StateError("backward: trace was not produced by these parameters");
  }
  for (const LayerTrace& lt : tr.layers) {
    if (lt.gates.size() != steps || (!lt.gates.empty() && lt.gates.front().cols() != 4 * h)) {
      throw StateError("backward: trace layer dimensions do not match parameters");
    }
  }

  Gradients g = params.zeros_like();

  // Softmax + cross-entropy: dL/dlogits = p - onehot(target).
  Matrix d_logits = tr.probabilities;
  for (std::size_t b = 0; b < bsz; ++b) d_logits(b, index_of(targets[b])) -= 1.0;

  Matrix d_features(bsz, h);
  for (std::size_t b = 0; b < bsz; ++b) {
    const double* f = tr.features.row(b).data();
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const double dl = d_logits(b, c);
      g.b_out[c] += dl;
      axpy(g.w_out.row(c).data(), dl, f, h);
      axpy(d_features.row(b).data(), dl, params.w_out.row(c).data(), h);
    }
  }

  const LayerTrace& top = tr.layers.back();
  std::vector<Matrix> d_out(steps, Matrix(bsz, h));
  if (params.attention) {
    const AttentionParams& ap = *params.attention;
    AttentionParams& ga = *g.attention;
    const std::size_t a = ap.w_score.rows();
    std::vector<double> d_weight(steps), d_pre(a);
    for (std::size_t b = 0; b < bsz; ++b) {
      const double* df = d_features.row(b).data();
      double weighted = 0.0;
      for (std::size_t t = 0; t < steps; ++t) {
        const double w = tr.weights(b, t);
        d_weight[t] = dot(df, top.output[t].row(b).data(), h);
        weighted += w * d_weight[t];
        axpy(d_out[t].row(b).data(), w, df, h);
      }
      for (std::size_t t = 0; t < steps; ++t) {
        const double d_score = tr.weights(b, t) * (d_weight[t] - weighted);
        const double* u = tr.score_hidden[t].row(b).data();
        const double* ht = top.output[t].row(b).data();
        double* dh = d_out[t].row(b).data();
        for (std::size_t j = 0; j < a; ++j) {
          ga.v_score[j] += d_score * u[j];
          d_pre[j] = d_score * ap.v_score[j] * (1.0 - u[j] * u[j]);
          ga.b_score[j] += d_pre[j];
          axpy(ga.w_score.row(j).data(), d_pre[j], ht, h);
          axpy(dh, d_pre[j], ap.w_score.row(j).data(), h);
        }
      }
    }
  } else {
    d_out[steps - 1] = d_features;
  }

  for (std::size_t li = params.layers.size(); li-- > 0;) {
    const LstmLayerParams& lp = params.layers[li];
    LstmLayerParams& gl = g.layers[li];
    const LayerTrace& lt = tr.layers[li];
    const std::size_t in_dim = lp.w_input.cols();
    Matrix d_wt_in(in_dim, 4 * h);
    Matrix d_wt_rec(h, 4 * h);
    std::vector<Matrix> d_in(steps, Matrix(bsz, in_dim));
    Matrix dh_next(bsz, h), dc_next(bsz, h);
    std::vector<double> dz(4 * h);

    for (std::size_t t = steps; t-- > 0;) {
      for (std::size_t b = 0; b < bsz; ++b) {
        const double* gate = lt.gates[t].row(b).data();
        const double* ct = lt.cell_tanh[t].row(b).data();
        const double* cprev = t > 0 ? lt.cell[t - 1].row(b).data() : nullptr;
        const double* mask = lt.mask.empty() ? nullptr : lt.mask[t].row(b).data();
        const double* dout = d_out[t].row(b).data();
        double* dhn = dh_next.row(b).data();
        double* dcn = dc_next.row(b).data();
        for (std::size_t j = 0; j < h; ++j) {
          const double ig = gate[j], fg = gate[h + j], gg = gate[2 * h + j], og = gate[3 * h + j];
          const double dh = (mask ? dout[j] * mask[j] : dout[j]) + dhn[j];
          const double dc = dcn[j] + dh * og * (1.0 - ct[j] * ct[j]);
          const double cp = cprev ? cprev[j] : 0.0;
          dz[j] = dc * gg * ig * (1.0 - ig);
          dz[h + j] = dc * cp * fg * (1.0 - fg);
          dz[2 * h + j] = dc * ig * (1.0 - gg * gg);
          dz[3 * h + j] = dh * ct[j] * og * (1.0 - og);
          dcn[j] = dc * fg;
        }
        for (std::size_t r = 0; r < 4 * h; ++r) gl.bias[r] += dz[r];
        const double* x = lt.input[t].row(b).data();
        for (std::size_t k = 0; k < in_dim; ++k) axpy(d_wt_in.row(k).data(), x[k], dz.data(), 4 * h);
        double* dx = d_in[t].row(b).data();
        for (std::size_t r = 0; r < 4 * h; ++r) axpy(dx, dz[r], lp.w_input.row(r).data(), in_dim);
        std::fill(dhn, dhn + h, 0.0);
        if (t > 0) {
          const double* hp = lt.hidden[t - 1].row(b).data();
          for (std::size_t k = 0; k < h; ++k) axpy(d_wt_rec.row(k).data(), hp[k], dz.data(), 4 * h);
          for (std::size_t r = 0; r < 4 * h; ++r) axpy(dhn, dz[r], lp.w_recurrent.row(r).data(), h);
        }
      }
    }
    for (std::size_t r = 0; r < 4 * h; ++r) {
      for (std::size_t k = 0; k < in_dim; ++k) gl.w_input(r, k) += d_wt_in(k, r);
      for (std::size_t k = 0; k < h; ++k) gl.w_recurrent(r, k) += d_wt_rec(k, r);
    }
    d_out = std::move(d_in);
  }
  return g;
}

Gradients backward(const ModelParams& params, const ForwardTrace& trace, RiskLevel target) {
  return backward(params, trace, std::span<const RiskLevel>(&target, 1));
}

RiskLevel argmax_label(std::span<const double> probabilities) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < probabilities.size(); ++c) {
    if (probabilities[c] > probabilities[best]) best = c;
  }
  return static_cast<RiskLevel>(best);
}

std::vector<Prediction> predict_batch(const ModelParams& params, std::span<const Matrix> batch) {
  const ForwardTrace tr = forward(params, batch, Mode::Infer);
  std::vector<Prediction> out(tr.batch);
  for (std::size_t b = 0; b < tr.batch; ++b) {
    out[b].probabilities = tr.class_probabilities(b);
    out[b].label = argmax_label(out[b].probabilities);
    if (params.attention) out[b].attention_weights = tr.attention_weights(b);
  }
  return out;
}

Prediction predict(const ModelParams& params, const Matrix& sequence) {
  return predict_batch(params, std::span<const Matrix>(&sequence, 1)).front();
}

}  // namespace heatseq
