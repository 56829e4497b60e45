#include "heatseq/training.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

namespace heatseq {

namespace {

// Sequences per forward/backward call. Fixed so reduction order never depends on threads.
constexpr std::size_t kChunk = 16;

std::vector<std::span<double>> spans_of(ModelParams& p) {
  std::vector<std::span<double>> out;
  p.for_each_tensor([&](const std::string&, std::span<double> v) { out.push_back(v); });
  return out;
}

std::vector<std::span<const double>> spans_of(const ModelParams& p) {
  std::vector<std::span<const double>> out;
  p.for_each_tensor([&](const std::string&, std::span<const double> v) { out.push_back(v); });
  return out;
}

void add_into(ModelParams& into, const ModelParams& g, double scale = 1.0) {
  auto dst = spans_of(into);
  auto src = spans_of(g);
  for (std::size_t t = 0; t < dst.size(); ++t)
    for (std::size_t i = 0; i < dst[t].size(); ++i) dst[t][i] += scale * src[t][i];
}

template <typename Fn>
void run_chunks(std::size_t n_chunks, std::size_t threads, Fn&& fn) {
  const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), n_chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c = next++; c < n_chunks; c = next++) fn(c);
  };
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
}

}  // namespace

TrainConfig TrainConfig::defaults_for(Variant v) {
  TrainConfig cfg;
  cfg.max_epochs = v == Variant::Lstm ? 20 : 50;
  return cfg;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ArgumentError("learning_rate must be > 0");
  if (batch_size == 0) throw ArgumentError("batch_size must be >= 1");
  if (max_epochs == 0) throw ArgumentError("max_epochs must be >= 1");
  if (patience == 0) throw ArgumentError("patience must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ArgumentError("dropout must be in [0, 1)");
}

AdamState AdamState::for_params(const ModelParams& params) {
  return AdamState{params.zeros_like(), params.zeros_like(), 0};
}

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state, double learning_rate) {
  grads.for_each_tensor([](const std::string& name, std::span<const double> g) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!std::isfinite(g[i])) throw NonFiniteGradientError(name, i);
    }
  });
  auto p = spans_of(params);
  auto m = spans_of(state.m);
  auto v = spans_of(state.v);
  auto g = spans_of(grads);
  if (p.size() != g.size() || p.size() != m.size()) throw ShapeError("adam_step: tensor lists differ");

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(AdamState::kBeta1, t);
  const double c2 = 1.0 - std::pow(AdamState::kBeta2, t);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k].size() != g[k].size()) throw ShapeError("adam_step: gradient shape differs from parameter");
    for (std::size_t i = 0; i < p[k].size(); ++i) {
      const double gi = g[k][i];
      m[k][i] = AdamState::kBeta1 * m[k][i] + (1.0 - AdamState::kBeta1) * gi;
      v[k][i] = AdamState::kBeta2 * v[k][i] + (1.0 - AdamState::kBeta2) * gi * gi;
      const double m_hat = m[k][i] / c1;
      const double v_hat = v[k][i] / c2;
      p[k][i] -= learning_rate * m_hat / (std::sqrt(v_hat) + AdamState::kEpsilon);
    }
  }
}

double cross_entropy_loss(std::span<const double> probabilities, RiskLevel target, bool* clamped) {
  const double p = probabilities[index_of(target)];
  const bool clamp = !(p >= kMinProbability);
  if (clamped) *clamped = clamp;
  return -std::log(clamp ? kMinProbability : p);
}

std::string_view to_string(StopReason r) { return r == StopReason::MaxEpochs ? "max_epochs" : "early_stop"; }

bool EarlyStopping::update(double val_loss) {
  ++epoch_;
  if (epoch_ == 1 || val_loss < best_ - min_improvement_) {
    best_ = val_loss;
    best_epoch_ = epoch_;
    stale_ = 0;
    return true;
  }
  ++stale_;
  return false;
}

BatchGradient batch_gradient(const ModelParams& params, std::span<const SequenceInstance* const> batch, Rng& rng,
                             std::size_t threads) {
  const std::size_t n_chunks = (batch.size() + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> seeds(n_chunks);
  for (auto& s : seeds) s = rng.child_seed();

  struct ChunkResult {
    Gradients grads;
    double loss = 0.0;
    std::size_t clamped = 0;
  };
  std::vector<ChunkResult> results(n_chunks);
  run_chunks(n_chunks, threads, [&](std::size_t c) {
    const std::size_t lo = c * kChunk;
    const std::size_t hi = std::min(batch.size(), lo + kChunk);
    std::vector<Matrix> xs;
    std::vector<RiskLevel> ys;
    xs.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
      xs.push_back(batch[i]->features);
      ys.push_back(batch[i]->label);
    }
    Rng chunk_rng(seeds[c]);
    const ForwardTrace tr = forward(params, xs, Mode::Train, &chunk_rng);
    ChunkResult& r = results[c];
    for (std::size_t b = 0; b < tr.batch; ++b) {
      bool clamped = false;
      r.loss += cross_entropy_loss(tr.probabilities.row(b), ys[b], &clamped);
      r.clamped += clamped ? 1 : 0;
    }
    r.grads = backward(params, tr, ys);
  });

  BatchGradient out{params.zeros_like(), 0.0, 0};
  for (const ChunkResult& r : results) {
    add_into(out.grads, r.grads);
    out.loss_sum += r.loss;
    out.clamped += r.clamped;
  }
  return out;
}

LossAccuracy evaluate_loss(const ModelParams& params, std::span<const SequenceInstance> data, std::size_t threads) {
  if (data.empty()) throw ArgumentError("evaluate_loss: empty data");
  constexpr std::size_t kEvalChunk = 256;
  const std::size_t n_chunks = (data.size() + kEvalChunk - 1) / kEvalChunk;
  struct ChunkResult {
    double loss = 0.0;
    std::size_t correct = 0;
    std::size_t clamped = 0;
  };
  std::vector<ChunkResult> results(n_chunks);
  run_chunks(n_chunks, threads, [&](std::size_t c) {
    const std::size_t lo = c * kEvalChunk;
    const std::size_t hi = std::min(data.size(), lo + kEvalChunk);
    std::vector<Matrix> xs;
    xs.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) xs.push_back(data[i].features);
    const ForwardTrace tr = forward(params, xs, Mode::Infer);
    for (std::size_t b = 0; b < tr.batch; ++b) {
      bool clamped = false;
      results[c].loss += cross_entropy_loss(tr.probabilities.row(b), data[lo + b].label, &clamped);
      results[c].clamped += clamped ? 1 : 0;
      if (argmax_label(tr.probabilities.row(b)) == data[lo + b].label) ++results[c].correct;
    }
  });
  LossAccuracy out;
  std::size_t correct = 0;
  for (const auto& r : results) {
    out.loss += r.loss;
    correct += r.correct;
    out.clamped += r.clamped;
  }
  out.loss /= static_cast<double>(data.size());
  out.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  return out;
}

TrainResult train(ModelConfig model_config, std::span<const SequenceInstance> train_set,
                  std::span<const SequenceInstance> validation_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_set.empty() || validation_set.empty()) {
    throw ArgumentError("train: training and validation sets must be non-empty");
  }
  model_config.dropout = cfg.dropout;

  Rng master(cfg.seed);
  Rng init_rng = master.child();
  Rng epoch_rng = master.child();

  ModelParams params = init_params(model_config, init_rng);
  AdamState adam = AdamState::for_params(params);
  ModelParams best = params;
  EarlyStopping stopper(cfg.patience, cfg.min_improvement);
  TrainLog log;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<const SequenceInstance*> batch;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    epoch_rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch_size) {
      const std::size_t hi = std::min(order.size(), lo + cfg.batch_size);
      batch.clear();
      for (std::size_t i = lo; i < hi; ++i) batch.push_back(&train_set[order[i]]);
      BatchGradient bg = batch_gradient(params, batch, epoch_rng, cfg.threads);
      log.clamped_probabilities += bg.clamped;
      if (!std::isfinite(bg.loss_sum)) {
        throw DivergenceError("training loss became non-finite in epoch " + std::to_string(epoch), best, log);
      }
      const double inv = 1.0 / static_cast<double>(batch.size());
      for (auto s : spans_of(bg.grads))
        for (double& x : s) x *= inv;
      try {
        adam_step(params, bg.grads, adam, cfg.learning_rate);
      } catch (const NonFiniteGradientError& e) {
        throw DivergenceError(e.what(), best, log);
      }
      loss_sum += bg.loss_sum;
    }

    const LossAccuracy val = evaluate_loss(params, validation_set, cfg.threads);
    log.clamped_probabilities += val.clamped;
    if (!std::isfinite(val.loss)) {
      throw DivergenceError("validation loss became non-finite in epoch " + std::to_string(epoch), best, log);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(train_set.size());
    rec.val_loss = val.loss;
    rec.val_accuracy = val.accuracy;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    log.epochs.push_back(rec);
    if (stopper.update(val.loss)) best = params;
    if (on_epoch) on_epoch(rec);
    if (stopper.should_stop()) {
      log.stop_reason = StopReason::EarlyStop;
      break;
    }
  }
  if (!log.stop_reason) log.stop_reason = StopReason::MaxEpochs;
  log.best_epoch = stopper.best_epoch();
  log.best_val_loss = stopper.best_loss();
  return TrainResult{std::move(best), std::move(log)};
}

}  // namespace heatseq
