#include <benchmark/benchmark.h>

#include <heatseq/model.hpp>
#include <heatseq/rng.hpp>
#include <heatseq/training.hpp>

namespace {

using namespace heatseq;

struct Setup {
  ModelParams params;
  std::vector<Matrix> batch;
  std::vector<RiskLevel> targets;
};

// args: variant (0 lstm, 1 attention), hidden
Setup make_setup(const benchmark::State& state, std::size_t batch = 64, std::size_t steps = 10) {
  ModelConfig c;
  c.variant = state.range(0) ? Variant::LstmAttention : Variant::Lstm;
  c.hidden = static_cast<std::size_t>(state.range(1));
  c.input_dim = 8;
  Rng rng(3);
  Setup s{init_params(c, rng), {}, {}};
  for (std::size_t b = 0; b < batch; ++b) {
    Matrix x(steps, c.input_dim);
    for (double& v : x.values()) v = rng.uniform();
    s.batch.push_back(std::move(x));
    s.targets.push_back(kAllRiskLevels[b % kNumClasses]);
  }
  return s;
}

void BM_ForwardInfer(benchmark::State& state) {
  const Setup s = make_setup(state);
  for (auto _ : state) benchmark::DoNotOptimize(forward(s.params, s.batch, Mode::Infer));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.batch.size()));
}
BENCHMARK(BM_ForwardInfer)->ArgsProduct({{0, 1}, {32, 128}})->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
  const Setup s = make_setup(state);
  Rng rng(4);
  for (auto _ : state) {
    const ForwardTrace tr = forward(s.params, s.batch, Mode::Train, &rng);
    benchmark::DoNotOptimize(backward(s.params, tr, s.targets));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.batch.size()));
}
BENCHMARK(BM_ForwardBackward)->ArgsProduct({{0, 1}, {32, 128}})->Unit(benchmark::kMillisecond);

void BM_AdamStep(benchmark::State& state) {
  Setup s = make_setup(state, 4);
  Rng rng(5);
  const Gradients g = backward(s.params, forward(s.params, s.batch, Mode::Train, &rng), s.targets);
  AdamState adam = AdamState::for_params(s.params);
  for (auto _ : state) adam_step(s.params, g, adam, 1e-3);
}
BENCHMARK(BM_AdamStep)->ArgsProduct({{1}, {32, 128}});

}  // namespace
