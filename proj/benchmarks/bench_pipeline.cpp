#include <benchmark/benchmark.h>

#include <heatseq/cleaning.hpp>
#include <heatseq/metrics.hpp>
#include <heatseq/rng.hpp>
#include <heatseq/savgol.hpp>
#include <heatseq/synthgen.hpp>

namespace {

using namespace heatseq;

// One worker-day at 10 s sampling.
SignalSeries noisy_day(std::size_t n) {
  Rng rng(6);
  SignalSeries s;
  s.channel = Channel::HR;
  for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<Timestamp>(10 * i), 90.0 + 10.0 * rng.normal());
  return s;
}

void BM_SavitzkyGolay(benchmark::State& state) {
  const SignalSeries s = noisy_day(static_cast<std::size_t>(state.range(0)));
  const SmootherSpec spec = make_smoother(2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(savitzky_golay_smooth(s, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SavitzkyGolay)->Arg(2880)->Arg(100000);

void BM_ReplaceOutliers(benchmark::State& state) {
  const SignalSeries s = noisy_day(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(replace_outliers(s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ReplaceOutliers)->Arg(2880);

void BM_RocCurve(benchmark::State& state) {
  Rng rng(7);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> scores(n);
  std::vector<std::uint8_t> positive(n);
  for (std::size_t i = 0; i < n; ++i) {
    positive[i] = rng.bernoulli(0.3);
    scores[i] = rng.uniform() + 0.3 * positive[i];
  }
  for (auto _ : state) benchmark::DoNotOptimize(roc_curve(scores, positive));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RocCurve)->Arg(1000)->Arg(100000);

void BM_Generate(benchmark::State& state) {
  GeneratorConfig g = GeneratorConfig::preset(Separability::PaperLike);
  g.workers = 1;
  g.days = 1;
  for (auto _ : state) benchmark::DoNotOptimize(generate(g));
}
BENCHMARK(BM_Generate)->Unit(benchmark::kMillisecond);

}  // namespace
