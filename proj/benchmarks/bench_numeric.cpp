#include <benchmark/benchmark.h>

#include <heatseq/matrix.hpp>
#include <heatseq/rng.hpp>

namespace {

heatseq::Matrix random_matrix(std::size_t r, std::size_t c, heatseq::Rng& rng) {
  heatseq::Matrix m(r, c);
  for (double& v : m.values()) v = rng.uniform(-1.0, 1.0);
  return m;
}

// Gate pre-activation shape: (4H x D) times (D x batch).
void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  heatseq::Rng rng(1);
  const auto a = random_matrix(4 * n, n, rng);
  const auto b = random_matrix(n, 64, rng);
  for (auto _ : state) benchmark::DoNotOptimize(heatseq::matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(4 * n * n * 64));
}
BENCHMARK(BM_Matmul)->Arg(8)->Arg(32)->Arg(128);

void BM_Softmax(benchmark::State& state) {
  heatseq::Rng rng(2);
  std::vector<double> v(static_cast<std::size_t>(state.range(0)));
  for (double& x : v) x = rng.uniform(-5.0, 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(heatseq::softmax(v));
}
BENCHMARK(BM_Softmax)->Arg(3)->Arg(15)->Arg(256);

}  // namespace
