#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace heatseq {

/// Seedable generator over std::mt19937_64. The engine's raw output is fixed by the
/// C++ standard, and every derived distribution below is computed here rather than
/// through <random> distributions, so a seed gives the same draws on any platform.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64";
  static constexpr std::uint32_t kAlgorithmId = 1;

  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t poisson(double mean);

  // Seed for an independent child stream; consumes one draw.
  std::uint64_t child_seed();
  Rng child() { return Rng(child_seed()); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
    }
  }

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// SplitMix64 finalizer, used to decorrelate derived seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace heatseq
