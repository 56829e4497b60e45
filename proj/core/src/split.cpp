#include "heatseq/split.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "heatseq/errors.hpp"
#include "heatseq/rng.hpp"

namespace heatseq {

namespace {

std::size_t floor_ratio(std::size_t n, double ratio) {
  return static_cast<std::size_t>(std::floor(static_cast<long double>(n) * static_cast<long double>(ratio)));
}

}  // namespace

SplitIndices stratified_split(std::span<const RiskLevel> labels, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ArgumentError("split ratio must be in (0, 1)");

  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[index_of(labels[i])].push_back(i);

  const std::size_t n_train = floor_ratio(labels.size(), ratio);
  std::array<std::size_t, kNumClasses> quota{};
  std::array<long double, kNumClasses> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const long double exact = static_cast<long double>(by_class[c].size()) * static_cast<long double>(ratio);
    quota[c] = floor_ratio(by_class[c].size(), ratio);
    remainder[c] = exact - static_cast<long double>(quota[c]);
    assigned += quota[c];
  }
  std::array<std::size_t, kNumClasses> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < n_train; i = (i + 1) % kNumClasses) {
    const std::size_t c = order[i];
    if (quota[c] < by_class[c].size()) {
      ++quota[c];
      ++assigned;
    }
  }

  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const std::size_t n = by_class[c].size();
    if (n == 0) continue;
    if (quota[c] == 0 || quota[c] == n) {
      throw InsufficientDataError("class " + std::string(to_string(static_cast<RiskLevel>(c))) + " has " +
                                  std::to_string(n) + " instance(s); cannot place one in each partition");
    }
  }

  // One child stream per class keeps the draw order fixed regardless of class sizes.
  Rng rng(seed);
  SplitIndices out;
  out.train.reserve(n_train);
  out.test.reserve(labels.size() - n_train);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    Rng class_rng = rng.child();
    auto& members = by_class[c];
    class_rng.shuffle(members);
    out.train.insert(out.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    out.test.insert(out.test.end(), members.begin() + static_cast<std::ptrdiff_t>(quota[c]), members.end());
  }
  Rng order_rng = rng.child();
  order_rng.shuffle(out.train);
  order_rng.shuffle(out.test);
  return out;
}

}  // namespace heatseq
