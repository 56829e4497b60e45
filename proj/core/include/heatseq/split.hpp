#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "heatseq/types.hpp"

namespace heatseq {

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified, seeded split. The training side gets exactly floor(N * ratio) items;
/// each class contributes floor(n_c * ratio) of them and the leftover slots go to the
/// classes with the largest fractional remainders (lowest class index on ties).
/// Classes absent from `labels` are ignored; any present class that would end up
/// with no member on either side raises InsufficientDataError.
SplitIndices stratified_split(std::span<const RiskLevel> labels, double ratio, std::uint64_t seed);

template <typename T, typename LabelOf>
std::pair<std::vector<T>, std::vector<T>> split_dataset(const std::vector<T>& items, LabelOf label_of,
                                                        double ratio, std::uint64_t seed) {
  std::vector<RiskLevel> labels;
  labels.reserve(items.size());
  for (const T& item : items) labels.push_back(label_of(item));
  const SplitIndices idx = stratified_split(labels, ratio, seed);
  std::pair<std::vector<T>, std::vector<T>> out;
  out.first.reserve(idx.train.size());
  out.second.reserve(idx.test.size());
  for (std::size_t i : idx.train) out.first.push_back(items[i]);
  for (std::size_t i : idx.test) out.second.push_back(items[i]);
  return out;
}

}  // namespace heatseq
