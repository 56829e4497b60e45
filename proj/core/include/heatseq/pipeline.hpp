#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "heatseq/cleaning.hpp"
#include "heatseq/dataset.hpp"
#include "heatseq/normalizer.hpp"
#include "heatseq/sequences.hpp"
#include "heatseq/windows.hpp"

namespace heatseq {

struct PreprocessOptions {
  LabelMode label_mode = LabelMode::StressBand;
  WindowingOptions windowing{};
  std::size_t max_gap = kDefaultMaxGap;
  double outlier_threshold = 3.0;
  std::size_t smoother_half_width = 2;
  std::size_t smoother_degree = 2;
  // Streams are cleaned per recording segment; a larger time step starts a new one.
  Timestamp max_time_step = 300;
  std::size_t seq_len = 15;
  double split_ratio = 0.8;
  std::uint64_t seed = 0;
  // Unset: stress is a feature only when it is not the sole label source.
  std::optional<bool> include_stress;
  bool include_environment = false;

  std::vector<Channel> feature_channels() const;
  std::vector<Channel> label_channels() const;
  void validate() const;
};

struct PreprocessDiagnostics {
  std::size_t workers = 0;
  std::size_t candidate_windows = 0;
  std::size_t excluded_windows = 0;
  std::size_t windows = 0;
  std::size_t sequences = 0;
  std::size_t workers_without_sequences = 0;
  std::size_t outliers_replaced = 0;
  std::size_t segments_passed_through = 0;  // shorter than the smoothing window
  std::size_t segments_dropped = 0;         // nothing present to clean
  std::array<std::size_t, kNumClasses> window_labels{};
  std::array<std::size_t, kNumClasses> train_labels{};
  std::array<std::size_t, kNumClasses> test_labels{};
};

struct PreprocessResult {
  InstanceTable instances;  // normalized features, labels from unnormalized values
  NormalizerParams normalizer;
  std::vector<SplitEntry> split;  // one entry per sequence, keyed by its final window
  PreprocessDiagnostics diagnostics;
};

/// Gap interpolation, outlier replacement and smoothing of one worker's `channels`.
WorkerStreams clean_worker(const WorkerStreams& raw, const PreprocessOptions& opt, std::span<const Channel> channels,
                           PreprocessDiagnostics* diag = nullptr);

/// Clean, window and label every worker, split the sequences, then fit the
/// normalizer on samples from training-sequence final windows only and emit
/// normalized window features.
PreprocessResult preprocess(const RawDataset& raw, const PreprocessOptions& opt);

/// Sequences of `table`; with a split, only those in `partition`.
std::vector<SequenceInstance> sequences_for(const InstanceTable& table, const std::vector<SplitEntry>* split = nullptr,
                                            std::optional<Partition> partition = std::nullopt);

struct TrainValidation {
  std::vector<SequenceInstance> train;
  std::vector<SequenceInstance> validation;
};

/// Stratified hold-out of `fraction` of the training sequences.
TrainValidation carve_validation(const std::vector<SequenceInstance>& train, double fraction, std::uint64_t seed);

}  // namespace heatseq
