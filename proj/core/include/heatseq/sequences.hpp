#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "heatseq/matrix.hpp"
#include "heatseq/types.hpp"
#include "heatseq/windows.hpp"

namespace heatseq {

/// T consecutive windows of one worker as a T x D feature matrix, labelled with the
/// label of its final window.
struct SequenceInstance {
  std::string worker_id;
  Timestamp window_start = 0;  // start of the final window
  Matrix features;
  RiskLevel label = RiskLevel::Low;
};

struct SequenceSet {
  std::vector<SequenceInstance> sequences;
  // Workers whose windows never formed a single full-length run.
  std::size_t workers_without_sequences = 0;
};

/// Slides a length-`length` window (stride 1) over each worker's contiguous runs of
/// windows. Windows must be grouped by worker and time-ordered within a worker; two
/// windows are contiguous when their starts differ by exactly `window_len`.
SequenceSet make_sequences(std::span<const WindowInstance> windows, std::size_t length,
                           std::span<const Channel> feature_channels, Timestamp window_len = 60);

}  // namespace heatseq
