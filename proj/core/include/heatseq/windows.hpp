#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heatseq/signal.hpp"
#include "heatseq/types.hpp"

namespace heatseq {

struct ChannelStats {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t count = 0;
  friend bool operator==(const ChannelStats&, const ChannelStats&) = default;
};

/// One fixed-length window of one worker: per-channel mean and standard deviation.
struct WindowInstance {
  std::string worker_id;
  Timestamp window_start = 0;
  std::array<std::optional<ChannelStats>, kNumChannels> stats;
  std::optional<RiskLevel> label;

  bool has(Channel c) const { return stats[index_of(c)].has_value(); }
  const ChannelStats& at(Channel c) const;
  // [mean, sd] for each requested channel, in order.
  std::vector<double> features(std::span<const Channel> channels) const;
};

struct WindowingOptions {
  Timestamp window_len = 60;
  // Fraction of the expected samples a channel must contribute for the window to be kept.
  double min_coverage = 0.5;
  // Sample spacing in seconds; 0 infers it per channel from the median timestamp step.
  Timestamp sample_period = 0;
};

struct SegmentResult {
  std::vector<WindowInstance> windows;
  std::size_t candidates = 0;
  std::size_t excluded = 0;
};

/// Buckets all of one worker's streams into aligned, non-overlapping windows
/// [start, start + window_len) with start a multiple of window_len. A window is
/// dropped (and counted) when any stream has a still-missing sample inside it or
/// covers less than `min_coverage` of its expected samples.
SegmentResult segment_windows(const std::string& worker_id, std::span<const SignalSeries> streams,
                              const WindowingOptions& options = {});

enum class LabelMode { StressBand, MultiParam };

std::string_view to_string(LabelMode m);
std::optional<LabelMode> parse_label_mode(std::string_view s);

// Per-channel risk bands. A continuous value belongs to a band from that band's
// lower integer bound up to the next band's lower bound.
RiskLevel stress_band(double stress);
RiskLevel heart_rate_risk(double bpm);
RiskLevel hrv_risk(double ms);
RiskLevel spo2_risk(double percent);
RiskLevel respiration_risk(double breaths_per_minute);

/// Most frequent level; ties go to the higher risk.
RiskLevel majority_vote(std::span<const RiskLevel> votes);

/// Labels a window from raw (unnormalized) channel means. Throws LabelingError
/// naming the first required channel the window lacks.
RiskLevel label_window(const WindowInstance& w, LabelMode mode);

}  // namespace heatseq
