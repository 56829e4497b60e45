#pragma once

#include <map>
#include <span>
#include <vector>

#include "heatseq/signal.hpp"

namespace heatseq {

struct ChannelRange {
  double min = 0.0;
  double max = 1.0;
  friend bool operator==(const ChannelRange&, const ChannelRange&) = default;
};

/// Min-max scaling parameters fitted on the training partition.
struct NormalizerParams {
  std::map<Channel, ChannelRange> ranges;

  const ChannelRange& range(Channel c) const;
  // (x - min) / (max - min), clamped to [0, 1].
  double scale(Channel c, double x) const;
  double scale_unclamped(Channel c, double x) const;
  double invert(Channel c, double scaled) const;

  friend bool operator==(const NormalizerParams&, const NormalizerParams&) = default;
};

/// x_min / x_max per channel. Throws DegenerateChannelError for a constant channel
/// and ArgumentError for an empty one.
NormalizerParams fit_normalizer(const std::map<Channel, std::vector<double>>& training_values);

/// Scales every present sample; throws ArgumentError when the channel was not fitted.
SignalSeries apply_normalizer(const NormalizerParams& p, const SignalSeries& s);

}  // namespace heatseq
