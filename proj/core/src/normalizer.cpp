#include "heatseq/normalizer.hpp"

#include <algorithm>

#include "heatseq/errors.hpp"

namespace heatseq {

const ChannelRange& NormalizerParams::range(Channel c) const {
  auto it = ranges.find(c);
  if (it == ranges.end()) {
    throw ArgumentError("normalizer has no range for channel " + std::string(to_string(c)));
  }
  return it->second;
}

double NormalizerParams::scale_unclamped(Channel c, double x) const {
  const ChannelRange& r = range(c);
  return (x - r.min) / (r.max - r.min);
}

double NormalizerParams::scale(Channel c, double x) const { return std::clamp(scale_unclamped(c, x), 0.0, 1.0); }

double NormalizerParams::invert(Channel c, double scaled) const {
  const ChannelRange& r = range(c);
  return scaled * (r.max - r.min) + r.min;
}

NormalizerParams fit_normalizer(const std::map<Channel, std::vector<double>>& training_values) {
  NormalizerParams p;
  for (const auto& [channel, values] : training_values) {
    if (values.empty()) {
      throw ArgumentError("no training values for channel " + std::string(to_string(channel)));
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (!(*hi > *lo)) throw DegenerateChannelError(std::string(to_string(channel)));
    p.ranges[channel] = ChannelRange{*lo, *hi};
  }
  return p;
}

SignalSeries apply_normalizer(const NormalizerParams& p, const SignalSeries& s) {
  p.range(s.channel);
  SignalSeries out = s;
  for (auto& v : out.values)
    if (v) v = p.scale(s.channel, *v);
  return out;
}

}  // namespace heatseq
