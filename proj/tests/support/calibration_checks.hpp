#pragma once

#include <array>
#include <cmath>

#include <heatseq/synthgen.hpp>

namespace heatseq::testing {

struct ChannelMoments {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

/// Sample moments of the five calibrated channels with events, gaps and outliers off.
inline std::array<ChannelMoments, 5> quiet_moments(GeneratorConfig cfg) {
  cfg.event_rate = 0.0;
  cfg.missing_rate = 0.0;
  cfg.outlier_rate = 0.0;
  const GeneratedData data = generate(cfg);
  std::array<ChannelMoments, 5> out{};
  for (std::size_t k = 0; k < 5; ++k) {
    double n = 0, mean = 0, m2 = 0;
    for (const WorkerStreams& w : data.raw.workers) {
      for (double x : w.find(kPhysiologicalChannels[k])->present_values()) {
        n += 1;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
      }
    }
    out[k] = ChannelMoments{mean, std::sqrt(m2 / (n - 1)), static_cast<std::size_t>(n)};
  }
  return out;
}

}  // namespace heatseq::testing
