#include "heatseq/windows.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "heatseq/errors.hpp"

namespace heatseq {

const ChannelStats& WindowInstance::at(Channel c) const {
  const auto& s = stats[index_of(c)];
  if (!s) throw LabelingError(std::string(to_string(c)));
  return *s;
}

std::vector<double> WindowInstance::features(std::span<const Channel> channels) const {
  std::vector<double> out;
  out.reserve(2 * channels.size());
  for (Channel c : channels) {
    const auto& s = stats[index_of(c)];
    if (!s) throw ArgumentError("window has no data for feature channel " + std::string(to_string(c)));
    out.push_back(s->mean);
    out.push_back(s->sd);
  }
  return out;
}

namespace {

Timestamp floor_to(Timestamp t, Timestamp len) {
  const Timestamp q = t / len;
  return (t % len != 0 && t < 0 ? q - 1 : q) * len;
}

Timestamp median_step(const SignalSeries& s) {
  std::vector<Timestamp> steps;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s.timestamps[i] > s.timestamps[i - 1]) steps.push_back(s.timestamps[i] - s.timestamps[i - 1]);
  }
  if (steps.empty()) return 0;
  std::nth_element(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(steps.size() / 2), steps.end());
  return steps[steps.size() / 2];
}

struct Accumulator {
  std::size_t present = 0;
  std::size_t missing = 0;
  double sum_sq_dev = 0.0;  // Welford
  double mean = 0.0;

  void add(double x) {
    ++present;
    const double d = x - mean;
    mean += d / static_cast<double>(present);
    sum_sq_dev += d * (x - mean);
  }
};

}  // namespace

SegmentResult segment_windows(const std::string& worker_id, std::span<const SignalSeries> streams,
                              const WindowingOptions& options) {
  if (options.window_len <= 0) throw ArgumentError("window length must be positive");
  struct Slot {
    std::array<Accumulator, kNumChannels> acc;
  };
  std::map<Timestamp, Slot> slots;
  std::array<double, kNumChannels> expected{};
  std::array<bool, kNumChannels> required{};

  for (const SignalSeries& s : streams) {
    const std::size_t ci = index_of(s.channel);
    required[ci] = true;
    const Timestamp period = options.sample_period > 0 ? options.sample_period : median_step(s);
    expected[ci] = period > 0 ? static_cast<double>(options.window_len) / static_cast<double>(period) : 1.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      Accumulator& a = slots[floor_to(s.timestamps[i], options.window_len)].acc[ci];
      if (s.values[i]) {
        a.add(*s.values[i]);
      } else {
        ++a.missing;
      }
    }
  }

  SegmentResult result;
  result.candidates = slots.size();
  for (const auto& [start, slot] : slots) {
    bool keep = true;
    for (std::size_t ci = 0; ci < kNumChannels && keep; ++ci) {
      if (!required[ci]) continue;
      const Accumulator& a = slot.acc[ci];
      if (a.missing > 0 || a.present == 0 ||
          static_cast<double>(a.present) < options.min_coverage * expected[ci]) {
        keep = false;
      }
    }
    if (!keep) {
      ++result.excluded;
      continue;
    }
    WindowInstance w;
    w.worker_id = worker_id;
    w.window_start = start;
    for (std::size_t ci = 0; ci < kNumChannels; ++ci) {
      if (!required[ci]) continue;
      const Accumulator& a = slot.acc[ci];
      w.stats[ci] = ChannelStats{a.mean, std::sqrt(a.sum_sq_dev / static_cast<double>(a.present)), a.present};
    }
    result.windows.push_back(std::move(w));
  }
  return result;
}

std::string_view to_string(LabelMode m) { return m == LabelMode::StressBand ? "stressband" : "multiparam"; }

std::optional<LabelMode> parse_label_mode(std::string_view s) {
  if (s == "stressband") return LabelMode::StressBand;
  if (s == "multiparam") return LabelMode::MultiParam;
  return std::nullopt;
}

RiskLevel stress_band(double stress) {
  if (stress < 26.0) return RiskLevel::Low;
  if (stress < 76.0) return RiskLevel::Moderate;
  return RiskLevel::High;
}

RiskLevel heart_rate_risk(double bpm) {
  if (bpm < 60.0) return RiskLevel::Moderate;
  if (bpm < 95.0) return RiskLevel::Low;
  if (bpm <= 185.0) return RiskLevel::Moderate;
  return RiskLevel::High;
}

RiskLevel hrv_risk(double ms) {
  if (ms > 700.0) return RiskLevel::Low;
  if (ms >= 500.0) return RiskLevel::Moderate;
  return RiskLevel::High;
}

RiskLevel spo2_risk(double percent) {
  if (percent >= 95.0) return RiskLevel::Low;
  if (percent >= 90.0) return RiskLevel::Moderate;
  return RiskLevel::High;
}

RiskLevel respiration_risk(double bpm) {
  if (bpm < 12.0) return RiskLevel::High;
  if (bpm < 19.0) return RiskLevel::Low;
  if (bpm <= 24.0) return RiskLevel::Moderate;
  return RiskLevel::High;
}

RiskLevel majority_vote(std::span<const RiskLevel> votes) {
  if (votes.empty()) throw ArgumentError("majority_vote needs at least one vote");
  std::array<std::size_t, kNumClasses> counts{};
  for (RiskLevel v : votes) ++counts[index_of(v)];
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (counts[c] >= counts[best]) best = c;
  }
  return static_cast<RiskLevel>(best);
}

RiskLevel label_window(const WindowInstance& w, LabelMode mode) {
  if (mode == LabelMode::StressBand) return stress_band(w.at(Channel::Stress).mean);
  const std::array<RiskLevel, 5> votes{
      heart_rate_risk(w.at(Channel::HR).mean), hrv_risk(w.at(Channel::HRV).mean),
      spo2_risk(w.at(Channel::SpO2).mean), stress_band(w.at(Channel::Stress).mean),
      respiration_risk(w.at(Channel::RespRate).mean)};
  return majority_vote(votes);
}

}  // namespace heatseq
