#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heatseq/dataset.hpp"
#include "heatseq/types.hpp"

namespace heatseq {

/// Field statistics of one wearable channel: mean, standard deviation and observed range.
struct ChannelCalibration {
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// HR, HRV, SpO2, RespRate, Stress.
inline constexpr std::array<ChannelCalibration, 5> kFieldCalibration{{
    {94.45, 20.19, 60.0, 129.0},
    {599.35, 115.50, 400.0, 799.0},
    {94.00, 3.74, 88.0, 100.0},
    {14.50, 2.87, 10.0, 19.0},
    {49.59, 28.86, 0.0, 99.0},
}};

enum class Separability { High, PaperLike };
std::string_view to_string(Separability s);  // "high" / "paper-like"
std::optional<Separability> parse_separability(std::string_view s);

/// How tightly the physiological channels follow the shared strain signal.
struct NoiseModel {
  // Correlation of HR/HRV/SpO2/RespRate with the latent strain; stress loads with 1.
  double loading = 0.998;
  // Per-sample measurement noise as a fraction of each channel's SD.
  double measurement_fraction = 0.02;
  // Measurement noise on the stress index, in index points.
  double stress_noise_sd = 0.5;
};

struct WorkSession {
  Timestamp begin = 0;  // seconds after midnight
  Timestamp end = 0;
};

struct GeneratorConfig {
  std::size_t workers = 19;
  std::size_t days = 5;
  std::uint64_t seed = 0;
  Timestamp start_day = 1685577600;  // 2023-06-01T00:00:00Z
  Timestamp sample_period = 10;
  std::vector<WorkSession> sessions{{8 * 3600, 12 * 3600}, {15 * 3600, 18 * 3600}};
  std::array<ChannelCalibration, 5> calibration = kFieldCalibration;

  Separability separability = Separability::High;
  NoiseModel noise{};

  // Expected heat events per worker-day.
  double event_rate = 1.0;
  double ramp_minutes = 15.0;
  double plateau_min_minutes = 10.0;
  double plateau_max_minutes = 30.0;
  double recovery_minutes = 5.0;
  // Share of events that reach the High band; the rest target Moderate.
  double high_event_fraction = 0.4;
  double moderate_target = 60.0;
  double high_target = 88.0;

  double missing_rate = 0.005;
  double outlier_rate = 0.002;
  // Outliers sit this many channel SDs away from the true value.
  double outlier_sds = 6.0;

  // Low/Moderate/High share of the baseline stress distribution. Unset keeps the
  // calibrated marginal.
  std::optional<std::array<double, 3>> class_balance;

  /// Defaults with the noise model of the given preset.
  static GeneratorConfig preset(Separability s);
  /// Throws ArgumentError for zero workers/days or out-of-range rates.
  void validate() const;
};

struct HeatEvent {
  std::string worker_id;
  Timestamp onset = 0;
  Timestamp ramp = 0;
  Timestamp plateau = 0;
  Timestamp recovery = 0;
  RiskLevel severity = RiskLevel::Moderate;

  Timestamp duration() const { return ramp + plateau + recovery; }
  Timestamp end() const { return onset + duration(); }
  // Blend weight toward the event target at time t: 0 outside, 1 on the plateau.
  double weight(Timestamp t) const;
  friend bool operator==(const HeatEvent&, const HeatEvent&) = default;
};

struct EventScript {
  std::vector<HeatEvent> events;  // ordered by worker, then onset
  friend bool operator==(const EventScript&, const EventScript&) = default;
};

struct GeneratedData {
  RawDataset raw;
  EventScript script;
  std::size_t samples = 0;  // per channel and timestamp, all channels
  std::size_t missing_injected = 0;
  std::size_t outliers_injected = 0;
};

GeneratedData generate(const GeneratorConfig& cfg);

struct ReferenceLabel {
  std::string worker_id;
  Timestamp window_start = 0;
  RiskLevel label = RiskLevel::Low;
  double stress = 0.0;  // noise-free window mean
};

/// Window labels from the generator's noise-free stress path under `script`.
std::vector<ReferenceLabel> bayes_reference(const GeneratorConfig& cfg, const EventScript& script,
                                            Timestamp window_len = 60);

std::string worker_name(std::size_t index);

void write_events_csv(std::ostream& out, const EventScript& script);
EventScript read_events_csv(std::istream& in, Timestamp ramp_seconds = 900, Timestamp recovery_seconds = 300);

}  // namespace heatseq
