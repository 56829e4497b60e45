#include "heatseq/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "heatseq/errors.hpp"
#include "heatseq/rng.hpp"

namespace heatseq {

namespace {

constexpr std::array<Channel, 5> kCalibrated{Channel::HR, Channel::HRV, Channel::SpO2, Channel::RespRate,
                                             Channel::Stress};
// Direction each channel moves with rising strain.
constexpr std::array<double, 5> kSign{+1.0, -1.0, -1.0, +1.0, +1.0};
// Indices into the idiosyncratic noise paths: the four loaded channels, then temp and humidity.
constexpr std::size_t kNoisePaths = 6;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double round_milli(double x) { return std::round(x * 1000.0) / 1000.0; }

/// Channel value as a monotone function of a standard-normal score, tabulated on a
/// uniform z grid and interpolated linearly.
class MarginalTable {
 public:
  static constexpr double kZMax = 8.5;
  static constexpr std::size_t kPoints = 8193;

  template <typename Quantile>
  explicit MarginalTable(Quantile&& q) : x_(kPoints) {
    for (std::size_t i = 0; i < kPoints; ++i) x_[i] = q(z_at(i));
  }

  double operator()(double z) const {
    const double pos = (std::clamp(z, -kZMax, kZMax) + kZMax) / step();
    const std::size_t i = std::min(static_cast<std::size_t>(pos), kPoints - 2);
    const double f = pos - static_cast<double>(i);
    return x_[i] + f * (x_[i + 1] - x_[i]);
  }

  double inverse(double x) const {
    const auto it = std::lower_bound(x_.begin(), x_.end(), x);
    if (it == x_.begin()) return -kZMax;
    if (it == x_.end()) return kZMax;
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double span = x_[i + 1] - x_[i];
    const double f = span > 0.0 ? (x - x_[i]) / span : 0.0;
    return z_at(i) + f * step();
  }

 private:
  static double step() { return 2.0 * kZMax / static_cast<double>(kPoints - 1); }
  static double z_at(std::size_t i) { return -kZMax + step() * static_cast<double>(i); }
  std::vector<double> x_;
};

double noise_sd(const GeneratorConfig& cfg, std::size_t k) {
  return kCalibrated[k] == Channel::Stress ? cfg.noise.stress_noise_sd
                                           : cfg.noise.measurement_fraction * cfg.calibration[k].sd;
}

// Symmetric Beta(a, a) on [min, max] whose variance plus the measurement noise
// variance gives the calibrated SD.
MarginalTable beta_marginal(const ChannelCalibration& c, double noise) {
  const double range = c.max - c.min;
  const double var = c.sd * c.sd - noise * noise;
  if (!(var > 0.0) || !(range * range > 4.0 * var)) {
    throw ArgumentError("calibration SD is not reachable by a distribution on the given range");
  }
  const double a = (range * range / (4.0 * var) - 1.0) / 2.0;
  return MarginalTable([&](double z) {
    // Evaluate the smaller tail directly; the distribution is symmetric.
    const double u = normal_cdf(-std::abs(z));
    const double q = u <= 0.0 ? 0.0 : boost::math::ibeta_inv(a, a, u);
    return c.min + range * (z < 0.0 ? q : 1.0 - q);
  });
}

MarginalTable balanced_stress_marginal(const ChannelCalibration& c, const std::array<double, 3>& share) {
  const std::array<double, 4> edges{c.min, 26.0, 76.0, c.max};
  return MarginalTable([&](double z) {
    double u = normal_cdf(z);
    for (std::size_t b = 0; b < 3; ++b) {
      if (u <= share[b] || b == 2) {
        const double f = std::clamp(u / share[b], 0.0, 1.0);
        return edges[b] + f * (edges[b + 1] - edges[b]);
      }
      u -= share[b];
    }
    return c.max;
  });
}

struct Tables {
  std::vector<MarginalTable> channel;  // the five calibrated channels
  double moderate_z = 0.0;
  double high_z = 0.0;
};

Tables build_tables(const GeneratorConfig& cfg) {
  Tables t;
  for (std::size_t k = 0; k < kCalibrated.size(); ++k) {
    if (kCalibrated[k] == Channel::Stress && cfg.class_balance) {
      t.channel.push_back(balanced_stress_marginal(cfg.calibration[k], *cfg.class_balance));
    } else {
      t.channel.push_back(beta_marginal(cfg.calibration[k], noise_sd(cfg, k)));
    }
  }
  t.moderate_z = t.channel[4].inverse(cfg.moderate_target);
  t.high_z = t.channel[4].inverse(cfg.high_target);
  return t;
}

// Latent strain and idiosyncratic paths for one worker-day, before events.
struct DayPaths {
  std::vector<Timestamp> times;
  std::vector<double> strain;
  std::array<std::vector<double>, kNoisePaths> noise;
};

// Standardise to sample mean 0 and SD 1 so short runs still hit the calibrated moments.
void moment_match(std::vector<double>& v) {
  if (v.size() < 2) return;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size()));
  if (sd == 0.0) return;
  for (double& x : v) x = (x - mean) / sd;
}

std::vector<double> ar_path(const std::vector<Timestamp>& times, Rng& rng) {
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i == 0) {
      out[i] = rng.normal();
      continue;
    }
    const double phi = std::pow(0.95, static_cast<double>(times[i] - times[i - 1]) / 60.0);
    out[i] = phi * out[i - 1] + std::sqrt(1.0 - phi * phi) * rng.normal();
  }
  moment_match(out);
  return out;
}

struct DayStreams {
  DayPaths paths;
  std::vector<HeatEvent> drawn_events;
  Rng measurement{0};
  Rng injection{0};
};

Timestamp snap(double seconds, Timestamp period) {
  const auto s = static_cast<Timestamp>(std::llround(seconds));
  return std::max<Timestamp>(period, (s / period) * period);
}

std::vector<HeatEvent> draw_events(const GeneratorConfig& cfg, const std::string& worker, Timestamp day_start,
                                   Rng& rng) {
  std::vector<HeatEvent> events;
  const std::uint64_t count = rng.poisson(cfg.event_rate);
  for (std::uint64_t e = 0; e < count; ++e) {
    HeatEvent ev;
    ev.worker_id = worker;
    ev.severity = rng.bernoulli(cfg.high_event_fraction) ? RiskLevel::High : RiskLevel::Moderate;
    ev.ramp = snap(cfg.ramp_minutes * 60.0, cfg.sample_period);
    ev.plateau = snap(60.0 * rng.uniform(cfg.plateau_min_minutes, cfg.plateau_max_minutes), cfg.sample_period);
    ev.recovery = snap(cfg.recovery_minutes * 60.0, cfg.sample_period);
    std::vector<const WorkSession*> fits;
    for (const auto& s : cfg.sessions)
      if (s.end - s.begin >= ev.duration()) fits.push_back(&s);
    if (fits.empty()) continue;
    for (int attempt = 0; attempt < 20; ++attempt) {
      const WorkSession& s = *fits[rng.below(fits.size())];
      const auto slots = static_cast<std::uint64_t>((s.end - s.begin - ev.duration()) / cfg.sample_period) + 1;
      ev.onset = day_start + s.begin + static_cast<Timestamp>(rng.below(slots)) * cfg.sample_period;
      const bool clash = std::any_of(events.begin(), events.end(), [&](const HeatEvent& o) {
        return ev.onset < o.end() && o.onset < ev.end();
      });
      if (!clash) {
        events.push_back(ev);
        break;
      }
    }
  }
  std::sort(events.begin(), events.end(), [](const HeatEvent& a, const HeatEvent& b) { return a.onset < b.onset; });
  return events;
}

DayStreams simulate_day(const GeneratorConfig& cfg, const std::string& worker, Timestamp day_start,
                        std::uint64_t seed) {
  Rng day(seed);
  Rng event_rng = day.child();
  Rng latent_rng = day.child();
  std::array<Rng, kNoisePaths> noise_rng;
  for (auto& r : noise_rng) r = day.child();

  DayStreams d;
  d.measurement = day.child();
  d.injection = day.child();
  for (const auto& s : cfg.sessions)
    for (Timestamp t = s.begin; t < s.end; t += cfg.sample_period) d.paths.times.push_back(day_start + t);
  d.paths.strain = ar_path(d.paths.times, latent_rng);
  for (std::size_t k = 0; k < kNoisePaths; ++k) d.paths.noise[k] = ar_path(d.paths.times, noise_rng[k]);
  d.drawn_events = draw_events(cfg, worker, day_start, event_rng);
  return d;
}

// Strain after blending toward the target of whichever event covers each sample.
std::vector<double> effective_strain(const DayPaths& p, const std::vector<HeatEvent>& events, const Tables& tables) {
  std::vector<double> s = p.strain;
  for (const HeatEvent& ev : events) {
    const double target = ev.severity == RiskLevel::High ? tables.high_z : tables.moderate_z;
    const auto lo = std::lower_bound(p.times.begin(), p.times.end(), ev.onset) - p.times.begin();
    for (auto i = static_cast<std::size_t>(lo); i < p.times.size() && p.times[i] < ev.end(); ++i) {
      const double w = ev.weight(p.times[i]);
      s[i] = (1.0 - w) * s[i] + w * target;
    }
  }
  return s;
}

std::vector<HeatEvent> events_in(const EventScript& script, const std::string& worker, Timestamp lo, Timestamp hi) {
  std::vector<HeatEvent> out;
  for (const auto& e : script.events)
    if (e.worker_id == worker && e.onset >= lo && e.onset < hi) out.push_back(e);
  return out;
}

std::vector<std::uint64_t> worker_seeds(const GeneratorConfig& cfg) {
  Rng master(cfg.seed);
  std::vector<std::uint64_t> seeds(cfg.workers);
  for (auto& s : seeds) s = master.child_seed();
  return seeds;
}

}  // namespace

std::string_view to_string(Separability s) { return s == Separability::High ? "high" : "paper-like"; }

std::optional<Separability> parse_separability(std::string_view s) {
  if (s == "high") return Separability::High;
  if (s == "paper-like") return Separability::PaperLike;
  return std::nullopt;
}

GeneratorConfig GeneratorConfig::preset(Separability s) {
  GeneratorConfig cfg;
  cfg.separability = s;
  if (s == Separability::PaperLike) {
    cfg.noise = NoiseModel{0.9, 0.10, 2.0};
    cfg.missing_rate = 0.02;
    cfg.outlier_rate = 0.005;
  }
  return cfg;
}

void GeneratorConfig::validate() const {
  if (workers == 0) throw ArgumentError("workers must be >= 1");
  if (days == 0) throw ArgumentError("days must be >= 1");
  if (sample_period <= 0) throw ArgumentError("sample period must be positive");
  if (sessions.empty()) throw ArgumentError("at least one work session is required");
  for (const auto& s : sessions) {
    if (s.begin < 0 || s.end > 86400 || s.end <= s.begin) throw ArgumentError("work sessions must lie within one day");
  }
  auto rate = [](double r, const char* name) {
    if (!(r >= 0.0 && r <= 1.0)) throw ArgumentError(std::string(name) + " must be in [0, 1]");
  };
  rate(event_rate, "event rate");
  rate(missing_rate, "missing rate");
  rate(outlier_rate, "outlier rate");
  rate(high_event_fraction, "high event fraction");
  rate(noise.loading, "channel loading");
  if (!(noise.measurement_fraction >= 0.0) || !(noise.stress_noise_sd >= 0.0)) {
    throw ArgumentError("noise levels must be >= 0");
  }
  for (const auto& c : calibration) {
    if (!(c.sd >= 0.0) || !(c.max > c.min)) throw ArgumentError("channel calibration needs sd >= 0 and max > min");
  }
  if (!(ramp_minutes > 0.0) || !(recovery_minutes > 0.0) || !(plateau_min_minutes > 0.0) ||
      plateau_max_minutes < plateau_min_minutes) {
    throw ArgumentError("event shape lengths must be positive");
  }
  if (class_balance) {
    double sum = 0.0;
    for (double p : *class_balance) {
      if (!(p > 0.0)) throw ArgumentError("class balance shares must be positive");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ArgumentError("class balance shares must sum to 1");
  }
}

double HeatEvent::weight(Timestamp t) const {
  if (t < onset || t >= end()) return 0.0;
  const Timestamp dt = t - onset;
  if (dt < ramp) return static_cast<double>(dt) / static_cast<double>(ramp);
  if (dt <= ramp + plateau) return 1.0;
  return 1.0 - static_cast<double>(dt - ramp - plateau) / static_cast<double>(recovery);
}

std::string worker_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "W%02zu", index + 1);
  return buf;
}

GeneratedData generate(const GeneratorConfig& cfg) {
  cfg.validate();
  const Tables tables = build_tables(cfg);
  const auto seeds = worker_seeds(cfg);
  const double rho = cfg.noise.loading;
  const double rest = std::sqrt(1.0 - rho * rho);

  GeneratedData out;
  for (std::size_t w = 0; w < cfg.workers; ++w) {
    WorkerStreams ws;
    ws.worker_id = worker_name(w);
    for (Channel c : kAllChannels) ws.get_or_add(c);
    Rng worker_rng(seeds[w]);
    for (std::size_t day = 0; day < cfg.days; ++day) {
      const Timestamp day_start = cfg.start_day + static_cast<Timestamp>(day) * 86400;
      DayStreams d = simulate_day(cfg, ws.worker_id, day_start, worker_rng.child_seed());
      const std::vector<double> s = effective_strain(d.paths, d.drawn_events, tables);
      out.script.events.insert(out.script.events.end(), d.drawn_events.begin(), d.drawn_events.end());

      for (std::size_t i = 0; i < d.paths.times.size(); ++i) {
        std::array<double, kNumChannels> clean{};
        std::array<double, kNumChannels> spread{};
        for (std::size_t k = 0; k < kCalibrated.size(); ++k) {
          const double z = kCalibrated[k] == Channel::Stress ? s[i] : kSign[k] * (rho * s[i] + rest * d.paths.noise[k][i]);
          const ChannelCalibration& cal = cfg.calibration[k];
          const double v = tables.channel[k](z) + noise_sd(cfg, k) * d.measurement.normal();
          clean[index_of(kCalibrated[k])] = std::clamp(v, cal.min, cal.max);
          spread[index_of(kCalibrated[k])] = cal.sd;
        }
        const double temp = 31.0 + 3.0 * (0.3 * s[i] + std::sqrt(0.91) * d.paths.noise[4][i]);
        const double hum = 60.0 + 12.0 * (-0.2 * s[i] + std::sqrt(0.96) * d.paths.noise[5][i]);
        clean[index_of(Channel::AmbientTemp)] = std::clamp(temp, 20.0, 45.0);
        clean[index_of(Channel::Humidity)] = std::clamp(hum, 10.0, 100.0);
        spread[index_of(Channel::AmbientTemp)] = 3.0;
        spread[index_of(Channel::Humidity)] = 12.0;

        for (std::size_t c = 0; c < kNumChannels; ++c) {
          std::optional<double> value = round_milli(clean[c]);
          if (d.injection.bernoulli(cfg.missing_rate)) {
            value.reset();
            ++out.missing_injected;
          } else if (d.injection.bernoulli(cfg.outlier_rate)) {
            const double sign = d.injection.bernoulli(0.5) ? 1.0 : -1.0;
            value = round_milli(clean[c] + sign * cfg.outlier_sds * spread[c]);
            ++out.outliers_injected;
          }
          ws.streams[c].push_back(d.paths.times[i], value);
          ++out.samples;
        }
      }
    }
    out.raw.workers.push_back(std::move(ws));
  }
  return out;
}

std::vector<ReferenceLabel> bayes_reference(const GeneratorConfig& cfg, const EventScript& script,
                                            Timestamp window_len) {
  cfg.validate();
  if (window_len <= 0) throw ArgumentError("window length must be positive");
  const Tables tables = build_tables(cfg);
  const auto seeds = worker_seeds(cfg);
  std::vector<ReferenceLabel> out;
  for (std::size_t w = 0; w < cfg.workers; ++w) {
    const std::string id = worker_name(w);
    Rng worker_rng(seeds[w]);
    for (std::size_t day = 0; day < cfg.days; ++day) {
      const Timestamp day_start = cfg.start_day + static_cast<Timestamp>(day) * 86400;
      const DayStreams d = simulate_day(cfg, id, day_start, worker_rng.child_seed());
      const std::vector<double> s = effective_strain(d.paths, events_in(script, id, day_start, day_start + 86400), tables);
      const ChannelCalibration& cal = cfg.calibration[4];
      std::size_t i = 0;
      while (i < s.size()) {
        const Timestamp start = (d.paths.times[i] / window_len) * window_len;
        double sum = 0.0;
        std::size_t n = 0;
        for (; i < s.size() && d.paths.times[i] < start + window_len; ++i, ++n) {
          sum += std::clamp(tables.channel[4](s[i]), cal.min, cal.max);
        }
        const double mean = sum / static_cast<double>(n);
        out.push_back(ReferenceLabel{id, start, stress_band(mean), mean});
      }
    }
  }
  return out;
}

void write_events_csv(std::ostream& out, const EventScript& script) {
  out << "worker_id,onset,duration_s,severity\n";
  for (const HeatEvent& e : script.events) {
    out << e.worker_id << ',' << format_iso8601(e.onset) << ',' << e.duration() << ',' << to_string(e.severity) << '\n';
  }
}

EventScript read_events_csv(std::istream& in, Timestamp ramp_seconds, Timestamp recovery_seconds) {
  EventScript script;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) return script;
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string id, onset, duration, severity;
    if (!std::getline(row, id, ',') || !std::getline(row, onset, ',') || !std::getline(row, duration, ',') ||
        !std::getline(row, severity)) {
      throw ParseError(line_no, "expected worker_id,onset,duration_s,severity");
    }
    HeatEvent e;
    e.worker_id = id;
    const auto t = parse_iso8601(onset);
    const auto sev = parse_risk_level(severity);
    if (!t || !sev) throw ParseError(line_no, "bad event row");
    e.onset = *t;
    e.severity = *sev;
    e.ramp = ramp_seconds;
    e.recovery = recovery_seconds;
    e.plateau = std::stoll(duration) - ramp_seconds - recovery_seconds;
    if (e.plateau < 0) throw ParseError(line_no, "event shorter than its ramps");
    script.events.push_back(std::move(e));
  }
  return script;
}

}  // namespace heatseq
