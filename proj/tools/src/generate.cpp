#include <iostream>

#include <heatseq/errors.hpp>
#include <heatseq/synthgen.hpp>

#include "commands.hpp"

namespace heatseq::cli {

void add_generate(CLI::App& app, GenerateOptions& o) {
  auto* cmd = app.add_subcommand("generate", "Write a synthetic raw sample CSV and its event script");
  cmd->add_option("--workers", o.workers, "Number of workers")->capture_default_str();
  cmd->add_option("--days", o.days, "Recording days per worker")->capture_default_str();
  cmd->add_option("--separability", o.separability, "Noise preset")
      ->check(CLI::IsMember({"high", "paper-like"}))
      ->capture_default_str();
  cmd->add_option("--event-rate", o.event_rate, "Heat events per worker-day, in [0, 1]");
  cmd->add_option("--missing-rate", o.missing_rate, "Fraction of samples dropped");
  cmd->add_option("--outlier-rate", o.outlier_rate, "Fraction of samples replaced by outliers");
  cmd->add_option("--sample-period", o.sample_period, "Seconds between samples")->capture_default_str();
  cmd->add_option("--start-date", o.start_date, "First day, YYYY-MM-DD")->capture_default_str();
  cmd->add_option("--class-balance", o.class_balance, "Low,Moderate,High shares of baseline stress")
      ->delimiter(',')
      ->expected(3);
}

void run_generate(const GlobalOptions& g, const GenerateOptions& o, const Argv& argv) {
  GeneratorConfig cfg = GeneratorConfig::preset(*parse_separability(o.separability));
  cfg.workers = o.workers;
  cfg.days = o.days;
  cfg.seed = g.seed;
  cfg.sample_period = o.sample_period;
  if (o.event_rate) cfg.event_rate = *o.event_rate;
  if (o.missing_rate) cfg.missing_rate = *o.missing_rate;
  if (o.outlier_rate) cfg.outlier_rate = *o.outlier_rate;
  const auto start = parse_iso8601(o.start_date + "T00:00:00Z");
  if (!start) throw UsageError("--start-date must be YYYY-MM-DD");
  cfg.start_day = *start;
  if (!o.class_balance.empty()) cfg.class_balance = std::array<double, 3>{o.class_balance[0], o.class_balance[1], o.class_balance[2]};
  try {
    cfg.validate();
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }

  const auto dir = output_dir(g);
  const GeneratedData data = generate(cfg);
  const auto raw_path = dir / "raw.csv";
  const auto events_path = dir / "events.csv";
  write_file(raw_path, [&](std::ostream& out) { write_raw_csv(out, data.raw); });
  write_file(events_path, [&](std::ostream& out) { write_events_csv(out, data.script); });

  RunManifest m = begin_manifest("generate", argv, g);
  m.set("workers", std::to_string(cfg.workers));
  m.set("days", std::to_string(cfg.days));
  m.set("separability", std::string(to_string(cfg.separability)));
  m.set("event_rate", format_double_short(cfg.event_rate));
  m.set("missing_rate", format_double_short(cfg.missing_rate));
  m.set("outlier_rate", format_double_short(cfg.outlier_rate));
  m.set("sample_period", std::to_string(cfg.sample_period));
  m.set("start_date", o.start_date);
  m.set("channel_loading", format_double_short(cfg.noise.loading));
  m.set("measurement_fraction", format_double_short(cfg.noise.measurement_fraction));
  m.set("stress_noise_sd", format_double_short(cfg.noise.stress_noise_sd));
  m.add_output(raw_path);
  m.add_output(events_path);
  finish_manifest(m, dir);

  std::cout << "samples " << data.samples << ", missing " << data.missing_injected << ", outliers "
            << data.outliers_injected << ", events " << data.script.events.size() << '\n'
            << "wrote " << raw_path.string() << " and " << events_path.string() << '\n';
}

}  // namespace heatseq::cli
