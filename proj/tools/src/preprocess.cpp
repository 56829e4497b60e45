#include <iostream>

#include <json.hpp>

#include <heatseq/errors.hpp>
#include <heatseq/pipeline.hpp>

#include "commands.hpp"

namespace heatseq::cli {

void add_preprocess(CLI::App& app, PreprocessOptionsCli& o) {
  auto* cmd = app.add_subcommand("preprocess", "Clean, window, label, split and normalize a raw sample CSV");
  cmd->add_option("--input", o.input, "Raw sample CSV")->required();
  cmd->add_option("--out", o.out, "Output directory (defaults to --out-dir)");
  cmd->add_option("--label-mode", o.label_mode, "Window labelling rule")
      ->check(CLI::IsMember({"stressband", "multiparam"}))
      ->capture_default_str();
  cmd->add_option("--window", o.window, "Window length in seconds")->capture_default_str();
  cmd->add_option("--seq-len", o.seq_len, "Windows per sequence")->capture_default_str();
  cmd->add_option("--ratio", o.ratio, "Training share of the split")->capture_default_str();
  cmd->add_option("--max-gap", o.max_gap, "Longest run of missing samples to interpolate")->capture_default_str();
  cmd->add_option("--z-threshold", o.z_threshold, "Outlier z-score threshold")->capture_default_str();
  cmd->add_option("--sg-half-width", o.sg_half_width, "Savitzky-Golay half width k")->capture_default_str();
  cmd->add_option("--sg-degree", o.sg_degree, "Savitzky-Golay polynomial degree")->capture_default_str();
  cmd->add_flag("--include-stress,!--exclude-stress", o.include_stress,
                "Use the stress index as a model feature (default: only for multiparam labels)");
  cmd->add_flag("--environment", o.environment, "Add ambient temperature and humidity features");
}

void run_preprocess(const GlobalOptions& g, const PreprocessOptionsCli& o, const Argv& argv) {
  PreprocessOptions opt;
  opt.label_mode = *parse_label_mode(o.label_mode);
  opt.windowing.window_len = o.window;
  opt.seq_len = o.seq_len;
  opt.split_ratio = o.ratio;
  opt.max_gap = o.max_gap;
  opt.outlier_threshold = o.z_threshold;
  opt.smoother_half_width = o.sg_half_width;
  opt.smoother_degree = o.sg_degree;
  opt.include_stress = o.include_stress;
  opt.include_environment = o.environment;
  opt.seed = g.seed;
  try {
    opt.validate();
    if (opt.smoother_degree >= 2 * opt.smoother_half_width + 1) throw ArgumentError("--sg-degree must be below the window length");
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }

  RawDataset raw;
  {
    auto in = open_input(o.input);
    raw = read_raw_csv(in);
  }
  const PreprocessResult r = preprocess(raw, opt);
  const auto dir = output_dir(g, o.out);
  const auto instances_path = dir / "instances.csv";
  const auto normalizer_path = dir / "normalizer.csv";
  const auto split_path = dir / "split.csv";
  const auto diag_path = dir / "diagnostics.json";
  write_file(instances_path, [&](std::ostream& out) { write_instances(out, r.instances); });
  write_file(normalizer_path, [&](std::ostream& out) { write_normalizer(out, r.normalizer); });
  write_file(split_path, [&](std::ostream& out) { write_split(out, r.split); });

  const PreprocessDiagnostics& d = r.diagnostics;
  nlohmann::ordered_json j;
  j["workers"] = d.workers;
  j["candidate_windows"] = d.candidate_windows;
  j["excluded_windows"] = d.excluded_windows;
  j["windows"] = d.windows;
  j["sequences"] = d.sequences;
  j["workers_without_sequences"] = d.workers_without_sequences;
  j["outliers_replaced"] = d.outliers_replaced;
  j["segments_passed_through"] = d.segments_passed_through;
  j["segments_dropped"] = d.segments_dropped;
  j["window_labels"] = d.window_labels;
  j["train_sequence_labels"] = d.train_labels;
  j["test_sequence_labels"] = d.test_labels;
  write_file(diag_path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });

  RunManifest m = begin_manifest("preprocess", argv, g);
  m.set("label_mode", o.label_mode);
  m.set("window", std::to_string(o.window));
  m.set("seq_len", std::to_string(o.seq_len));
  m.set("ratio", format_double_short(o.ratio));
  m.set("max_gap", std::to_string(o.max_gap));
  m.set("z_threshold", format_double_short(o.z_threshold));
  m.set("sg_half_width", std::to_string(o.sg_half_width));
  m.set("sg_degree", std::to_string(o.sg_degree));
  std::string channels;
  for (Channel c : r.instances.feature_channels) channels += (channels.empty() ? "" : ",") + std::string(to_string(c));
  m.set("feature_channels", channels);
  m.add_input(o.input);
  for (const auto& p : {instances_path, normalizer_path, split_path, diag_path}) m.add_output(p);
  finish_manifest(m, dir);

  std::cout << "windows " << d.windows << " of " << d.candidate_windows << " (" << d.excluded_windows
            << " excluded), sequences " << d.sequences << ", outliers replaced " << d.outliers_replaced << '\n'
            << "labels Low/Moderate/High: " << d.window_labels[0] << '/' << d.window_labels[1] << '/'
            << d.window_labels[2] << '\n'
            << "wrote " << instances_path.string() << '\n';
}

}  // namespace heatseq::cli
