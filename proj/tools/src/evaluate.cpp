#include <iostream>

#include <heatseq/checkpoint.hpp>
#include <heatseq/errors.hpp>
#include <heatseq/pipeline.hpp>
#include <heatseq/report.hpp>

#include "commands.hpp"

namespace heatseq::cli {

void add_evaluate(CLI::App& app, EvaluateOptions& o) {
  auto* cmd = app.add_subcommand("evaluate", "Score a checkpoint on held-out sequences");
  cmd->add_option("--checkpoint", o.checkpoint, "Checkpoint file")->required();
  cmd->add_option("--test", o.test, "Instance file")->required();
  cmd->add_option("--split", o.split, "Split file (defaults to split.csv next to the instances)");
  cmd->add_option("--partition", o.partition, "Which sequences to score")
      ->check(CLI::IsMember({"test", "train", "all"}))
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory (defaults to --out-dir)");
}

void run_evaluate(const GlobalOptions& g, const EvaluateOptions& o, const Argv& argv) {
  const Checkpoint ck = load_checkpoint(o.checkpoint);
  InstanceTable table;
  {
    auto in = open_input(o.test);
    table = read_instances(in);
  }
  if (table.feature_count() != ck.params.config.input_dim) {
    throw ShapeError("checkpoint " + o.checkpoint + " expects " + std::to_string(ck.params.config.input_dim) +
                     " features per step but " + o.test + " has " + std::to_string(table.feature_count()));
  }
  std::vector<SplitEntry> split;
  std::filesystem::path split_path;
  std::optional<Partition> partition;
  if (o.partition != "all") {
    split_path = default_split_path(o.test, o.split);
    if (split_path.empty()) throw Error("no split file found next to " + o.test + "; pass --split or --partition all");
    auto in = open_input(split_path);
    split = read_split(in);
    partition = o.partition == "test" ? Partition::Test : Partition::Train;
  }
  const auto data = sequences_for(table, partition ? &split : nullptr, partition);
  const EvalReport report = evaluate_model(ck.params, data);

  const std::string checkpoint_id = sha256_file(o.checkpoint);
  const std::string data_hash = sha256_file(o.test);
  const auto dir = output_dir(g, o.out);
  const auto report_path = dir / "report.json";
  const auto roc_path = dir / "roc_points.csv";
  write_file(report_path, [&](std::ostream& out) { out << report_json(report, checkpoint_id, data_hash); });
  write_file(roc_path, [&](std::ostream& out) { write_roc_csv(out, report.roc); });

  RunManifest m = begin_manifest("evaluate", argv, g);
  m.set("partition", o.partition);
  m.set("variant", std::string(to_string(ck.params.config.variant)));
  m.add_input(o.checkpoint);
  m.add_input(o.test);
  if (!split_path.empty()) m.add_input(split_path);
  m.add_output(report_path);
  m.add_output(roc_path);
  finish_manifest(m, dir);

  std::cout << to_string(ck.params.config.variant) << " on " << report.instances << " " << o.partition
            << " sequences\n"
            << metrics_table(report);
}

}  // namespace heatseq::cli
