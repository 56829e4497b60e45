#include <cstdio>
#include <iostream>

#include <heatseq/checkpoint.hpp>
#include <heatseq/errors.hpp>
#include <heatseq/pipeline.hpp>
#include <heatseq/rng.hpp>
#include <heatseq/training.hpp>

#include "commands.hpp"

namespace heatseq::cli {

namespace {

void write_trainlog(const std::filesystem::path& p, const TrainLog& log) {
  write_file(p, [&](std::ostream& out) {
    out << "epoch,train_loss,val_loss,val_acc,seconds\n";
    for (const EpochRecord& e : log.epochs) {
      out << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.val_loss) << ','
          << format_double(e.val_accuracy) << ',' << format_double(e.seconds) << '\n';
    }
  });
}

}  // namespace

void add_train(CLI::App& app, TrainOptions& o) {
  auto* cmd = app.add_subcommand("train", "Train a baseline or attention LSTM on preprocessed instances");
  cmd->add_option("--instances", o.instances, "Instance file from preprocess")->required();
  cmd->add_option("--split", o.split, "Split file (defaults to split.csv next to the instances)");
  cmd->add_option("--out", o.out, "Output directory (defaults to --out-dir)");
  cmd->add_option("--variant", o.variant, "Model variant")
      ->check(CLI::IsMember({"lstm", "lstm-am"}))
      ->capture_default_str();
  cmd->add_option("--epochs", o.epochs, "Maximum epochs (default 20 for lstm, 50 for lstm-am)");
  cmd->add_option("--lr", o.learning_rate, "Adam learning rate")->capture_default_str();
  cmd->add_option("--batch", o.batch, "Mini-batch size")->capture_default_str();
  cmd->add_option("--patience", o.patience, "Early-stopping patience in epochs")->capture_default_str();
  cmd->add_option("--layers", o.layers, "Stacked LSTM layers")->capture_default_str();
  cmd->add_option("--hidden", o.hidden, "Hidden units per layer")->capture_default_str();
  cmd->add_option("--attention-dim", o.attention_dim, "Attention scorer width (0 = hidden)")->capture_default_str();
  cmd->add_option("--dropout", o.dropout, "Dropout rate")->capture_default_str();
  cmd->add_option("--val-fraction", o.val_fraction, "Share of training sequences held out for validation")
      ->capture_default_str();
  cmd->add_option("--checkpoint-name", o.checkpoint_name, "Checkpoint file name")->capture_default_str();
  cmd->add_flag("--quiet", o.quiet, "Do not print per-epoch progress");
}

int run_train(const GlobalOptions& g, const TrainOptions& o, const Argv& argv) {
  const Variant variant = *parse_variant(o.variant);
  TrainConfig cfg = TrainConfig::defaults_for(variant);
  if (o.epochs) cfg.max_epochs = *o.epochs;
  cfg.learning_rate = o.learning_rate;
  cfg.batch_size = o.batch;
  cfg.patience = o.patience;
  cfg.dropout = o.dropout;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  ModelConfig mc;
  mc.variant = variant;
  mc.layers = o.layers;
  mc.hidden = o.hidden;
  mc.attention_dim = o.attention_dim;
  mc.dropout = o.dropout;
  try {
    cfg.validate();
    if (!(o.val_fraction > 0.0 && o.val_fraction < 1.0)) throw ArgumentError("--val-fraction must be in (0, 1)");
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }

  InstanceTable table;
  {
    auto in = open_input(o.instances);
    table = read_instances(in);
  }
  const auto split_path = default_split_path(o.instances, o.split);
  if (split_path.empty()) throw Error("no split file found next to " + o.instances + "; pass --split");
  std::vector<SplitEntry> split;
  {
    auto in = open_input(split_path);
    split = read_split(in);
  }
  mc.input_dim = table.feature_count();
  try {
    mc.validate();
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }

  const auto train_all = sequences_for(table, &split, Partition::Train);
  const TrainValidation tv = carve_validation(train_all, o.val_fraction, mix_seed(g.seed ^ 0x76616cULL));

  const auto dir = output_dir(g, o.out);
  const auto ckpt_path = dir / o.checkpoint_name;
  const auto log_path = dir / "trainlog.csv";
  RunManifest m = begin_manifest("train", argv, g);
  m.set("variant", o.variant);
  m.set("max_epochs", std::to_string(cfg.max_epochs));
  m.set("learning_rate", format_double_short(cfg.learning_rate));
  m.set("batch_size", std::to_string(cfg.batch_size));
  m.set("patience", std::to_string(cfg.patience));
  m.set("min_improvement", format_double_short(cfg.min_improvement));
  m.set("dropout", format_double_short(cfg.dropout));
  m.set("layers", std::to_string(mc.layers));
  m.set("hidden", std::to_string(mc.hidden));
  m.set("attention_dim", std::to_string(mc.resolved_attention_dim()));
  m.set("input_dim", std::to_string(mc.input_dim));
  m.set("seq_len", std::to_string(table.seq_len));
  m.set("val_fraction", format_double_short(o.val_fraction));
  m.set("rng_algorithm", std::string(Rng::kAlgorithm));
  m.set("train_sequences", std::to_string(tv.train.size()));
  m.set("validation_sequences", std::to_string(tv.validation.size()));
  m.add_input(o.instances);
  m.add_input(split_path);

  std::cout << "training " << o.variant << " on " << tv.train.size() << " sequences (" << tv.validation.size()
            << " validation), up to " << cfg.max_epochs << " epochs\n";
  auto on_epoch = [&](const EpochRecord& e) {
    if (o.quiet) return;
    std::printf("epoch %3zu  train %.4f  val %.4f  val_acc %.4f  %.1fs\n", e.epoch, e.train_loss, e.val_loss,
                e.val_accuracy, e.seconds);
    std::fflush(stdout);
  };
  try {
    const TrainResult res = train(mc, tv.train, tv.validation, cfg, on_epoch);
    save_checkpoint(ckpt_path, res.params, cfg.seed);
    write_trainlog(log_path, res.log);
    m.set("stop_reason", std::string(to_string(*res.log.stop_reason)));
    m.set("best_epoch", std::to_string(res.log.best_epoch));
    m.set("clamped_probabilities", std::to_string(res.log.clamped_probabilities));
    m.add_output(ckpt_path);
    m.add_output(log_path);
    finish_manifest(m, dir);
    std::cout << "stopped: " << to_string(*res.log.stop_reason) << ", best epoch " << res.log.best_epoch
              << ", best val loss " << res.log.best_val_loss << '\n'
              << "wrote " << ckpt_path.string() << '\n';
    return kExitOk;
  } catch (const DivergenceError& e) {
    save_checkpoint(ckpt_path, e.last_good(), cfg.seed);
    write_trainlog(log_path, e.log());
    m.set("stop_reason", "diverged");
    m.add_output(ckpt_path);
    m.add_output(log_path);
    finish_manifest(m, dir);
    std::cerr << "error: " << e.what() << "; kept last good checkpoint " << ckpt_path.string() << '\n';
    return kExitRuntime;
  }
}

}  // namespace heatseq::cli
