#include <iostream>

#include <heatseq/errors.hpp>

#include "commands.hpp"

namespace heatseq::cli {

int run_command_line(const Argv& argv) {
  CLI::App app{"heatseq: wearable heat-stress sequence classifier"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for training")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Directory for outputs")->capture_default_str();

  GenerateOptions gen;
  PreprocessOptionsCli pre;
  TrainOptions tr;
  EvaluateOptions ev;
  PredictOptions pr;
  std::string manifest_path;
  add_generate(app, gen);
  add_preprocess(app, pre);
  add_train(app, tr);
  add_evaluate(app, ev);
  add_predict(app, pr);
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("manifest", manifest_path, "Manifest file")->required();

  std::vector<const char*> cargv;
  for (const auto& a : argv) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g.threads == 0) throw UsageError("--threads must be >= 1");
    if (app.got_subcommand("generate")) run_generate(g, gen, argv);
    else if (app.got_subcommand("preprocess")) run_preprocess(g, pre, argv);
    else if (app.got_subcommand("train")) return run_train(g, tr, argv);
    else if (app.got_subcommand("evaluate")) run_evaluate(g, ev, argv);
    else if (app.got_subcommand("predict")) run_predict(g, pr, argv);
    else if (app.got_subcommand("replay")) {
      auto in = open_input(manifest_path);
      const RunManifest m = read_manifest(in);
      if (m.argv.size() < 2 || m.command == "replay") throw Error("manifest has no replayable command line");
      return run_command_line(m.argv);
    }
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace heatseq::cli

int main(int argc, char** argv) {
  return heatseq::cli::run_command_line(std::vector<std::string>(argv, argv + argc));
}
