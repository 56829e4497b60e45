#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "common.hpp"

namespace heatseq::cli {

using Argv = std::vector<std::string>;

struct GenerateOptions {
  std::size_t workers = 19;
  std::size_t days = 5;
  std::string separability = "high";
  std::optional<double> event_rate;
  std::optional<double> missing_rate;
  std::optional<double> outlier_rate;
  std::int64_t sample_period = 10;
  std::string start_date = "2023-06-01";
  std::vector<double> class_balance;
};
void add_generate(CLI::App& app, GenerateOptions& o);
void run_generate(const GlobalOptions& g, const GenerateOptions& o, const Argv& argv);

struct PreprocessOptionsCli {
  std::string input;
  std::string out;
  std::string label_mode = "stressband";
  std::int64_t window = 60;
  std::size_t seq_len = 15;
  double ratio = 0.8;
  std::size_t max_gap = 5;
  double z_threshold = 3.0;
  std::size_t sg_half_width = 2;
  std::size_t sg_degree = 2;
  std::optional<bool> include_stress;
  bool environment = false;
};
void add_preprocess(CLI::App& app, PreprocessOptionsCli& o);
void run_preprocess(const GlobalOptions& g, const PreprocessOptionsCli& o, const Argv& argv);

struct TrainOptions {
  std::string instances;
  std::string split;
  std::string out;
  std::string variant = "lstm-am";
  std::optional<std::size_t> epochs;
  double learning_rate = 0.001;
  std::size_t batch = 64;
  std::size_t patience = 5;
  std::size_t layers = 2;
  std::size_t hidden = 128;
  std::size_t attention_dim = 0;
  double dropout = 0.3;
  double val_fraction = 0.1;
  std::string checkpoint_name = "model.ckpt";
  bool quiet = false;
};
void add_train(CLI::App& app, TrainOptions& o);
int run_train(const GlobalOptions& g, const TrainOptions& o, const Argv& argv);

struct EvaluateOptions {
  std::string checkpoint;
  std::string test;
  std::string split;
  std::string partition = "test";
  std::string out;
};
void add_evaluate(CLI::App& app, EvaluateOptions& o);
void run_evaluate(const GlobalOptions& g, const EvaluateOptions& o, const Argv& argv);

struct PredictOptions {
  std::string checkpoint;
  std::string input;
  std::string output;
  bool explain = false;
};
void add_predict(CLI::App& app, PredictOptions& o);
void run_predict(const GlobalOptions& g, const PredictOptions& o, const Argv& argv);

/// Runs a full command line; returns the process exit code.
int run_command_line(const Argv& argv);

}  // namespace heatseq::cli
