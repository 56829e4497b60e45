#include <iostream>

#include <heatseq/checkpoint.hpp>
#include <heatseq/errors.hpp>
#include <heatseq/pipeline.hpp>
#include <heatseq/report.hpp>

#include "commands.hpp"

namespace heatseq::cli {

void add_predict(CLI::App& app, PredictOptions& o) {
  auto* cmd = app.add_subcommand("predict", "Classify every sequence of an instance file");
  cmd->add_option("--checkpoint", o.checkpoint, "Checkpoint file")->required();
  cmd->add_option("--input", o.input, "Instance file")->required();
  cmd->add_option("--output", o.output, "Write predictions here instead of stdout");
  cmd->add_flag("--explain", o.explain, "Append per-step attention weights (attention models only)");
}

void run_predict(const GlobalOptions&, const PredictOptions& o, const Argv&) {
  const Checkpoint ck = load_checkpoint(o.checkpoint);
  const bool attention = ck.params.config.variant == Variant::LstmAttention;
  if (o.explain && !attention) {
    std::cerr << "warning: --explain ignored, " << o.checkpoint << " is a baseline lstm without attention weights\n";
  }
  std::vector<SequenceInstance> data;
  {
    auto in = open_input(o.input);
    if (in.peek() != std::char_traits<char>::eof()) {
      const InstanceTable table = read_instances(in);
      if (!table.windows.empty() && table.feature_count() != ck.params.config.input_dim) {
        throw ShapeError("checkpoint " + o.checkpoint + " expects " + std::to_string(ck.params.config.input_dim) +
                         " features per step but " + o.input + " has " + std::to_string(table.feature_count()));
      }
      data = sequences_for(table);
    }
  }
  const std::vector<Prediction> preds = predict_all(ck.params, data);

  auto emit = [&](std::ostream& out) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const Prediction& p = preds[i];
      out << data[i].worker_id << ',' << format_iso8601(data[i].window_start) << ',' << to_string(p.label);
      for (double x : p.probabilities) out << ',' << format_double(x);
      if (o.explain && p.attention_weights) {
        for (double a : *p.attention_weights) out << ',' << format_double(a);
      }
      out << '\n';
    }
  };
  if (o.output.empty()) {
    emit(std::cout);
  } else {
    write_file(o.output, emit);
  }
}

}  // namespace heatseq::cli
