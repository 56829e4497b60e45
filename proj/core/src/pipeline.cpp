#include "heatseq/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "heatseq/errors.hpp"
#include "heatseq/rng.hpp"
#include "heatseq/savgol.hpp"
#include "heatseq/split.hpp"

namespace heatseq {

namespace {

using AnchorKey = std::pair<std::string, Timestamp>;

Timestamp window_of(Timestamp t, Timestamp len) {
  const Timestamp q = t / len;
  return (t % len != 0 && t < 0 ? q - 1 : q) * len;
}

std::vector<Channel> union_of(std::vector<Channel> a, std::span<const Channel> b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

void drop_other_channels(WindowInstance& w, std::span<const Channel> keep) {
  for (Channel c : kAllChannels) {
    if (std::find(keep.begin(), keep.end(), c) == keep.end()) w.stats[index_of(c)].reset();
  }
}

}  // namespace

std::vector<Channel> PreprocessOptions::feature_channels() const {
  const bool stress = include_stress.value_or(label_mode != LabelMode::StressBand);
  std::vector<Channel> out;
  for (Channel c : kPhysiologicalChannels) {
    if (c != Channel::Stress || stress) out.push_back(c);
  }
  if (include_environment) {
    out.push_back(Channel::AmbientTemp);
    out.push_back(Channel::Humidity);
  }
  return out;
}

std::vector<Channel> PreprocessOptions::label_channels() const {
  if (label_mode == LabelMode::StressBand) return {Channel::Stress};
  return {kPhysiologicalChannels.begin(), kPhysiologicalChannels.end()};
}

void PreprocessOptions::validate() const {
  if (seq_len == 0) throw ArgumentError("sequence length must be >= 1");
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ArgumentError("split ratio must be in (0, 1)");
  if (windowing.window_len <= 0) throw ArgumentError("window length must be positive");
  if (max_time_step <= 0) throw ArgumentError("max time step must be positive");
  if (!(outlier_threshold > 0.0)) throw ArgumentError("outlier threshold must be positive");
}

WorkerStreams clean_worker(const WorkerStreams& raw, const PreprocessOptions& opt, std::span<const Channel> channels,
                           PreprocessDiagnostics* diag) {
  const SmootherSpec smoother = make_smoother(opt.smoother_half_width, opt.smoother_degree);
  WorkerStreams out;
  out.worker_id = raw.worker_id;
  for (Channel c : channels) {
    SignalSeries& cleaned = out.get_or_add(c);
    const SignalSeries* series = raw.find(c);
    if (!series) continue;
    std::vector<SignalSeries> parts;
    for (const SignalSeries& seg : split_on_time_gaps(*series, opt.max_time_step)) {
      if (seg.missing_count() == seg.size()) {
        if (diag) ++diag->segments_dropped;
        continue;
      }
      SignalSeries s = interpolate_gaps(seg, opt.max_gap);
      if (s.size() - s.missing_count() >= 3) {
        OutlierReport rep = replace_outliers_detailed(s, opt.outlier_threshold, opt.max_gap);
        if (diag) diag->outliers_replaced += rep.replaced;
        s = std::move(rep.series);
      }
      SmoothResult sm = savitzky_golay_smooth(s, smoother);
      if (diag && sm.passed_through) ++diag->segments_passed_through;
      parts.push_back(std::move(sm.series));
    }
    if (!parts.empty()) {
      cleaned = concatenate(parts);
      cleaned.channel = c;
    }
  }
  return out;
}

PreprocessResult preprocess(const RawDataset& raw, const PreprocessOptions& opt) {
  opt.validate();
  PreprocessResult result;
  PreprocessDiagnostics& diag = result.diagnostics;
  const std::vector<Channel> features = opt.feature_channels();
  const std::vector<Channel> needed = union_of(features, opt.label_channels());

  std::vector<WorkerStreams> cleaned;
  std::vector<WindowInstance> windows;
  for (const WorkerStreams& w : raw.workers) {
    ++diag.workers;
    cleaned.push_back(clean_worker(w, opt, needed, &diag));
    const WorkerStreams& cw = cleaned.back();
    SegmentResult seg = segment_windows(cw.worker_id, cw.streams, opt.windowing);
    diag.candidate_windows += seg.candidates;
    diag.excluded_windows += seg.excluded;
    for (WindowInstance& win : seg.windows) {
      win.label = label_window(win, opt.label_mode);
      ++diag.window_labels[index_of(*win.label)];
      windows.push_back(std::move(win));
    }
  }
  diag.windows = windows.size();

  const SequenceSet seqs = make_sequences(windows, opt.seq_len, features, opt.windowing.window_len);
  diag.sequences = seqs.sequences.size();
  diag.workers_without_sequences = seqs.workers_without_sequences;
  if (seqs.sequences.empty()) throw InsufficientDataError("no complete sequences of length " + std::to_string(opt.seq_len));

  std::vector<RiskLevel> labels;
  labels.reserve(seqs.sequences.size());
  for (const auto& s : seqs.sequences) labels.push_back(s.label);
  const SplitIndices idx = stratified_split(labels, opt.split_ratio, opt.seed);

  std::set<AnchorKey> train_anchors;
  for (std::size_t i : idx.train) {
    train_anchors.emplace(seqs.sequences[i].worker_id, seqs.sequences[i].window_start);
    ++diag.train_labels[index_of(labels[i])];
  }
  for (std::size_t i : idx.test) ++diag.test_labels[index_of(labels[i])];
  result.split.reserve(seqs.sequences.size());
  for (const auto& s : seqs.sequences) {
    const bool train = train_anchors.count({s.worker_id, s.window_start}) != 0;
    result.split.push_back(SplitEntry{s.worker_id, s.window_start, train ? Partition::Train : Partition::Test});
  }

  std::map<Channel, std::vector<double>> fit_values;
  for (Channel c : features) fit_values[c];
  for (const WorkerStreams& cw : cleaned) {
    for (Channel c : features) {
      const SignalSeries* s = cw.find(c);
      if (!s) continue;
      for (std::size_t i = 0; i < s->size(); ++i) {
        if (!s->values[i]) continue;
        if (train_anchors.count({cw.worker_id, window_of(s->timestamps[i], opt.windowing.window_len)})) {
          fit_values[c].push_back(*s->values[i]);
        }
      }
    }
  }
  result.normalizer = fit_normalizer(fit_values);

  InstanceTable& table = result.instances;
  table.window_len = opt.windowing.window_len;
  table.seq_len = opt.seq_len;
  table.label_mode = opt.label_mode;
  table.feature_channels = features;
  table.windows.reserve(windows.size());
  std::size_t next = 0;
  for (const WorkerStreams& cw : cleaned) {
    WorkerStreams scaled;
    scaled.worker_id = cw.worker_id;
    for (const SignalSeries& s : cw.streams) {
      const bool is_feature = std::find(features.begin(), features.end(), s.channel) != features.end();
      scaled.streams.push_back(is_feature ? apply_normalizer(result.normalizer, s) : s);
    }
    SegmentResult seg = segment_windows(scaled.worker_id, scaled.streams, opt.windowing);
    for (WindowInstance& win : seg.windows) {
      if (next >= windows.size() || windows[next].worker_id != win.worker_id ||
          windows[next].window_start != win.window_start) {
        throw StateError("normalized windows do not line up with labelled windows");
      }
      win.label = windows[next++].label;
      drop_other_channels(win, features);
      table.windows.push_back(std::move(win));
    }
  }
  if (next != windows.size()) throw StateError("normalized windows do not line up with labelled windows");
  return result;
}

std::vector<SequenceInstance> sequences_for(const InstanceTable& table, const std::vector<SplitEntry>* split,
                                            std::optional<Partition> partition) {
  SequenceSet all = make_sequences(table.windows, table.seq_len, table.feature_channels, table.window_len);
  if (!split || !partition) return std::move(all.sequences);
  std::map<AnchorKey, Partition> lookup;
  for (const SplitEntry& e : *split) lookup.emplace(AnchorKey{e.worker_id, e.window_start}, e.partition);
  std::vector<SequenceInstance> out;
  for (SequenceInstance& s : all.sequences) {
    const auto it = lookup.find({s.worker_id, s.window_start});
    if (it != lookup.end() && it->second == *partition) out.push_back(std::move(s));
  }
  return out;
}

TrainValidation carve_validation(const std::vector<SequenceInstance>& train, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ArgumentError("validation fraction must be in (0, 1)");
  auto [fit, held] = split_dataset(train, [](const SequenceInstance& s) { return s.label; }, 1.0 - fraction, seed);
  return TrainValidation{std::move(fit), std::move(held)};
}

}  // namespace heatseq
