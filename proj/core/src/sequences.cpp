#include "heatseq/sequences.hpp"

#include <algorithm>
#include <set>

#include "heatseq/errors.hpp"

namespace heatseq {

SequenceSet make_sequences(std::span<const WindowInstance> windows, std::size_t length,
                           std::span<const Channel> feature_channels, Timestamp window_len) {
  if (length == 0) throw ArgumentError("sequence length must be >= 1");
  SequenceSet out;
  const std::size_t dim = 2 * feature_channels.size();
  std::set<std::string> seen_workers;

  std::size_t begin = 0;
  while (begin < windows.size()) {
    const std::string& worker = windows[begin].worker_id;
    if (!seen_workers.insert(worker).second) {
      throw ArgumentError("windows of worker " + worker + " are not grouped together");
    }
    std::size_t end = begin;
    while (end < windows.size() && windows[end].worker_id == worker) ++end;

    const std::size_t before = out.sequences.size();
    std::size_t run_start = begin;
    for (std::size_t i = begin; i < end; ++i) {
      if (!windows[i].label) throw ArgumentError("window of worker " + worker + " has no label");
      if (i > begin) {
        const Timestamp step = windows[i].window_start - windows[i - 1].window_start;
        if (step <= 0) throw ArgumentError("windows of worker " + worker + " are not time-ordered");
        if (step != window_len) run_start = i;
      }
      if (i + 1 - run_start >= length) {
        SequenceInstance seq;
        seq.worker_id = worker;
        seq.window_start = windows[i].window_start;
        seq.label = *windows[i].label;
        seq.features = Matrix(length, dim);
        for (std::size_t t = 0; t < length; ++t) {
          const std::vector<double> f = windows[i + 1 - length + t].features(feature_channels);
          std::copy(f.begin(), f.end(), seq.features.row(t).data());
        }
        out.sequences.push_back(std::move(seq));
      }
    }
    if (out.sequences.size() == before) ++out.workers_without_sequences;
    begin = end;
  }
  return out;
}

}  // namespace heatseq
