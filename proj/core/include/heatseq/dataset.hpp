#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heatseq/normalizer.hpp"
#include "heatseq/signal.hpp"
#include "heatseq/windows.hpp"

namespace heatseq {

/// All channels recorded for one worker.
struct WorkerStreams {
  std::string worker_id;
  std::vector<SignalSeries> streams;  // at most one per channel, in channel order

  const SignalSeries* find(Channel c) const;
  SignalSeries& get_or_add(Channel c);
};

struct RawDataset {
  std::vector<WorkerStreams> workers;  // ordered by worker id
  std::size_t sample_count() const;
};

// Raw sample CSV: header `worker_id,timestamp,channel,value`, one sample per row,
// an empty value marking a missing sample. Rows are written per worker, then by
// timestamp, then in channel order.
void write_raw_csv(std::ostream& out, const RawDataset& data);
/// Throws ParseError carrying the 1-based line number of the first bad row.
RawDataset read_raw_csv(std::istream& in);

// Window instance file. First line:
//   #heatseq-instances schema=1 window=60 seq_len=15 label_mode=stressband
// then a column header `worker_id,window_start,<ch>_mean,<ch>_sd,...,label` and one
// row per window.
inline constexpr std::uint32_t kInstanceSchemaVersion = 1;

struct InstanceTable {
  std::uint32_t schema_version = kInstanceSchemaVersion;
  Timestamp window_len = 60;
  std::size_t seq_len = 15;
  LabelMode label_mode = LabelMode::StressBand;
  std::vector<Channel> feature_channels;
  std::vector<WindowInstance> windows;  // grouped by worker, time-ordered

  std::size_t feature_count() const { return 2 * feature_channels.size(); }
};

void write_instances(std::ostream& out, const InstanceTable& table);
InstanceTable read_instances(std::istream& in);

enum class Partition { Train, Test };
std::string_view to_string(Partition p);

/// Partition of the sequence ending at (worker_id, window_start).
struct SplitEntry {
  std::string worker_id;
  Timestamp window_start = 0;
  Partition partition = Partition::Train;
  friend bool operator==(const SplitEntry&, const SplitEntry&) = default;
};

// `worker_id,window_start,partition`
void write_split(std::ostream& out, const std::vector<SplitEntry>& split);
std::vector<SplitEntry> read_split(std::istream& in);

// `channel,min,max`
void write_normalizer(std::ostream& out, const NormalizerParams& p);
NormalizerParams read_normalizer(std::istream& in);

/// 17 significant digits, locale independent.
std::string format_double(double x);
/// Shortest text that reads back to the same double.
std::string format_double_short(double x);
std::optional<double> parse_double(std::string_view s);

}  // namespace heatseq
