#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heatseq/types.hpp"

namespace heatseq {

/// One channel's timestamped samples. A missing sample is an empty optional.
struct SignalSeries {
  Channel channel = Channel::HR;
  std::vector<Timestamp> timestamps;
  std::vector<std::optional<double>> values;

  std::size_t size() const { return timestamps.size(); }
  bool empty() const { return timestamps.empty(); }
  std::size_t missing_count() const;
  std::vector<double> present_values() const;

  void push_back(Timestamp t, std::optional<double> v) {
    timestamps.push_back(t);
    values.push_back(v);
  }

  friend bool operator==(const SignalSeries&, const SignalSeries&) = default;
};

/// Sorts by timestamp and keeps the last sample for duplicated timestamps.
SignalSeries sort_and_deduplicate(SignalSeries s);

/// Splits wherever consecutive timestamps are more than `max_step` seconds apart.
std::vector<SignalSeries> split_on_time_gaps(const SignalSeries& s, Timestamp max_step);

/// Concatenates segments of one channel back into a single series.
SignalSeries concatenate(const std::vector<SignalSeries>& parts);

// "YYYY-MM-DDThh:mm:ssZ" (UTC). Parsing also accepts a "+00:00" suffix or no suffix.
std::optional<Timestamp> parse_iso8601(std::string_view s);
std::string format_iso8601(Timestamp t);

Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour = 0, int minute = 0, int second = 0);

// Seconds since midnight UTC and whole days since epoch.
inline std::int64_t day_index(Timestamp t) { return t >= 0 ? t / 86400 : (t - 86399) / 86400; }

}  // namespace heatseq
