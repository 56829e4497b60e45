#include "heatseq/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "heatseq/errors.hpp"

namespace heatseq {

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
  if (!std::getline(in, line)) return false;
  ++line_no;
  return true;
}

Timestamp parse_time_field(std::string_view s, std::size_t line_no) {
  const auto t = parse_iso8601(s);
  if (!t) throw ParseError(line_no, "bad timestamp '" + std::string(s) + "'");
  return *t;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string format_double_short(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

const SignalSeries* WorkerStreams::find(Channel c) const {
  for (const auto& s : streams)
    if (s.channel == c) return &s;
  return nullptr;
}

SignalSeries& WorkerStreams::get_or_add(Channel c) {
  for (auto& s : streams)
    if (s.channel == c) return s;
  auto it = std::find_if(streams.begin(), streams.end(), [&](const SignalSeries& s) { return s.channel > c; });
  it = streams.insert(it, SignalSeries{});
  it->channel = c;
  return *it;
}

std::size_t RawDataset::sample_count() const {
  std::size_t n = 0;
  for (const auto& w : workers)
    for (const auto& s : w.streams) n += s.size();
  return n;
}

void write_raw_csv(std::ostream& out, const RawDataset& data) {
  out << "worker_id,timestamp,channel,value\n";
  std::string buf;
  for (const WorkerStreams& w : data.workers) {
    // (timestamp, channel, stream, index)
    std::vector<std::tuple<Timestamp, std::size_t, std::size_t, std::size_t>> rows;
    for (std::size_t si = 0; si < w.streams.size(); ++si) {
      const SignalSeries& s = w.streams[si];
      for (std::size_t i = 0; i < s.size(); ++i) rows.emplace_back(s.timestamps[i], index_of(s.channel), si, i);
    }
    std::sort(rows.begin(), rows.end());
    Timestamp cached_t = 0;
    std::string cached_time;
    for (const auto& [t, ch, si, i] : rows) {
      if (cached_time.empty() || t != cached_t) {
        cached_t = t;
        cached_time = format_iso8601(t);
      }
      const SignalSeries& s = w.streams[si];
      buf.clear();
      buf += w.worker_id;
      buf += ',';
      buf += cached_time;
      buf += ',';
      buf += to_string(s.channel);
      buf += ',';
      if (s.values[i]) buf += format_double_short(*s.values[i]);
      buf += '\n';
      out << buf;
    }
  }
}

RawDataset read_raw_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  RawDataset data;
  if (!next_line(in, line, line_no)) return data;
  if (trim_cr(line) != "worker_id,timestamp,channel,value") {
    throw ParseError(line_no, "expected header 'worker_id,timestamp,channel,value'");
  }
  std::map<std::string, WorkerStreams, std::less<>> workers;
  WorkerStreams* current = nullptr;
  while (next_line(in, line, line_no)) {
    const std::string_view row = trim_cr(line);
    if (row.empty()) continue;
    const auto f = split_fields(row);
    if (f.size() != 4) throw ParseError(line_no, "expected 4 fields, found " + std::to_string(f.size()));
    if (f[0].empty()) throw ParseError(line_no, "empty worker_id");
    if (!current || current->worker_id != f[0]) {
      auto it = workers.find(f[0]);
      if (it == workers.end()) {
        it = workers.emplace(std::string(f[0]), WorkerStreams{}).first;
        it->second.worker_id = std::string(f[0]);
      }
      current = &it->second;
    }
    const Timestamp t = parse_time_field(f[1], line_no);
    const auto channel = parse_channel(f[2]);
    if (!channel) throw ParseError(line_no, "unknown channel '" + std::string(f[2]) + "'");
    std::optional<double> value;
    if (!f[3].empty()) {
      value = parse_double(f[3]);
      if (!value || !std::isfinite(*value)) throw ParseError(line_no, "bad value '" + std::string(f[3]) + "'");
    }
    current->get_or_add(*channel).push_back(t, value);
  }
  for (auto& [id, w] : workers) {
    for (auto& s : w.streams) s = sort_and_deduplicate(std::move(s));
    data.workers.push_back(std::move(w));
  }
  return data;
}

void write_instances(std::ostream& out, const InstanceTable& table) {
  out << "#heatseq-instances schema=" << table.schema_version << " window=" << table.window_len
      << " seq_len=" << table.seq_len << " label_mode=" << to_string(table.label_mode) << '\n';
  out << "worker_id,window_start";
  for (Channel c : table.feature_channels) out << ',' << to_string(c) << "_mean," << to_string(c) << "_sd";
  out << ",label\n";
  for (const WindowInstance& w : table.windows) {
    out << w.worker_id << ',' << format_iso8601(w.window_start);
    for (double x : w.features(table.feature_channels)) out << ',' << format_double(x);
    out << ',' << (w.label ? to_string(*w.label) : std::string_view{}) << '\n';
  }
}

InstanceTable read_instances(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  InstanceTable table;
  if (!next_line(in, line, line_no)) throw ParseError(1, "empty instance file");
  {
    std::istringstream head{std::string(trim_cr(line))};
    std::string tag;
    head >> tag;
    if (tag != "#heatseq-instances") throw ParseError(line_no, "not a heatseq instance file");
    bool have_schema = false;
    for (std::string kv; head >> kv;) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ParseError(line_no, "bad header entry '" + kv + "'");
      const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
      if (key == "schema") {
        have_schema = true;
        if (value != std::to_string(kInstanceSchemaVersion)) {
          throw ParseError(line_no, "unsupported instance schema version " + value);
        }
      } else if (key == "window") {
        table.window_len = std::stoll(value);
      } else if (key == "seq_len") {
        table.seq_len = std::stoul(value);
      } else if (key == "label_mode") {
        const auto m = parse_label_mode(value);
        if (!m) throw ParseError(line_no, "unknown label mode '" + value + "'");
        table.label_mode = *m;
      }
    }
    if (!have_schema) throw ParseError(line_no, "missing schema version");
  }
  if (!next_line(in, line, line_no)) throw ParseError(line_no + 1, "missing column header");
  const std::string header = line;
  const auto cols = split_fields(trim_cr(header));
  if (cols.size() < 3 || cols[0] != "worker_id" || cols[1] != "window_start" || cols.back() != "label" ||
      (cols.size() - 3) % 2 != 0) {
    throw ParseError(line_no, "bad column header");
  }
  for (std::size_t i = 2; i + 1 < cols.size(); i += 2) {
    const std::string_view mean = cols[i];
    if (!mean.ends_with("_mean")) throw ParseError(line_no, "bad feature column '" + std::string(mean) + "'");
    const auto c = parse_channel(mean.substr(0, mean.size() - 5));
    if (!c || cols[i + 1] != std::string(to_string(*c)) + "_sd") {
      throw ParseError(line_no, "bad feature column '" + std::string(mean) + "'");
    }
    table.feature_channels.push_back(*c);
  }
  while (next_line(in, line, line_no)) {
    const std::string_view row = trim_cr(line);
    if (row.empty()) continue;
    const auto f = split_fields(row);
    if (f.size() != cols.size()) {
      throw ParseError(line_no, "expected " + std::to_string(cols.size()) + " fields, found " + std::to_string(f.size()));
    }
    WindowInstance w;
    w.worker_id = std::string(f[0]);
    w.window_start = parse_time_field(f[1], line_no);
    for (std::size_t k = 0; k < table.feature_channels.size(); ++k) {
      const auto mean = parse_double(f[2 + 2 * k]);
      const auto sd = parse_double(f[3 + 2 * k]);
      if (!mean || !sd) throw ParseError(line_no, "bad feature value");
      w.stats[index_of(table.feature_channels[k])] = ChannelStats{*mean, *sd, 0};
    }
    if (!f.back().empty()) {
      w.label = parse_risk_level(f.back());
      if (!w.label) throw ParseError(line_no, "unknown label '" + std::string(f.back()) + "'");
    }
    table.windows.push_back(std::move(w));
  }
  return table;
}

std::string_view to_string(Partition p) { return p == Partition::Train ? "train" : "test"; }

void write_split(std::ostream& out, const std::vector<SplitEntry>& split) {
  out << "worker_id,window_start,partition\n";
  for (const SplitEntry& e : split) {
    out << e.worker_id << ',' << format_iso8601(e.window_start) << ',' << to_string(e.partition) << '\n';
  }
}

std::vector<SplitEntry> read_split(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<SplitEntry> out;
  if (!next_line(in, line, line_no) || trim_cr(line) != "worker_id,window_start,partition") {
    throw ParseError(line_no == 0 ? 1 : line_no, "expected header 'worker_id,window_start,partition'");
  }
  while (next_line(in, line, line_no)) {
    const std::string_view row = trim_cr(line);
    if (row.empty()) continue;
    const auto f = split_fields(row);
    if (f.size() != 3) throw ParseError(line_no, "expected 3 fields");
    SplitEntry e;
    e.worker_id = std::string(f[0]);
    e.window_start = parse_time_field(f[1], line_no);
    if (f[2] == "train") e.partition = Partition::Train;
    else if (f[2] == "test") e.partition = Partition::Test;
    else throw ParseError(line_no, "unknown partition '" + std::string(f[2]) + "'");
    out.push_back(std::move(e));
  }
  return out;
}

void write_normalizer(std::ostream& out, const NormalizerParams& p) {
  out << "channel,min,max\n";
  for (const auto& [c, r] : p.ranges) out << to_string(c) << ',' << format_double(r.min) << ',' << format_double(r.max) << '\n';
}

NormalizerParams read_normalizer(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  NormalizerParams p;
  if (!next_line(in, line, line_no) || trim_cr(line) != "channel,min,max") {
    throw ParseError(line_no == 0 ? 1 : line_no, "expected header 'channel,min,max'");
  }
  while (next_line(in, line, line_no)) {
    const std::string_view row = trim_cr(line);
    if (row.empty()) continue;
    const auto f = split_fields(row);
    if (f.size() != 3) throw ParseError(line_no, "expected 3 fields");
    const auto c = parse_channel(f[0]);
    const auto lo = parse_double(f[1]);
    const auto hi = parse_double(f[2]);
    if (!c || !lo || !hi) throw ParseError(line_no, "bad normalizer row");
    p.ranges[*c] = ChannelRange{*lo, *hi};
  }
  return p;
}

}  // namespace heatseq
