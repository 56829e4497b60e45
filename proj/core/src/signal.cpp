#include "heatseq/signal.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <numeric>

namespace heatseq {

std::size_t SignalSeries::missing_count() const {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](const auto& v) { return !v; }));
}

std::vector<double> SignalSeries::present_values() const {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values)
    if (v) out.push_back(*v);
  return out;
}

SignalSeries sort_and_deduplicate(SignalSeries s) {
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s.timestamps[a] < s.timestamps[b]; });
  SignalSeries out;
  out.channel = s.channel;
  for (std::size_t i : order) {
    if (!out.timestamps.empty() && out.timestamps.back() == s.timestamps[i]) {
      out.values.back() = s.values[i];
    } else {
      out.push_back(s.timestamps[i], s.values[i]);
    }
  }
  return out;
}

std::vector<SignalSeries> split_on_time_gaps(const SignalSeries& s, Timestamp max_step) {
  std::vector<SignalSeries> parts;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (parts.empty() || s.timestamps[i] - parts.back().timestamps.back() > max_step) {
      parts.push_back(SignalSeries{s.channel, {}, {}});
    }
    parts.back().push_back(s.timestamps[i], s.values[i]);
  }
  return parts;
}

SignalSeries concatenate(const std::vector<SignalSeries>& parts) {
  SignalSeries out;
  if (!parts.empty()) out.channel = parts.front().channel;
  for (const auto& p : parts) {
    out.timestamps.insert(out.timestamps.end(), p.timestamps.begin(), p.timestamps.end());
    out.values.insert(out.values.end(), p.values.begin(), p.values.end());
  }
  return out;
}

Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour, int minute, int second) {
  using namespace std::chrono;
  const sys_days d{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}};
  return d.time_since_epoch().count() * 86400LL + hour * 3600LL + minute * 60LL + second;
}

namespace {

bool parse_int(std::string_view s, int& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

std::optional<Timestamp> parse_iso8601(std::string_view s) {
  // YYYY-MM-DDThh:mm:ss
  if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' ||
      s[16] != ':') {
    return std::nullopt;
  }
  const std::string_view rest = s.substr(19);
  if (!(rest.empty() || rest == "Z" || rest == "+00:00")) return std::nullopt;
  int y, mo, d, h, mi, se;
  if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), mo) || !parse_int(s.substr(8, 2), d) ||
      !parse_int(s.substr(11, 2), h) || !parse_int(s.substr(14, 2), mi) || !parse_int(s.substr(17, 2), se)) {
    return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 60 || h < 0 || mi < 0 || se < 0) return std::nullopt;
  return make_timestamp(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, se);
}

std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  const std::int64_t days = day_index(t);
  const std::int64_t secs = t - days * 86400;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(secs / 3600),
                static_cast<int>(secs / 60 % 60), static_cast<int>(secs % 60));
  return buf;
}

}  // namespace heatseq
