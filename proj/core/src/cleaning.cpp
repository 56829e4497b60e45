#include "heatseq/cleaning.hpp"

#include <cmath>
#include <limits>

#include "heatseq/errors.hpp"

namespace heatseq {

namespace {

constexpr std::size_t kMaxOutlierPasses = 50;

}  // namespace

SignalSeries interpolate_gaps(const SignalSeries& s, std::size_t max_gap) {
  std::size_t first = s.size(), last = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.values[i]) {
      if (first == s.size()) first = i;
      last = i;
    }
  }
  if (first == s.size()) throw EmptySeriesError("series for channel " + std::string(to_string(s.channel)) +
                                                " has no present values");

  SignalSeries out;
  out.channel = s.channel;
  out.timestamps.assign(s.timestamps.begin() + static_cast<std::ptrdiff_t>(first),
                        s.timestamps.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  out.values.assign(s.values.begin() + static_cast<std::ptrdiff_t>(first),
                    s.values.begin() + static_cast<std::ptrdiff_t>(last) + 1);

  std::size_t i = 0;
  while (i < out.size()) {
    if (out.values[i]) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (!out.values[end]) ++end;  // bounded: the last value is present
    const std::size_t run = end - i;
    if (run <= max_gap) {
      const double left = *out.values[i - 1];
      const double right = *out.values[end];
      const double span = static_cast<double>(run + 1);
      for (std::size_t j = i; j < end; ++j) {
        const double frac = static_cast<double>(j - (i - 1)) / span;
        out.values[j] = left + (right - left) * frac;
      }
    }
    i = end;
  }
  return out;
}

OutlierReport replace_outliers_detailed(const SignalSeries& s, double threshold, std::size_t max_gap) {
  if (s.values.size() - s.missing_count() < 3) {
    throw ArgumentError("replace_outliers needs at least three present values");
  }
  OutlierReport report{s, 0, 0, true};
  SignalSeries& cur = report.series;

  while (true) {
    double n = 0.0, mean = 0.0, m2 = 0.0;
    for (const auto& v : cur.values) {
      if (!v) continue;
      n += 1.0;
      const double d = *v - mean;
      mean += d / n;
      m2 += d * (*v - mean);
    }
    if (n < 3.0 || m2 <= 0.0) break;

    std::size_t flagged = 0;
    SignalSeries marked = cur;
    for (auto& v : marked.values) {
      if (!v) continue;
      const double d = *v - mean;
      // Mean and spread of the remaining n-1 samples, from the full-series moments.
      const double loo_mean = mean - d / (n - 1.0);
      const double loo_m2 = std::max(0.0, m2 - d * d * n / (n - 1.0));
      const double loo_sd = std::sqrt(loo_m2 / (n - 2.0));
      const double dev = std::abs(*v - loo_mean);
      const double z = loo_sd > 0.0 ? dev / loo_sd : (dev > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      if (z > threshold) {
        v.reset();
        ++flagged;
      }
    }
    if (flagged == 0) break;
    if (report.passes == kMaxOutlierPasses) {
      report.converged = false;
      break;
    }
    ++report.passes;
    report.replaced += flagged;
    cur = interpolate_gaps(marked, max_gap);
  }
  return report;
}

SignalSeries replace_outliers(const SignalSeries& s, double threshold, std::size_t max_gap) {
  return replace_outliers_detailed(s, threshold, max_gap).series;
}

}  // namespace heatseq
