#pragma once

#include <cstddef>

#include "heatseq/signal.hpp"

namespace heatseq {

inline constexpr std::size_t kDefaultMaxGap = 5;

/// Fills every run of at most `max_gap` missing samples with the straight line between
/// the samples bounding it (a single missing sample becomes the midpoint of its
/// neighbours). Longer runs stay missing so the windows holding them can be excluded.
/// Leading and trailing missing samples are dropped. Throws EmptySeriesError when no
/// value is present.
SignalSeries interpolate_gaps(const SignalSeries& s, std::size_t max_gap = kDefaultMaxGap);

struct OutlierReport {
  SignalSeries series;
  std::size_t replaced = 0;
  std::size_t passes = 0;
  bool converged = true;
};

/// Flags samples whose leave-one-out z-score exceeds `threshold`, i.e. the sample is
/// compared against the mean and standard deviation of the other samples of the
/// series, then repairs them with interpolate_gaps(). Flag-and-repair is repeated
/// until no sample is flagged, so a second call leaves the result untouched.
/// A series with zero spread is returned unchanged. Needs at least three values.
OutlierReport replace_outliers_detailed(const SignalSeries& s, double threshold = 3.0,
                                        std::size_t max_gap = kDefaultMaxGap);

SignalSeries replace_outliers(const SignalSeries& s, double threshold = 3.0, std::size_t max_gap = kDefaultMaxGap);

}  // namespace heatseq
