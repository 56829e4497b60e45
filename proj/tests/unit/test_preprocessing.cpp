#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include <heatseq/cleaning.hpp>
#include <heatseq/errors.hpp>
#include <heatseq/normalizer.hpp>
#include <heatseq/pipeline.hpp>
#include <heatseq/rng.hpp>
#include <heatseq/savgol.hpp>
#include <heatseq/split.hpp>
#include <heatseq/synthgen.hpp>
#include <heatseq/windows.hpp>

#include "preprocessing_oracles.hpp"

namespace heatseq {
namespace {

SignalSeries series(std::vector<std::optional<double>> values, Channel c = Channel::HR, Timestamp t0 = 0,
                    Timestamp step = 10) {
  SignalSeries s;
  s.channel = c;
  for (std::size_t i = 0; i < values.size(); ++i) s.push_back(t0 + static_cast<Timestamp>(i) * step, values[i]);
  return s;
}

std::vector<double> present(const SignalSeries& s) { return s.present_values(); }

// ---- gap interpolation

TEST(InterpolateGaps, Midpoint) {
  EXPECT_EQ(present(interpolate_gaps(series({80, std::nullopt, 100}))), (std::vector<double>{80, 90, 100}));
}

TEST(InterpolateGaps, TwoMissingOnALine) {
  EXPECT_EQ(present(interpolate_gaps(series({10, std::nullopt, std::nullopt, 40}))),
            (std::vector<double>{10, 20, 30, 40}));
}

TEST(InterpolateGaps, NothingMissingIsIdentity) {
  const SignalSeries s = series({3, 1, 4, 1, 5});
  EXPECT_EQ(interpolate_gaps(s), s);
}

TEST(InterpolateGaps, LongGapStaysMissing) {
  std::vector<std::optional<double>> v{1.0};
  for (int i = 0; i < 6; ++i) v.push_back(std::nullopt);
  v.push_back(8.0);
  const SignalSeries out = interpolate_gaps(series(v), 5);
  EXPECT_EQ(out.missing_count(), 6u);
  const SignalSeries filled = interpolate_gaps(series(v), 6);
  EXPECT_EQ(present(filled), (std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8}));
}

TEST(InterpolateGaps, EdgesAreTrimmed) {
  const SignalSeries out = interpolate_gaps(series({std::nullopt, 2.0, std::nullopt, 4.0, std::nullopt}));
  EXPECT_EQ(out.timestamps, (std::vector<Timestamp>{10, 20, 30}));
  EXPECT_EQ(present(out), (std::vector<double>{2, 3, 4}));
}

TEST(InterpolateGaps, AllMissingThrows) {
  EXPECT_THROW(interpolate_gaps(series({std::nullopt, std::nullopt})), EmptySeriesError);
}

TEST(InterpolateGaps, InterpolatedPointsLieOnTheSegment) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = rng.uniform(-50, 50), b = rng.uniform(-50, 50);
    const std::size_t gap = 1 + rng.below(5);
    std::vector<std::optional<double>> v{a};
    for (std::size_t i = 0; i < gap; ++i) v.push_back(std::nullopt);
    v.push_back(b);
    const auto out = present(interpolate_gaps(series(v)));
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double expect = a + (b - a) * static_cast<double>(i) / static_cast<double>(gap + 1);
      EXPECT_NEAR(out[i], expect, 1e-12);
    }
  }
}

// ---- outliers

TEST(ReplaceOutliers, DocumentedSeries) {
  const std::vector<double> x{90, 91, 89, 90, 300, 91, 90};
  const auto z = testing::loo_z(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i == 4) EXPECT_GT(z[i], 3.0);
    else EXPECT_LE(z[i], 3.0);
  }
  const auto rep = replace_outliers_detailed(series({90, 91, 89, 90, 300, 91, 90}));
  EXPECT_EQ(rep.replaced, 1u);
  EXPECT_EQ(present(rep.series), (std::vector<double>{90, 91, 89, 90, 90.5, 91, 90}));
}

TEST(ReplaceOutliers, ConstantSeriesUnchanged) {
  const SignalSeries s = series({5, 5, 5, 5, 5});
  EXPECT_EQ(replace_outliers(s), s);
}

TEST(ReplaceOutliers, NoFlaggedSampleIsIdentity) {
  const SignalSeries s = series({1, 2, 3, 4, 5, 6, 7});
  EXPECT_EQ(replace_outliers(s), s);
}

TEST(ReplaceOutliers, Idempotent) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::optional<double>> v;
    for (int i = 0; i < 60; ++i) v.push_back(rng.normal() * 3 + 50);
    for (int k = 0; k < 3; ++k) v[rng.below(60)] = 50 + (rng.bernoulli(0.5) ? 40.0 : -40.0);
    const SignalSeries once = replace_outliers(series(v));
    EXPECT_EQ(replace_outliers(once), once);
  }
}

TEST(ReplaceOutliers, NeedsThreeValues) {
  EXPECT_THROW(replace_outliers(series({1, 2})), ArgumentError);
}

// ---- Savitzky-Golay

TEST(SavitzkyGolay, FivePointQuadraticCoefficients) {
  const SmootherSpec spec = make_smoother(2, 2);
  const std::vector<double> expected{-3.0 / 35, 12.0 / 35, 17.0 / 35, 12.0 / 35, -3.0 / 35};
  const auto oracle = testing::sg_oracle(2, 2);
  ASSERT_EQ(spec.coefficients.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(spec.coefficients[i], expected[i], 1e-12);
    EXPECT_NEAR(oracle[i], expected[i], 1e-15);
  }
}

TEST(SavitzkyGolay, CoefficientsMatchNormalEquations) {
  for (int k = 1; k <= 6; ++k)
    for (int d = 0; d < std::min(2 * k + 1, 6); ++d) {
      const SmootherSpec spec = make_smoother(k, d);
      const auto oracle = testing::sg_oracle(k, d);
      double sum = 0;
      for (int i = 0; i <= 2 * k; ++i) {
        EXPECT_NEAR(spec.coefficients[i], oracle[i], 1e-12) << "k=" << k << " d=" << d;
        EXPECT_NEAR(spec.coefficients[i], spec.coefficients[2 * k - i], 1e-12);
        sum += spec.coefficients[i];
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(SavitzkyGolay, DegreeMustFitWindow) {
  EXPECT_THROW(make_smoother(1, 3), ArgumentError);
}

TEST(SavitzkyGolay, ReproducesPolynomialsUpToItsDegree) {
  Rng rng(13);
  const SmootherSpec spec = make_smoother(2, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const int deg = static_cast<int>(rng.below(3));
    const double a = rng.uniform(-5, 5), b = rng.uniform(-2, 2), c = rng.uniform(-0.05, 0.05);
    std::vector<std::optional<double>> v;
    for (int t = 0; t < 40; ++t) {
      const double x = t;
      v.push_back(a + (deg >= 1 ? b * x : 0.0) + (deg >= 2 ? c * x * x : 0.0));
    }
    const SmoothResult r = savitzky_golay_smooth(series(v), spec);
    EXPECT_FALSE(r.passed_through);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(*r.series.values[i], *v[i], 1e-9);
  }
}

TEST(SavitzkyGolay, ConstantUnchanged) {
  const SmoothResult r = savitzky_golay_smooth(series(std::vector<std::optional<double>>(12, 7.25)), make_smoother(2, 2));
  for (const auto& v : r.series.values) EXPECT_NEAR(*v, 7.25, 1e-12);
}

TEST(SavitzkyGolay, ShortRunPassesThrough) {
  const SignalSeries s = series({1, 9, 2});
  const SmoothResult r = savitzky_golay_smooth(s, make_smoother(2, 2));
  EXPECT_TRUE(r.passed_through);
  EXPECT_EQ(r.series, s);
}

TEST(SavitzkyGolay, InteriorIsTheConvolution) {
  Rng rng(14);
  std::vector<std::optional<double>> v;
  for (int i = 0; i < 30; ++i) v.push_back(rng.uniform(0, 10));
  const SmootherSpec spec = make_smoother(2, 2);
  const SmoothResult r = savitzky_golay_smooth(series(v), spec);
  for (std::size_t t = 2; t + 2 < v.size(); ++t) {
    double y = 0;
    for (std::size_t i = 0; i < 5; ++i) y += spec.coefficients[i] * *v[t + i - 2];
    EXPECT_NEAR(*r.series.values[t], y, 1e-12);
  }
}

// ---- normalizer

TEST(Normalizer, FitsMinAndMax) {
  const auto p = fit_normalizer({{Channel::HR, {60, 100}}});
  EXPECT_EQ(p.range(Channel::HR), (ChannelRange{60, 100}));
}

TEST(Normalizer, FieldHeartRateRange) {
  const ChannelCalibration& hr = kFieldCalibration[0];
  const auto p = fit_normalizer({{Channel::HR, {hr.mean, hr.min, hr.max, 90.0}}});
  EXPECT_EQ(p.range(Channel::HR).min, 60.0);
  EXPECT_EQ(p.range(Channel::HR).max, 129.0);
  EXPECT_EQ(p.scale(Channel::HR, 60.0), 0.0);
  EXPECT_EQ(p.scale(Channel::HR, 94.5), 0.5);
  EXPECT_EQ(p.scale(Channel::HR, 140.0), 1.0);
  EXPECT_EQ(p.scale(Channel::HR, 10.0), 0.0);
}

TEST(Normalizer, ConstantChannelNamesTheChannel) {
  try {
    fit_normalizer({{Channel::SpO2, {97, 97, 97}}});
    FAIL();
  } catch (const DegenerateChannelError& e) {
    EXPECT_EQ(e.channel(), "SpO2");
  }
}

TEST(Normalizer, UnknownChannelThrows) {
  const auto p = fit_normalizer({{Channel::HR, {60, 100}}});
  EXPECT_THROW(apply_normalizer(p, series({1, 2}, Channel::HRV)), ArgumentError);
}

TEST(Normalizer, RoundTripInsideRange) {
  Rng rng(15);
  const auto p = fit_normalizer({{Channel::HRV, {400, 799}}});
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(400, 799);
    const double s = p.scale(Channel::HRV, x);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    EXPECT_NEAR(p.invert(Channel::HRV, s), x, 1e-9);
  }
}

TEST(Normalizer, ApplyKeepsMissingMarkers) {
  const auto p = fit_normalizer({{Channel::HR, {60, 129}}});
  const SignalSeries out = apply_normalizer(p, series({60, std::nullopt, 129}));
  EXPECT_EQ(out.values[0], 0.0);
  EXPECT_FALSE(out.values[1]);
  EXPECT_EQ(out.values[2], 1.0);
}

// ---- windows and labels

std::vector<SignalSeries> full_streams(Timestamp seconds, double hr, double stress) {
  std::vector<std::optional<double>> a, b;
  for (Timestamp t = 0; t < seconds; t += 10) {
    a.push_back(hr);
    b.push_back(stress);
  }
  return {series(a, Channel::HR), series(b, Channel::Stress)};
}

TEST(Windows, TenMinutesGiveTenWindows) {
  const auto streams = full_streams(600, 80, 10);
  const SegmentResult r = segment_windows("W01", streams);
  EXPECT_EQ(r.windows.size(), 10u);
  EXPECT_EQ(r.excluded, 0u);
  for (std::size_t i = 0; i < r.windows.size(); ++i) EXPECT_EQ(r.windows[i].window_start, static_cast<Timestamp>(60 * i));
}

TEST(Windows, UnfilledGapExcludesItsWindow) {
  auto streams = full_streams(600, 80, 10);
  for (int i = 12; i < 18; ++i) streams[0].values[i].reset();  // all of [120, 180)
  const SegmentResult r = segment_windows("W01", streams);
  EXPECT_EQ(r.excluded, 1u);
  EXPECT_EQ(r.windows.size(), 9u);
}

TEST(Windows, ConstantChannelHasZeroSd) {
  const SegmentResult r = segment_windows("W01", full_streams(120, 80, 10));
  EXPECT_EQ(r.windows[0].at(Channel::HR).sd, 0.0);
  EXPECT_EQ(r.windows[0].at(Channel::HR).mean, 80.0);
  EXPECT_EQ(r.windows[0].at(Channel::HR).count, 6u);
}

TEST(Windows, NoCompleteWindowIsEmpty) {
  auto streams = full_streams(20, 80, 10);
  const SegmentResult r = segment_windows("W01", streams);
  EXPECT_TRUE(r.windows.empty());
  EXPECT_EQ(r.excluded, r.candidates);
}

WindowInstance window_with(std::map<Channel, double> means) {
  WindowInstance w;
  w.worker_id = "W01";
  for (const auto& [c, m] : means) w.stats[index_of(c)] = ChannelStats{m, 0.0, 6};
  return w;
}

TEST(Labels, StressBand) {
  EXPECT_EQ(label_window(window_with({{Channel::Stress, 10}}), LabelMode::StressBand), RiskLevel::Low);
  EXPECT_EQ(label_window(window_with({{Channel::Stress, 80}}), LabelMode::StressBand), RiskLevel::High);
  EXPECT_EQ(label_window(window_with({{Channel::Stress, 50}}), LabelMode::StressBand), RiskLevel::Moderate);
  EXPECT_EQ(stress_band(25.9), RiskLevel::Low);
  EXPECT_EQ(stress_band(26.0), RiskLevel::Moderate);
  EXPECT_EQ(stress_band(75.9), RiskLevel::Moderate);
  EXPECT_EQ(stress_band(76.0), RiskLevel::High);
}

TEST(Labels, MultiParamAllLow) {
  const auto w = window_with(
      {{Channel::HR, 70}, {Channel::HRV, 750}, {Channel::SpO2, 97}, {Channel::Stress, 10}, {Channel::RespRate, 15}});
  EXPECT_EQ(label_window(w, LabelMode::MultiParam), RiskLevel::Low);
}

TEST(Labels, TieGoesUp) {
  const std::vector<RiskLevel> votes{RiskLevel::Low, RiskLevel::Low, RiskLevel::Moderate, RiskLevel::Moderate,
                                     RiskLevel::High};
  EXPECT_EQ(majority_vote(votes), RiskLevel::Moderate);
  const std::vector<RiskLevel> three_way{RiskLevel::Low, RiskLevel::Moderate, RiskLevel::High};
  EXPECT_EQ(majority_vote(three_way), RiskLevel::High);
}

TEST(Labels, BandClosures) {
  EXPECT_EQ(heart_rate_risk(59), RiskLevel::Moderate);
  EXPECT_EQ(heart_rate_risk(94), RiskLevel::Low);
  EXPECT_EQ(heart_rate_risk(95), RiskLevel::Moderate);
  EXPECT_EQ(heart_rate_risk(170), RiskLevel::Moderate);
  EXPECT_EQ(heart_rate_risk(186), RiskLevel::High);
  EXPECT_EQ(hrv_risk(701), RiskLevel::Low);
  EXPECT_EQ(hrv_risk(700), RiskLevel::Moderate);
  EXPECT_EQ(hrv_risk(500), RiskLevel::Moderate);
  EXPECT_EQ(hrv_risk(499), RiskLevel::High);
  EXPECT_EQ(spo2_risk(95), RiskLevel::Low);
  EXPECT_EQ(spo2_risk(90), RiskLevel::Moderate);
  EXPECT_EQ(spo2_risk(89), RiskLevel::High);
  EXPECT_EQ(respiration_risk(11), RiskLevel::High);
  EXPECT_EQ(respiration_risk(12), RiskLevel::Low);
  EXPECT_EQ(respiration_risk(18), RiskLevel::Low);
  EXPECT_EQ(respiration_risk(19), RiskLevel::Moderate);
  EXPECT_EQ(respiration_risk(25), RiskLevel::High);
}

TEST(Labels, MissingChannelIsNamed) {
  try {
    label_window(window_with({{Channel::HR, 70}}), LabelMode::MultiParam);
    FAIL();
  } catch (const LabelingError& e) {
    EXPECT_EQ(e.channel(), "HRV");
  }
}

// ---- split

TEST(Split, StudySampleCounts) {
  Rng rng(16);
  const auto labels = testing::labels_with_shares(418518, {0.5, 0.35, 0.15}, rng);
  const SplitIndices s = stratified_split(labels, 0.8, 99);
  EXPECT_EQ(s.train.size(), 334814u);
  EXPECT_EQ(s.test.size(), 83704u);
  std::array<double, 3> total{}, train{};
  for (RiskLevel l : labels) total[index_of(l)] += 1;
  for (std::size_t i : s.train) train[index_of(labels[i])] += 1;
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_NEAR(train[c] / total[c], 0.8, 0.02);
    EXPECT_NEAR(train[c] / static_cast<double>(s.train.size()), total[c] / 418518.0, 0.02);
  }
}

TEST(Split, TenItems) {
  const std::vector<RiskLevel> labels(10, RiskLevel::Low);
  const SplitIndices s = stratified_split(labels, 0.8, 1);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.test.size(), 2u);
}

TEST(Split, PartitionIsExactAndDeterministic) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 20 + rng.below(500);
    const auto labels = testing::labels_with_shares(n, {0.4, 0.4, 0.2}, rng);
    const double ratio = rng.uniform(0.5, 0.9);
    SplitIndices s;
    try {
      s = stratified_split(labels, ratio, trial);
    } catch (const InsufficientDataError&) {
      continue;
    }
    EXPECT_EQ(s.train.size(), static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio)));
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    all.insert(s.test.begin(), s.test.end());
    EXPECT_EQ(all.size(), n);
    const SplitIndices again = stratified_split(labels, ratio, trial);
    EXPECT_EQ(again.train, s.train);
    EXPECT_EQ(again.test, s.test);
  }
}

TEST(Split, ClassWithoutATestMemberThrows) {
  std::vector<RiskLevel> labels(20, RiskLevel::Low);
  labels.push_back(RiskLevel::High);
  EXPECT_THROW(stratified_split(labels, 0.8, 1), InsufficientDataError);
}

// ---- whole pipeline on a small generated set

GeneratorConfig small_generator() {
  GeneratorConfig g = GeneratorConfig::preset(Separability::High);
  g.workers = 3;
  g.days = 1;
  g.seed = 21;
  return g;
}

TEST(Pipeline, FeaturesNormalizedAndCountsConsistent) {
  const GeneratedData data = generate(small_generator());
  PreprocessOptions opt;
  opt.seq_len = 5;
  opt.seed = 3;
  const PreprocessResult r = preprocess(data.raw, opt);
  const auto& d = r.diagnostics;
  EXPECT_EQ(d.windows, r.instances.windows.size());
  EXPECT_EQ(d.windows + d.excluded_windows, d.candidate_windows);
  EXPECT_EQ(d.window_labels[0] + d.window_labels[1] + d.window_labels[2], d.windows);
  EXPECT_EQ(d.sequences, r.split.size());
  EXPECT_EQ(r.instances.feature_channels,
            (std::vector<Channel>{Channel::HR, Channel::HRV, Channel::SpO2, Channel::RespRate}));
  // Features may leave [0, 1] only through clamping, which keeps them inside.
  for (const WindowInstance& w : r.instances.windows) {
    for (double f : w.features(r.instances.feature_channels)) {
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0);
    }
    EXPECT_TRUE(w.label.has_value());
  }
  // 7 hours of sessions at one window a minute.
  EXPECT_EQ(d.candidate_windows, 3u * 7u * 60u);
}

TEST(Pipeline, LabelModesShareFeatureSchema) {
  const GeneratedData data = generate(small_generator());
  PreprocessOptions a;
  a.seq_len = 5;
  PreprocessOptions b = a;
  b.label_mode = LabelMode::MultiParam;
  const PreprocessResult ra = preprocess(data.raw, a);
  const PreprocessResult rb = preprocess(data.raw, b);
  EXPECT_EQ(rb.instances.feature_channels.size(), 5u);
  EXPECT_EQ(ra.instances.feature_channels.size(), 4u);
  std::vector<Channel> without_stress;
  for (Channel c : rb.instances.feature_channels)
    if (c != Channel::Stress) without_stress.push_back(c);
  EXPECT_EQ(without_stress, ra.instances.feature_channels);
  ASSERT_EQ(ra.instances.windows.size(), rb.instances.windows.size());
  std::size_t differ = 0;
  for (std::size_t i = 0; i < ra.instances.windows.size(); ++i)
    differ += ra.instances.windows[i].label != rb.instances.windows[i].label;
  EXPECT_GT(differ, 0u);
}

TEST(Pipeline, Deterministic) {
  const GeneratedData data = generate(small_generator());
  PreprocessOptions opt;
  opt.seq_len = 5;
  const PreprocessResult a = preprocess(data.raw, opt);
  const PreprocessResult b = preprocess(data.raw, opt);
  EXPECT_EQ(a.split, b.split);
  EXPECT_EQ(a.normalizer, b.normalizer);
  ASSERT_EQ(a.instances.windows.size(), b.instances.windows.size());
  for (std::size_t i = 0; i < a.instances.windows.size(); ++i) {
    EXPECT_EQ(a.instances.windows[i].stats, b.instances.windows[i].stats);
  }
}

TEST(Pipeline, SequenceSplitFollowsRatio) {
  const GeneratedData data = generate(small_generator());
  PreprocessOptions opt;
  opt.seq_len = 5;
  const PreprocessResult r = preprocess(data.raw, opt);
  std::size_t train = 0, test = 0;
  for (const SplitEntry& e : r.split) (e.partition == Partition::Train ? train : test)++;
  EXPECT_EQ(train, static_cast<std::size_t>(std::floor(0.8 * static_cast<double>(r.split.size()))));
  EXPECT_GT(test, 0u);
}

}  // namespace
}  // namespace heatseq
