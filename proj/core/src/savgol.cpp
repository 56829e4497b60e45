#include "heatseq/savgol.hpp"

#include <Eigen/Dense>

#include "heatseq/errors.hpp"

namespace heatseq {

SmootherSpec make_smoother(std::size_t half_width, std::size_t degree) {
  const std::size_t window = 2 * half_width + 1;
  if (degree >= window) {
    throw ArgumentError("Savitzky-Golay degree " + std::to_string(degree) + " needs a window longer than " +
                        std::to_string(window));
  }
  const auto n = static_cast<Eigen::Index>(window);
  const auto m = static_cast<Eigen::Index>(degree + 1);
  Eigen::MatrixXd vander(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) - static_cast<double>(half_width);
    double p = 1.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      vander(i, j) = p;
      p *= x;
    }
  }
  // Hat matrix V (V^T V)^-1 V^T; row p maps window samples to the fitted value at offset p.
  const Eigen::MatrixXd proj = vander.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd hat = vander * proj;

  SmootherSpec spec;
  spec.half_width = half_width;
  spec.degree = degree;
  spec.fit_weights = Matrix(window, window);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      spec.fit_weights(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = hat(r, c);
  auto centre = spec.fit_weights.row(half_width);
  spec.coefficients.assign(centre.begin(), centre.end());
  return spec;
}

namespace {

void smooth_run(std::span<const double> in, std::span<double> out, const SmootherSpec& spec) {
  const std::size_t k = spec.half_width;
  const std::size_t w = spec.window();
  const std::size_t n = in.size();
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t start;
    std::size_t row;
    if (t < k) {
      start = 0;
      row = t;
    } else if (t + k >= n) {
      start = n - w;
      row = t - start;
    } else {
      start = t - k;
      row = k;
    }
    const double* weights = spec.fit_weights.row(row).data();
    double acc = 0.0;
    for (std::size_t i = 0; i < w; ++i) acc += weights[i] * in[start + i];
    out[t] = acc;
  }
}

}  // namespace

SmoothResult savitzky_golay_smooth(const SignalSeries& s, const SmootherSpec& spec) {
  SmoothResult result{s, false};
  std::vector<double> run, smoothed;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!s.values[i]) {
      ++i;
      continue;
    }
    std::size_t end = i;
    run.clear();
    while (end < s.size() && s.values[end]) run.push_back(*s.values[end++]);
    if (run.size() < spec.window()) {
      result.passed_through = true;
    } else {
      smoothed.assign(run.size(), 0.0);
      smooth_run(run, smoothed, spec);
      for (std::size_t j = 0; j < run.size(); ++j) result.series.values[i + j] = smoothed[j];
    }
    i = end;
  }
  return result;
}

}  // namespace heatseq
