#pragma once

#include <cstddef>
#include <vector>

#include "heatseq/matrix.hpp"
#include "heatseq/signal.hpp"

namespace heatseq {

/// Savitzky-Golay smoother of half-width k (window 2k+1) and polynomial degree d.
struct SmootherSpec {
  std::size_t half_width = 0;
  std::size_t degree = 0;
  // c_{-k} .. c_{k}: weights that evaluate the local least-squares fit at the centre.
  std::vector<double> coefficients;
  // Row p evaluates the same fit at window offset p - k; used for the first and last k points.
  Matrix fit_weights;

  std::size_t window() const { return 2 * half_width + 1; }
};

/// Builds the smoother from the least-squares projection. Throws ArgumentError when
/// degree >= window length.
SmootherSpec make_smoother(std::size_t half_width, std::size_t degree);

struct SmoothResult {
  SignalSeries series;
  // Set when some run of present values was shorter than the window and was copied through.
  bool passed_through = false;
};

/// Convolves each run of present values with the centre coefficients; the first and
/// last k points of a run are evaluated from the fit over the first/last full window,
/// so no samples are lost. Missing samples are left as they are.
SmoothResult savitzky_golay_smooth(const SignalSeries& s, const SmootherSpec& spec);

}  // namespace heatseq
