#pragma once

#include <cstdint>

#include "critmc/histogram.hpp"
#include "critmc/model.hpp"

namespace critmc {

// Analytic tail index of the contractive baseline: the positive root of
// E[A^t] = 1 for LogNormal(m, s2) drift, i.e. t = -2m/s2. Throws unless
// the A-law is LogNormal with m < 0.
double contractive_tail_index(const ModelSpec& model);

struct TailIndexFit {
  double alpha = 0.0;
  double stderr_ = 0.0;
  int n_points = 0;
};

// Least squares of log nu_hat(|t| > x) on log x over bin edges in
// [x_lo, x_hi]; the histogram is treated as a probability measure
// (normalized by total mass). Throws on fewer than 8 usable points.
TailIndexFit fit_tail_index(const LogHistogram& hist, double x_lo, double x_hi);

struct KestenBaselineReport {
  double alpha_star_analytic = 0.0;
  double alpha_star_fitted = 0.0;
  double fitted_stderr = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
  std::uint64_t n_steps = 0;
};

}  // namespace critmc
