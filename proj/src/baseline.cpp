#include "critmc/baseline.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace critmc {

double contractive_tail_index(const ModelSpec& model) {
  const auto* ln = std::get_if<LogNormalLaw>(&model.a_law);
  if (!ln) {
    throw std::invalid_argument(
        "contractive_tail_index: closed form requires a LogNormal A-law");
  }
  if (!(ln->m < 0.0) || !(ln->s2 > 0.0)) {
    throw std::invalid_argument("contractive_tail_index: requires m < 0, s2 > 0");
  }
  return -2.0 * ln->m / ln->s2;
}

TailIndexFit fit_tail_index(const LogHistogram& hist, double x_lo,
                            double x_hi) {
  if (!(x_lo > 0.0 && x_hi > x_lo)) {
    throw std::invalid_argument("fit_tail_index: bad window");
  }
  const auto& g = hist.geometry();
  const double total = double(hist.total_steps());
  if (!(total > 0.0)) throw std::runtime_error("fit_tail_index: empty histogram");

  // Complementary counts at bin edges rho^k, cumulated from the top so
  // the edge semantics are exact (no floating-point edge queries).
  std::int32_t k_lo = std::int32_t(std::ceil(std::log(x_lo) / g.log_rho));
  std::int32_t k_hi = std::int32_t(std::floor(std::log(x_hi) / g.log_rho));
  k_lo = std::max(k_lo, g.k_min);
  k_hi = std::min(k_hi, g.k_max);
  std::vector<double> xs, ys;
  std::uint64_t cum = 0;
  std::vector<std::uint64_t> tail_count(std::size_t(k_hi - k_lo + 1), 0);
  for (std::int32_t k = g.k_max; k >= k_lo; --k) {
    cum += hist.pos_weight(k) + hist.neg_weight(k);
    if (k <= k_hi) tail_count[std::size_t(k - k_lo)] = cum;
  }
  for (std::int32_t k = k_lo; k <= k_hi; ++k) {
    const std::uint64_t count = tail_count[std::size_t(k - k_lo)];
    if (count == 0) continue;
    xs.push_back(double(k) * g.log_rho);  // log of the edge
    ys.push_back(std::log(double(count) / total));
  }
  if (xs.size() < 8) {
    throw std::runtime_error("fit_tail_index: fewer than 8 usable points");
  }
  const std::size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double det = double(n) * sxx - sx * sx;
  const double slope = (double(n) * sxy - sx * sy) / det;
  const double icept = (sy - slope * sx) / double(n);
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - (icept + slope * xs[i]);
    rss += e * e;
  }
  TailIndexFit fit;
  fit.alpha = -slope;
  fit.n_points = int(n);
  if (n > 2) {
    const double s2 = rss / double(n - 2);
    fit.stderr_ = std::sqrt(s2 * double(n) / det);
  }
  return fit;
}

}  // namespace critmc
