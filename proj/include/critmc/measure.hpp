#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "critmc/functionals.hpp"
#include "critmc/histogram.hpp"
#include "critmc/ladder.hpp"

namespace critmc {

inline constexpr double kIrefLo = 1.0;
inline constexpr double kIrefHi = 2.718281828459045;  // e

// Occupation mass of the reference interval (1, e]; the normalization
// nu_hat(I_ref) = 1 shared by every estimator. Throws when empty.
double iref_mass(const LogHistogram& hist, double lo = kIrefLo,
                 double hi = kIrefHi);

// Observer for the single-trajectory (ratio) estimator: occupation
// histogram plus a batched functional channel, batches closed by step
// count so ratio standard errors can be formed batchwise.
class PathAccumulator {
 public:
  PathAccumulator(const ModelSpec& model, HistogramGeometry geometry,
                  std::vector<Functional> functionals, RandomStream fresh_rng,
                  std::uint64_t batch_steps, int thin_fresh_draw = 1,
                  double iref_lo = kIrefLo, double iref_hi = kIrefHi);

  void on_step(std::uint64_t n, const WideReal& x, double s,
               const Innovation& inn);

  LogHistogram hist;
  std::vector<CycleBatch> batches;  // .cycles unused on this path

  void finalize();  // flush the trailing partial batch

 private:
  const ModelSpec model_;
  std::vector<Functional> fns_;
  RandomStream fresh_rng_;
  std::uint64_t batch_steps_;
  int thin_;
  std::int32_t ik0_ = 0, ik1_ = -1;
  std::vector<double> ifrac_;
  CycleBatch cur_;
};

// Ratio (occupation) estimate along one trajectory. The histogram is
// returned raw; normalize at read time via iref_mass.
struct RatioRunResult {
  LogHistogram hist;
  std::vector<CycleBatch> batches;
  SimResult sim;
};
RatioRunResult estimate_ratio_run(const ModelSpec& model, double x0,
                                  std::uint64_t n_steps, RandomStream rng,
                                  HistogramGeometry geometry = {},
                                  std::vector<Functional> functionals = {},
                                  int n_batches = 100,
                                  int thin_fresh_draw = 1);

struct TailPoint {
  double x = 0.0;
  double f_hat = 0.0;
  double stderr_ = 0.0;
  std::uint64_t hits = 0;
  bool missing = false;
};

// f_hat(x) ~ nu((alpha e^x, beta e^x]), per-point Monte Carlo error from
// replica spread; all values carry the nu(I_ref) = 1 normalization.
struct TailProfile {
  double alpha = 1.0;
  double beta = kIrefHi;
  bool negative_side = false;
  std::vector<TailPoint> grid;
  std::vector<std::vector<double>> per_replica;  // [replica][point]
  std::string normalization = "nu(1,e] = 1";

  std::size_t index_of(double x) const;  // nearest grid index; throws if far
};

TailProfile tail_profile(const std::vector<LogHistogram>& replicas,
                         double alpha, double beta,
                         std::span<const double> x_grid,
                         bool negative_side = false);

struct PlateauFit {
  double level = 0.0;
  double slope = 0.0;
  double level_stderr = 0.0;
  double slope_stderr = 0.0;
  double x_mid = 0.0;
  int n_points = 0;
  double window_lo = 0.0, window_hi = 0.0;
  // level / log(beta/alpha) when |slope| is compatible with 0 at 2 sigma
  bool slope_compatible_zero = false;
  double tail_constant = 0.0;
  double tail_constant_stderr = 0.0;
};

// Weighted least squares of f_hat = level + slope * (x - midpoint) over
// the window. Throws on fewer than 8 usable points.
PlateauFit fit_plateau(const TailProfile& profile, double x_lo, double x_hi);

// Largest contiguous x-range in which every grid point has at least
// min_hits raw hits; ties resolved toward larger x.
std::pair<double, double> default_window(const TailProfile& profile,
                                         std::uint64_t min_hits = 1000);

// max over the grid of nu_hat[-x, x] / (1 + x^gamma), normalized scale.
double growth_ratio_max(const LogHistogram& hist, double norm, double gamma,
                        std::span<const double> x_grid);

// nu_hat((1+|x|)^(-gamma)) over the window [-w, w], evaluated binwise at
// log-midpoints (the integrand is bounded; pathwise channel not needed).
double poly_moment_window(const LogHistogram& hist, double norm, double gamma,
                          double w);

// Ratio nu_hat(g)/nu_hat(I_ref) from a batched functional channel, with
// batch-means standard error; scale multiplies the final value.
struct ScalarEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t excluded = 0;
};
ScalarEstimate nu_functional_ratio(const std::vector<CycleBatch>& batches,
                                   std::size_t fn_index, double scale = 1.0);

}  // namespace critmc
