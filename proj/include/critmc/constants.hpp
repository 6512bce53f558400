#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "critmc/measure.hpp"

namespace critmc {

enum class DefectMethod { FromDefinition, FromResidual };

// The Poisson-equation defect psi of f(x) = nu((alpha e^x, beta e^x]):
// averaging f over one walk increment reproduces f plus psi. Estimated
// pointwise by Monte Carlo over mu-draws against the histogram.
struct DefectGrid {
  double alpha = 1.0;
  double beta = kIrefHi;
  std::vector<double> x;
  std::vector<double> psi;      // mean over replicas
  std::vector<double> stderr_;  // replica spread (draw spread when R = 1)
  std::vector<std::vector<double>> per_replica;
  DefectMethod method = DefectMethod::FromDefinition;
  double truncated_fraction = 0.0;  // draws with endpoints past the support
};

DefectGrid defect_from_definition(const ModelSpec& model,
                                  const std::vector<LogHistogram>& replicas,
                                  double alpha, double beta,
                                  std::span<const double> x_grid,
                                  std::uint64_t draws_per_replica,
                                  RandomStream rng);

// Alternative construction psi = (averaged f) - f. Diagnostic only: the
// acceptance path always builds psi from the definition, so the Poisson
// residual stays an independent check rather than a tautology. Fed the
// same stream as poisson_residual it reproduces its average term
// bit-for-bit (the residual is then exactly zero by construction).
DefectGrid defect_from_residual(const TailProfile& profile,
                                const ModelSpec& model,
                                std::span<const double> eval_x,
                                std::uint64_t draws_per_replica,
                                RandomStream rng);

// (averaged g)(x) = E[g(x - log A)], by Monte Carlo with linear
// interpolation on g's (uniform) grid. Points falling off the grid are
// clipped to the edge and counted; a clipped fraction above 1e-3 throws.
struct AveragedGrid {
  std::vector<double> x;
  std::vector<double> value;
  std::vector<double> stderr_;
  std::vector<std::vector<double>> per_replica;
  double clipped_fraction = 0.0;
};

AveragedGrid average_over_log_a(std::span<const double> g_x,
                                const std::vector<std::vector<double>>& g_per_replica,
                                std::span<const double> eval_x,
                                const ModelSpec& model,
                                std::uint64_t draws_per_replica,
                                RandomStream rng);

// Zeroth and first moments of the defect: c1 = integral of psi,
// c2 = -integral of (x+1) psi, trapezoid quadrature, errors propagated
// per replica. Throws when the grid boundary carries significant mass.
struct DefectMoments {
  double c1 = 0.0, c1_stderr = 0.0;
  double c2 = 0.0, c2_stderr = 0.0;
};
DefectMoments defect_moments(const DefectGrid& defect);

// r(x) = (averaged f)(x) - f(x) - psi(x); zero in expectation when the
// histogram is near-invariant. Per-point errors from replica spread.
struct ResidualGrid {
  std::vector<double> x;
  std::vector<double> r;
  std::vector<double> stderr_;
  double sup_abs = 0.0;
  double sup_z = 0.0;  // max |r| / stderr over the grid
  double clipped_fraction = 0.0;
};
ResidualGrid poisson_residual(const TailProfile& profile,
                              const DefectGrid& defect, const ModelSpec& model,
                              std::uint64_t draws_per_replica,
                              RandomStream rng);

// Exponential smoothing kernel exp(-(t-u)) on [u <= t], left-to-right
// exact recurrence with trapezoid quadrature on each increment; g is
// treated as 0 left of the grid.
std::vector<double> smooth(std::span<const double> g, double h);

// Net mu-average of the histogram mass swept across 0 by the shift b:
// -E[nu(-b/a, 0]; b >= 0] + E[nu(0, -b/a]; b < 0]. Vanishes for the
// exact invariant measure.
ScalarEstimate crossing_mass_balance(const ModelSpec& model,
                                     const std::vector<LogHistogram>& replicas,
                                     std::uint64_t draws_per_replica,
                                     RandomStream rng);

// Comparison of the plateau level against the defect-moment prediction
// 2 c2 / sigma2 (level branch), or of the profile slope against
// 2 c1 / sigma2 when c1 is not compatible with zero (slope branch).
struct PlateauLink {
  bool c1_compatible_zero = false;
  bool used_slope_branch = false;
  double plateau = 0.0, plateau_stderr = 0.0;
  double predicted = 0.0, predicted_stderr = 0.0;
  double z = 0.0;        // gap over combined stderr
  double rel_gap = 0.0;  // |gap| / plateau
  double slope = 0.0, slope_stderr = 0.0;
  double predicted_slope = 0.0, predicted_slope_stderr = 0.0;
  double slope_z = 0.0;
};
PlateauLink plateau_identity_check(const PlateauFit& fit,
                                   const DefectMoments& moments,
                                   double sigma2);

// Everything the constants pipeline produces for one model, all under
// the nu(I_ref) = 1 convention.
struct ConstantsReport {
  double sigma2 = 0.0;
  DefectMoments moments;
  ScalarEstimate d1_plus;
  ScalarEstimate c_plus_plateau;   // from the tail profile fit
  ScalarEstimate c_minus_plateau;  // negative side (affine only)
  ScalarEstimate c_plus_formula;   // Letac closed formula (Letac only)
  ScalarEstimate c_sum;            // affine sum formula (affine only)
  std::string normalization = "nu(1,e] = 1";
  std::string model_fingerprint;
  bool has_formula = false;
  bool has_sum = false;
  bool has_minus = false;
};

}  // namespace critmc
