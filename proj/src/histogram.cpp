#include "critmc/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace critmc {

LogHistogram::LogHistogram(HistogramGeometry g) : geom_(g) {
  if (!(g.log_rho > 0.0) || g.k_max < g.k_min) {
    throw std::invalid_argument("histogram: bad geometry");
  }
  const std::size_t n = static_cast<std::size_t>(g.k_max - g.k_min + 1);
  pos_.assign(n, 0);
  neg_.assign(n, 0);
}

double LogHistogram::bin_lo(std::int32_t k) const {
  return std::exp(double(k) * geom_.log_rho);
}
double LogHistogram::bin_hi(std::int32_t k) const {
  return std::exp(double(k + 1) * geom_.log_rho);
}

BinCode bin_code(const HistogramGeometry& g, const WideReal& x) {
  const int s = x.sign();
  if (s == 0) return kNearZeroBin;
  const double p = x.log_abs() / g.log_rho;  // fractional bin coordinate
  // Positive side: (rho^k, rho^(k+1)] => k = ceil(p) - 1.
  // Negative side: (-rho^(k+1), -rho^k] => k = floor(p).
  const double kf = (s > 0) ? std::ceil(p) - 1.0 : std::floor(p);
  if (kf < double(g.k_min)) return kNearZeroBin;
  if (kf > double(g.k_max)) {
    return s > 0 ? kOverflowPosBin : kOverflowNegBin;
  }
  const std::int32_t k = static_cast<std::int32_t>(kf);
  return (s > 0) ? (k << 1) : ((k << 1) | 1);
}

void LogHistogram::record_code(BinCode code) {
  ++total_;
  switch (code) {
    case kNearZeroBin:
      ++near_zero_;
      return;
    case kOverflowPosBin:
      ++overflow_pos_;
      ++pos_[idx(geom_.k_max)];
      return;
    case kOverflowNegBin:
      ++overflow_neg_;
      ++neg_[idx(geom_.k_max)];
      return;
    default:
      break;
  }
  const std::int32_t k = code >> 1;
  if (code & 1) {
    ++neg_[idx(k)];
  } else {
    ++pos_[idx(k)];
  }
}

void LogHistogram::record(double x) { record(WideReal::from_double(x)); }

void LogHistogram::merge(const LogHistogram& other) {
  if (!(geom_ == other.geom_)) {
    throw std::invalid_argument("histogram: geometry mismatch in merge");
  }
  for (std::size_t i = 0; i < pos_.size(); ++i) {
    pos_[i] += other.pos_[i];
    neg_[i] += other.neg_[i];
  }
  near_zero_ += other.near_zero_;
  overflow_pos_ += other.overflow_pos_;
  overflow_neg_ += other.overflow_neg_;
  total_ += other.total_;
}

double LogHistogram::side_mass(const std::vector<std::uint64_t>& bins,
                               double lo, double hi) const {
  // lo, hi are magnitudes with near_zero_edge() <= lo < hi.
  const double lr = geom_.log_rho;
  double plo = std::log(lo) / lr;
  double phi = (hi >= HUGE_VAL) ? double(geom_.k_max) + 1.0 : std::log(hi) / lr;
  plo = std::max(plo, double(geom_.k_min));
  phi = std::min(phi, double(geom_.k_max) + 1.0);
  if (phi <= plo) return 0.0;
  const std::int32_t k0 =
      std::max(geom_.k_min, std::int32_t(std::floor(plo)));
  const std::int32_t k1 =
      std::min(geom_.k_max, std::int32_t(std::ceil(phi)) - 1);
  double mass = 0.0;
  for (std::int32_t k = k0; k <= k1; ++k) {
    const double a = std::max(plo, double(k));
    const double b = std::min(phi, double(k) + 1.0);
    if (b > a) mass += double(bins[idx(k)]) * (b - a);
  }
  return mass;
}

std::uint64_t LogHistogram::side_hits(const std::vector<std::uint64_t>& bins,
                                      double lo, double hi) const {
  const double lr = geom_.log_rho;
  double plo = std::log(lo) / lr;
  double phi = (hi >= HUGE_VAL) ? double(geom_.k_max) + 1.0 : std::log(hi) / lr;
  plo = std::max(plo, double(geom_.k_min));
  phi = std::min(phi, double(geom_.k_max) + 1.0);
  if (phi <= plo) return 0;
  const std::int32_t k0 =
      std::max(geom_.k_min, std::int32_t(std::floor(plo)));
  const std::int32_t k1 =
      std::min(geom_.k_max, std::int32_t(std::ceil(phi)) - 1);
  std::uint64_t hits = 0;
  for (std::int32_t k = k0; k <= k1; ++k) hits += bins[idx(k)];
  return hits;
}

double LogHistogram::interval_mass(double u, double v) const {
  if (!(u < v)) return 0.0;
  const double m = near_zero_edge();
  double mass = 0.0;
  // Positive magnitudes above the near-zero edge.
  if (v > m) mass += side_mass(pos_, std::max(u, m), v);
  // Negative side: values in (u, v] with value < -m, i.e. magnitude in
  // [max(|v|, m), |u|). The sign flip swaps closed/open ends; boundary
  // bins are apportioned log-uniformly so the distinction carries no
  // weight.
  if (u < -m) mass += side_mass(neg_, std::max(-std::min(v, -m), m), -u);
  // Near-zero bucket, linear apportionment over [-m, m].
  if (near_zero_ > 0 && u < m && v > -m) {
    const double a = std::max(u, -m);
    const double b = std::min(v, m);
    if (b > a) mass += double(near_zero_) * (b - a) / (2.0 * m);
  }
  return mass;
}

std::uint64_t LogHistogram::interval_hits(double u, double v) const {
  if (!(u < v)) return 0;
  const double m = near_zero_edge();
  std::uint64_t hits = 0;
  if (v > m) hits += side_hits(pos_, std::max(u, m), v);
  if (u < -m) hits += side_hits(neg_, std::max(-std::min(v, -m), m), -u);
  if (u < m && v > -m) hits += near_zero_;
  return hits;
}

}  // namespace critmc
