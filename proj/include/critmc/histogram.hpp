#pragma once

#include <cstdint>
#include <vector>

#include "critmc/wide_real.hpp"

namespace critmc {

struct Innovation;

// Geometric binning: positive bin k holds (rho^k, rho^(k+1)], negative
// bin k holds (-rho^(k+1), -rho^k], |x| <= rho^k_min goes to a single
// near-zero bucket, |x| beyond rho^(k_max+1) clamps into the boundary
// bin and bumps an overflow counter.
struct HistogramGeometry {
  double log_rho = 1.0 / 16.0;  // ln of the bin ratio
  std::int32_t k_min = -512;
  std::int32_t k_max = 32000;

  bool operator==(const HistogramGeometry&) const = default;
};

// Packed bin address for scratch buffers: even = positive side, odd =
// negative side, plus sentinels for the near-zero bucket and for values
// clamped into the boundary bin.
using BinCode = std::int32_t;
inline constexpr BinCode kNearZeroBin = INT32_MIN;
inline constexpr BinCode kOverflowPosBin = INT32_MAX;
inline constexpr BinCode kOverflowNegBin = INT32_MAX - 1;

BinCode bin_code(const HistogramGeometry& g, const WideReal& x);

class LogHistogram {
 public:
  explicit LogHistogram(HistogramGeometry g = {});

  const HistogramGeometry& geometry() const { return geom_; }

  void record(double x);
  void record(const WideReal& x) { record_code(bin_code(geom_, x)); }
  void record_code(BinCode code);
  BinCode code_of(const WideReal& x) const { return bin_code(geom_, x); }
  BinCode code_of(double x) const { return code_of(WideReal::from_double(x)); }

  void merge(const LogHistogram& other);  // exact; geometries must match

  std::uint64_t total_steps() const { return total_; }
  std::uint64_t near_zero() const { return near_zero_; }
  std::uint64_t overflow_pos() const { return overflow_pos_; }
  std::uint64_t overflow_neg() const { return overflow_neg_; }
  std::uint64_t pos_weight(std::int32_t k) const { return pos_[idx(k)]; }
  std::uint64_t neg_weight(std::int32_t k) const { return neg_[idx(k)]; }

  double bin_lo(std::int32_t k) const;  // rho^k
  double bin_hi(std::int32_t k) const;  // rho^(k+1)
  // Largest magnitude before clamping sets in.
  double support_hi() const { return bin_hi(geom_.k_max); }
  double near_zero_edge() const { return bin_lo(geom_.k_min); }

  // Weight of (u, v], u < v, with log-uniform apportionment of boundary
  // bins (linear within the near-zero bucket). Accepts +-HUGE_VAL.
  double interval_mass(double u, double v) const;
  // Weight of (-inf, v].
  double mass_below(double v) const { return interval_mass(-HUGE_VAL, v); }

  // Raw (unapportioned) hit count of bins intersecting (u, v]; used to
  // gauge the statistical support behind an interval estimate.
  std::uint64_t interval_hits(double u, double v) const;

  bool empty() const { return total_ == 0; }

 private:
  std::size_t idx(std::int32_t k) const {
    return static_cast<std::size_t>(k - geom_.k_min);
  }
  double side_mass(const std::vector<std::uint64_t>& bins, double lo,
                   double hi) const;  // magnitudes, log apportionment
  std::uint64_t side_hits(const std::vector<std::uint64_t>& bins, double lo,
                          double hi) const;

  HistogramGeometry geom_;
  std::vector<std::uint64_t> pos_, neg_;
  std::uint64_t near_zero_ = 0;
  std::uint64_t overflow_pos_ = 0, overflow_neg_ = 0;
  std::uint64_t total_ = 0;
};

// Observer feeding every visited state into a histogram.
struct HistogramObserver {
  LogHistogram* hist;
  void on_step(std::uint64_t, const WideReal& x, double, const Innovation&) {
    hist->record(x);
  }
};

}  // namespace critmc
