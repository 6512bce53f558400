#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace critmc {

namespace detail {

// frexp for the common case (normal, nonzero); falls back to std::frexp
// for subnormal input. Returns f in [0.5, 1), sets e with v = f * 2^e.
inline double split_pow2(double v, std::int64_t& e) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  const std::uint64_t expfield = (bits >> 52) & 0x7FF;
  if (expfield == 0 || expfield == 0x7FF) {
    int ei;
    const double f = std::frexp(v, &ei);
    e = ei;
    return f;
  }
  e = std::int64_t(expfield) - 1022;
  bits = (bits & ~(0x7FFull << 52)) | (0x3FEull << 52);
  return std::bit_cast<double>(bits);
}

// f * 2^k for normal f with the result guaranteed normal (|k| small).
inline double scale_pow2(double f, std::int64_t k) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(f);
  bits += std::uint64_t(k) << 52;
  return std::bit_cast<double>(bits);
}

}  // namespace detail

// Scalar with a double mantissa and a 64-bit binary exponent:
// value = frac * 2^exp2, |frac| in [0.5, 1) or frac == 0.
//
// Critical chains make excursions far beyond 1e308, so the chain state
// cannot live in a plain double. While the value is inside normal double
// range, arithmetic here rounds exactly like plain double arithmetic
// (rounding is scale-invariant), so serial reference results match.
struct WideReal {
  double frac = 0.0;
  std::int64_t exp2 = 0;

  static WideReal from_double(double v) {
    if (v == 0.0 || !std::isfinite(v)) return WideReal{v, 0};
    std::int64_t e;
    const double f = detail::split_pow2(v, e);
    return WideReal{f, e};
  }

  // exp(lv) as a WideReal; lv may be far outside double's exponent range.
  static WideReal from_log(double lv) {
    const double e = std::floor(lv / std::numbers::ln2);
    const double m = std::exp(lv - e * std::numbers::ln2);  // in [1, 2)
    return normalized(m, static_cast<std::int64_t>(e));
  }

  static WideReal normalized(double m, std::int64_t e) {
    if (m == 0.0 || !std::isfinite(m)) return WideReal{m, 0};
    std::int64_t em;
    const double fm = detail::split_pow2(m, em);
    return WideReal{fm, e + em};
  }

  bool is_zero() const { return frac == 0.0; }
  bool is_finite() const { return std::isfinite(frac); }
  int sign() const { return frac > 0.0 ? 1 : (frac < 0.0 ? -1 : 0); }
  WideReal negated() const { return WideReal{-frac, exp2}; }

  WideReal mul_pos(double a) const {  // requires a > 0 finite
    if (is_zero()) return *this;
    std::int64_t ea;
    const double fa = detail::split_pow2(a, ea);
    double p = frac * fa;  // |p| in [0.25, 1)
    std::int64_t e = exp2 + ea;
    if (std::fabs(p) < 0.5) {
      p *= 2.0;
      --e;
    }
    return WideReal{p, e};
  }

  WideReal add(const WideReal& o) const {
    if (o.is_zero()) return *this;
    if (is_zero()) return o;
    const std::int64_t gap = exp2 - o.exp2;
    if (gap >= 55) return *this;
    if (gap <= -55) return o;
    // |o.frac| in [0.5, 1) and |gap| < 55 keep the scaled term normal
    const double t = detail::scale_pow2(o.frac, -gap);
    return normalized(frac + t, exp2);
  }
  WideReal add(double b) const { return add(from_double(b)); }
  WideReal sub(const WideReal& o) const { return add(o.negated()); }

  // -1/0/+1 comparison by value.
  static int cmp(const WideReal& a, const WideReal& b) {
    const int sa = a.sign(), sb = b.sign();
    if (sa != sb) return sa < sb ? -1 : 1;
    if (sa == 0) return 0;
    if (a.exp2 != b.exp2) {
      const bool bigger = a.exp2 > b.exp2;
      return (bigger == (sa > 0)) ? 1 : -1;
    }
    if (a.frac == b.frac) return 0;
    return a.frac < b.frac ? -1 : 1;
  }
  static WideReal max(const WideReal& a, const WideReal& b) {
    return cmp(a, b) >= 0 ? a : b;
  }

  // Saturates to +-inf / signed 0 outside double range.
  double to_double() const {
    if (is_zero() || !is_finite()) return frac;
    if (exp2 > 1100) return frac > 0 ? HUGE_VAL : -HUGE_VAL;
    if (exp2 < -1140) return frac > 0 ? 0.0 : -0.0;
    return std::ldexp(frac, static_cast<int>(exp2));
  }

  double log_abs() const {  // -inf for zero
    if (is_zero()) return -HUGE_VAL;
    return std::log(std::fabs(frac)) + double(exp2) * std::numbers::ln2;
  }
};

inline bool operator<(const WideReal& a, const WideReal& b) {
  return WideReal::cmp(a, b) < 0;
}
inline bool operator<=(const WideReal& a, const WideReal& b) {
  return WideReal::cmp(a, b) <= 0;
}

}  // namespace critmc
