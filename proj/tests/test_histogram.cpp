#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "critmc/histogram.hpp"
#include "critmc/rng.hpp"

using namespace critmc;

namespace {

HistogramGeometry pow2_geom() {
  HistogramGeometry g;
  g.log_rho = std::numbers::ln2;
  g.k_min = -10;
  g.k_max = 40;
  return g;
}

bool equal_hist(const LogHistogram& a, const LogHistogram& b) {
  if (!(a.geometry() == b.geometry())) return false;
  if (a.total_steps() != b.total_steps()) return false;
  if (a.near_zero() != b.near_zero()) return false;
  if (a.overflow_pos() != b.overflow_pos()) return false;
  if (a.overflow_neg() != b.overflow_neg()) return false;
  for (std::int32_t k = a.geometry().k_min; k <= a.geometry().k_max; ++k) {
    if (a.pos_weight(k) != b.pos_weight(k)) return false;
    if (a.neg_weight(k) != b.neg_weight(k)) return false;
  }
  return true;
}

double random_value(RandomStream& rng) {
  // spans near-zero, both signs, and the clamped far tail
  const double mag = std::exp(rng.normal() * 12.0);
  return rng.uniform01() < 0.5 ? mag : -mag;
}

}  // namespace

TEST_CASE("bin arithmetic with ratio 2") {
  LogHistogram h(pow2_geom());
  h.record(1.0);  // (0.5, 1] is bin k = -1
  CHECK(h.pos_weight(-1) == 1);
  h.record(-3.0);  // (-4, -2] is neg bin k = 1
  CHECK(h.neg_weight(1) == 1);
  h.record(2.0);  // (1, 2] is bin k = 0
  CHECK(h.pos_weight(0) == 1);
  CHECK(h.total_steps() == 3);
}

TEST_CASE("near-zero bucket and overflow clamping") {
  LogHistogram h(pow2_geom());
  h.record(0.0);
  h.record(1e-10);  // below 2^-10
  h.record(-5e-11);
  CHECK(h.near_zero() == 3);
  h.record(1e300);  // far beyond 2^41
  CHECK(h.overflow_pos() == 1);
  CHECK(h.pos_weight(40) == 1);
  h.record(-1e300);
  CHECK(h.overflow_neg() == 1);
  CHECK(h.neg_weight(40) == 1);
  CHECK(h.total_steps() == 5);
}

TEST_CASE("weights always add up to total_steps") {
  LogHistogram h;
  RandomStream rng(51, 0);
  const int n = 200'000;
  for (int i = 0; i < n; ++i) h.record(random_value(rng));
  std::uint64_t sum = h.near_zero();
  for (std::int32_t k = h.geometry().k_min; k <= h.geometry().k_max; ++k) {
    sum += h.pos_weight(k) + h.neg_weight(k);
  }
  CHECK(sum == std::uint64_t(n));
  CHECK(h.total_steps() == std::uint64_t(n));
}

TEST_CASE("merge is exact and merging empty is the identity") {
  RandomStream rng(52, 0);
  LogHistogram all, first, second, empty;
  for (int i = 0; i < 100'000; ++i) {
    const double v = random_value(rng);
    all.record(v);
    (i % 3 == 0 ? first : second).record(v);
  }
  LogHistogram merged = first;
  merged.merge(second);
  CHECK(equal_hist(merged, all));
  merged.merge(empty);
  CHECK(equal_hist(merged, all));

  LogHistogram other(pow2_geom());
  CHECK_THROWS_AS(merged.merge(other), std::invalid_argument);
}

TEST_CASE("interval mass: aligned edges are exact bin sums") {
  LogHistogram h;
  // one record in each of the 16 bins of (1, e]
  for (std::int32_t k = 0; k < 16; ++k) {
    h.record(std::exp((double(k) + 0.5) / 16.0));
  }
  CHECK(h.interval_mass(1.0, std::exp(1.0)) ==
        doctest::Approx(16.0).epsilon(1e-12));
  // half of bin 0 in log measure
  CHECK(h.interval_mass(1.0, std::exp(0.5 / 16.0)) ==
        doctest::Approx(0.5).epsilon(1e-9));
  // a sub-interval strictly inside bin 3 gets the log-uniform fraction
  const double lo = std::exp(3.25 / 16.0), hi = std::exp(3.75 / 16.0);
  CHECK(h.interval_mass(lo, hi) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("interval mass splits exactly across disjoint intervals") {
  LogHistogram h;
  RandomStream rng(53, 0);
  for (int i = 0; i < 50'000; ++i) h.record(random_value(rng));
  const double e1 = std::exp(1.0), e2 = std::exp(2.0);
  const double whole = h.interval_mass(1.0, e2);
  const double parts = h.interval_mass(1.0, e1) + h.interval_mass(e1, e2);
  CHECK(whole == doctest::Approx(parts).epsilon(1e-12));

  // signed interval spanning zero equals the sum of its three pieces
  const double m = h.near_zero_edge();
  const double a = h.interval_mass(-5.0, 5.0);
  const double b = h.interval_mass(-5.0, -m) + h.interval_mass(-m, m) +
                   h.interval_mass(m, 5.0);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("mass_below covers the whole line") {
  LogHistogram h;
  RandomStream rng(54, 0);
  for (int i = 0; i < 20'000; ++i) h.record(random_value(rng));
  CHECK(h.mass_below(HUGE_VAL) ==
        doctest::Approx(double(h.total_steps())).epsilon(1e-9));
  CHECK(h.mass_below(-HUGE_VAL) == 0.0);
  const double below = h.mass_below(2.5);
  const double above = h.interval_mass(2.5, HUGE_VAL);
  CHECK(below + above ==
        doctest::Approx(double(h.total_steps())).epsilon(1e-9));
}

TEST_CASE("interval hits are raw counts") {
  LogHistogram h;
  h.record(1.5);
  h.record(2.0);
  h.record(-1.5);
  CHECK(h.interval_hits(1.0, std::exp(1.0)) == 2);
  CHECK(h.interval_hits(-2.0, 0.0) == 1);
}

TEST_CASE("record codes round-trip through scratch commit") {
  RandomStream rng(55, 0);
  LogHistogram direct, via_codes;
  for (int i = 0; i < 50'000; ++i) {
    const WideReal x = WideReal::from_double(random_value(rng));
    direct.record(x);
    via_codes.record_code(direct.code_of(x));
  }
  CHECK(equal_hist(direct, via_codes));
}

TEST_CASE("wide values far beyond double range land in the clamp bin") {
  LogHistogram h;
  h.record(WideReal::from_log(5000.0));
  CHECK(h.overflow_pos() == 1);
  CHECK(h.pos_weight(h.geometry().k_max) == 1);
}
