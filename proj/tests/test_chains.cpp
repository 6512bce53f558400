#include <doctest.h>

#include <cmath>

#include "critmc/chains.hpp"
#include "helpers.hpp"

using namespace critmc;

TEST_CASE("step functions, pinned arithmetic") {
  CHECK(step_affine(0.0, 2.0, 3.0) == 3.0);
  CHECK(step_affine(1.0, 1.0, 1.0) == 2.0);
  CHECK(step_affine(2.0, 1.5, 3.0) == 6.0);

  CHECK(step_letac(1.0, 2.0, 0.5, 3.0) == 6.5);
  CHECK(step_letac(5.0, 1.0, 0.0, 0.0) == 5.0);
  CHECK(step_letac(-4.0, 2.0, 1.0, 0.0) == 1.0);

  CHECK(step_extremal(2.0, 0.5, 3.0) == 3.0);
  CHECK(step_extremal(10.0, 1.0, 1.0) == 10.0);
  CHECK(step_extremal(0.0, 7.0, 2.0) == 2.0);
}

TEST_CASE("wide steps agree with double steps in range") {
  RandomStream rng(21, 0);
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.normal() * 5.0;
    const double a = std::exp(rng.normal() * 0.5);
    const double b = rng.normal();
    const double c = std::fabs(rng.normal());
    const double d = std::fabs(rng.normal()) + 0.1;
    CHECK(step_affine(WideReal::from_double(x), a, b).to_double() ==
          step_affine(x, a, b));
    CHECK(step_letac(WideReal::from_double(x), a, b, c).to_double() ==
          step_letac(x, a, b, c));
    CHECK(step_extremal(WideReal::from_double(x), a, d).to_double() ==
          step_extremal(x, a, d));
  }
}

TEST_CASE("simulate with zero steps returns the start") {
  RandomStream rng(22, 0);
  const SimResult r = simulate(test::affine_critical(), 3.5, 0, rng);
  CHECK(r.state.x.to_double() == 3.5);
  CHECK(r.state.s() == 0.0);
  CHECK(r.state.n == 0);
  CHECK(r.status == RunStatus::Complete);
}

TEST_CASE("deterministic letac recursion with constant laws") {
  // a = 0.5, b = 1, c = 0 from x0 = 0: path 0, 1, 1.5, 1.75
  ModelSpec m;
  m.kind = ChainKind::Letac;
  m.regime = Regime::Contractive;
  m.a_law = LogNormalLaw{std::log(0.5), 0.0};
  m.b_law = ConstantLaw{1.0};
  m.c_law = ConstantLaw{0.0};
  RandomStream rng(1, 0);
  std::vector<double> path;
  struct Collect {
    std::vector<double>* out;
    void on_step(std::uint64_t, const WideReal& x, double, const Innovation&) {
      out->push_back(x.to_double());
    }
  } obs{&path};
  simulate(m, 0.0, 3, rng, kDefaultStateCapExp2, obs);
  REQUIRE(path.size() == 3);
  CHECK(path[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(path[1] == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(path[2] == doctest::Approx(1.75).epsilon(1e-14));
}

TEST_CASE("simulate is bit-deterministic") {
  const ModelSpec m = test::affine_critical();
  RandomStream r1(42, 0), r2(42, 0);
  const SimResult a = simulate(m, 0.0, 1'000'000, r1);
  const SimResult b = simulate(m, 0.0, 1'000'000, r2);
  CHECK(a.state.x.frac == b.state.x.frac);
  CHECK(a.state.x.exp2 == b.state.x.exp2);
  CHECK(a.state.s() == b.state.s());
}

TEST_CASE("log-product is accumulated accurately") {
  // compare the compensated S_n against a long-double reference
  const ModelSpec m = test::affine_critical();
  RandomStream rng(23, 0);
  RandomStream check(23, 0);
  const SimResult r = simulate(m, 0.0, 200'000, rng);
  long double ref = 0.0L;
  for (int i = 0; i < 200'000; ++i) {
    ref += (long double)sample_innovation(m, check).log_a;
  }
  CHECK(std::fabs(r.state.s() - double(ref)) < 1e-10);
}

TEST_CASE("sandwich ordering holds pathwise") {
  const ModelSpec m = test::letac_critical();
  RandomStream rng(24, 0);
  const SandwichResult r = simulate_sandwich(m, 0.5, 100'000, rng);
  REQUIRE(r.status == RunStatus::Complete);
  REQUIRE(r.letac.size() == 100'001);
  for (std::size_t i = 0; i < r.letac.size(); ++i) {
    CHECK(r.lower[i] <= r.letac[i]);
    CHECK(r.letac[i] <= r.upper[i]);
  }
}

TEST_CASE("sandwich with c = 0 collapses onto the lower chain") {
  ModelSpec m = test::letac_critical();
  m.c_law = ConstantLaw{0.0};
  RandomStream rng(25, 0);
  const SandwichResult r = simulate_sandwich(m, 0.5, 10'000, rng);
  for (std::size_t i = 0; i < r.letac.size(); ++i) {
    // states stay >= 0, so max(0, x) = x and b + a*c = b
    CHECK(WideReal::cmp(r.lower[i], r.letac[i]) == 0);
    CHECK(WideReal::cmp(r.lower[i], r.upper[i]) == 0);
  }
}

TEST_CASE("one sandwich step evaluates the three maps directly") {
  ModelSpec m = test::letac_critical();
  RandomStream rng(26, 0);
  RandomStream peek(26, 0);
  const Innovation inn = sample_innovation(m, peek);
  const double x0 = 2.0;
  const SandwichResult r = simulate_sandwich(m, x0, 1, rng);
  CHECK(r.lower[1].to_double() == inn.a * x0 + inn.b);
  CHECK(r.upper[1].to_double() == inn.a * x0 + (inn.b + inn.a * inn.c));
  CHECK(r.letac[1].to_double() == inn.b + inn.a * std::max(inn.c, x0));
  CHECK(r.lower[1] <= r.letac[1]);
  CHECK(r.letac[1] <= r.upper[1]);
}

TEST_CASE("letac and extremal steps are monotone in the state") {
  RandomStream rng(27, 0);
  const ModelSpec m2 = test::letac_critical();
  const ModelSpec mx = test::extremal_critical();
  for (int i = 0; i < 1'000'000; ++i) {
    const Innovation inn = sample_innovation(m2, rng);
    double x = rng.normal() * 10.0;
    double y = rng.normal() * 10.0;
    if (x > y) std::swap(x, y);
    CHECK(step_letac(x, inn.a, inn.b, inn.c) <= step_letac(y, inn.a, inn.b, inn.c));
    CHECK(step_extremal(x, inn.a, inn.d + 1.0) <= step_extremal(y, inn.a, inn.d + 1.0));
  }
}

TEST_CASE("affine contraction identity |X^x - X^y| = e^S |x - y|") {
  const ModelSpec m = test::affine_critical();
  for (int trial = 0; trial < 2000; ++trial) {
    RandomStream ra(100 + trial, 0), rb(100 + trial, 0);
    RandomStream pick(200 + trial, 0);
    const double x0 = pick.normal() * 3.0;
    const double y0 = x0 + 1.0 + std::fabs(pick.normal());
    const SimResult a = simulate(m, x0, 64, ra);
    const SimResult b = simulate(m, y0, 64, rb);
    const double diff = b.state.x.sub(a.state.x).log_abs();
    const double pred = a.state.s() + std::log(y0 - x0);
    CHECK(std::fabs(diff - pred) < 1e-9);
  }
}

TEST_CASE("letac contraction bound |X^x - X^y| <= e^S |x - y|") {
  const ModelSpec m = test::letac_critical();
  for (int trial = 0; trial < 2000; ++trial) {
    RandomStream ra(300 + trial, 0), rb(300 + trial, 0);
    const double x0 = 0.5, y0 = 7.5;
    const SimResult a = simulate(m, x0, 64, ra);
    const SimResult b = simulate(m, y0, 64, rb);
    const WideReal diff = b.state.x.sub(a.state.x);
    if (diff.is_zero()) continue;  // coupled paths may coalesce exactly
    CHECK(diff.log_abs() <= a.state.s() + std::log(y0 - x0) + 1e-9);
  }
}

TEST_CASE("letac support: every state from step 1 onward is >= delta") {
  const ModelSpec m = test::letac_critical();
  struct Check {
    WideReal floor;
    bool ok = true;
    void on_step(std::uint64_t, const WideReal& x, double, const Innovation&) {
      ok = ok && !(x < floor);
    }
  } obs{WideReal::from_double(m.delta)};
  RandomStream rng(28, 0);
  simulate(m, -5.0, 100'000, rng, kDefaultStateCapExp2, obs);  // start below
  CHECK(obs.ok);
}

TEST_CASE("letac lower bound X_n >= e^{S_n} x0 for positive starts") {
  const ModelSpec m = test::letac_critical();
  struct Check {
    double log_x0;
    bool ok = true;
    void on_step(std::uint64_t, const WideReal& x, double s, const Innovation&) {
      ok = ok && x.log_abs() >= s + log_x0 - 1e-9;
    }
  } obs{std::log(0.25)};
  RandomStream rng(29, 0);
  simulate(m, 0.25, 100'000, rng, kDefaultStateCapExp2, obs);
  CHECK(obs.ok);
}

TEST_CASE("state cap aborts with a partial-result flag") {
  const ModelSpec m = test::affine_critical();
  RandomStream rng(30, 0);
  const SimResult r = simulate(m, 0.0, 10'000'000, rng, /*cap=*/1 << 7);
  CHECK(r.status == RunStatus::AbortedStateCap);
  CHECK(r.partial);
  CHECK(r.steps_done < 10'000'000);
  CHECK(r.steps_done > 0);
}

TEST_CASE("non-finite start aborts") {
  const ModelSpec m = test::affine_critical();
  RandomStream rng(31, 0);
  const SimResult r = simulate(m, std::nan(""), 100, rng);
  CHECK(r.status == RunStatus::AbortedNonFinite);
  CHECK(r.partial);
}
