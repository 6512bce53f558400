#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "critmc/chains.hpp"
#include "critmc/ladder.hpp"
#include "helpers.hpp"

using namespace critmc;

namespace {

LadderOptions fast_opts(std::uint64_t cap = 100'000) {
  LadderOptions o;
  o.cycle_cap = cap;
  return o;
}

}  // namespace

TEST_CASE("ladder epochs fire exactly on strict new minima") {
  LadderTracker t;
  // S_1..S_4 = -0.5, 0.3, -0.7, -0.6: epochs at n = 1 and n = 3
  CHECK(t.on_step(1, -0.5));
  CHECK_FALSE(t.on_step(2, 0.3));
  CHECK(t.on_step(3, -0.7));
  CHECK_FALSE(t.on_step(4, -0.6));
  CHECK(t.cycles_completed == 2);
  CHECK(t.last_epoch == 3);
  CHECK(t.current_min == -0.7);
}

TEST_CASE("no epoch on a tie or an increasing walk") {
  LadderTracker t;
  CHECK_FALSE(t.on_step(1, 0.0));  // S_1 = 0 is not < S_0 = 0
  CHECK_FALSE(t.on_step(2, 0.5));
  CHECK_FALSE(t.on_step(3, 1.5));
  CHECK(t.cycles_completed == 0);
}

TEST_CASE("epoch drops are strictly decreasing along a trajectory") {
  const ModelSpec m = test::affine_critical();
  RandomStream rng(61, 0);
  LadderTracker t;
  std::vector<double> mins;
  struct Obs {
    LadderTracker* t;
    std::vector<double>* mins;
    void on_step(std::uint64_t n, const WideReal&, double s, const Innovation&) {
      if (t->on_step(n, s)) mins->push_back(t->current_min);
    }
  } obs{&t, &mins};
  simulate(m, 0.0, 100'000, rng, kDefaultStateCapExp2, obs);
  REQUIRE(mins.size() > 50);
  for (std::size_t i = 1; i < mins.size(); ++i) CHECK(mins[i] < mins[i - 1]);
}

TEST_CASE("burn-in is deterministic and ends on the ladder state") {
  const ModelSpec m = test::letac_critical();
  LadderSession a(m, RandomStream(7, 0), fast_opts());
  LadderSession b(m, RandomStream(7, 0), fast_opts());
  const BurnInResult ra = a.burn_in(500);
  const BurnInResult rb = b.burn_in(500);
  CHECK(ra.end_state == rb.end_state);
  CHECK(ra.mean_cycle_drop == rb.mean_cycle_drop);
  CHECK(ra.mean_cycle_drop < 0.0);
  CHECK(ra.end_state >= m.delta);
}

TEST_CASE("embedded chain forgets its start: two-seed KS on epoch states") {
  const ModelSpec m = test::letac_critical();
  auto draw_states = [&](std::uint64_t seed) {
    LadderSession s(m, RandomStream(seed, 0), fast_opts(10'000));
    s.burn_in(10'000);
    std::vector<double> states;
    for (int i = 0; i < 10'000; ++i) {
      const BurnInResult r = s.burn_in(1);  // one cycle per call
      if (i % 10 == 9) states.push_back(r.end_state);  // thin the chain
    }
    return states;
  };
  std::vector<double> a = draw_states(101), b = draw_states(202);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i; else ++j;
    d = std::max(d, std::fabs(double(i) / a.size() - double(j) / b.size()));
  }
  // two-sample KS, 1% level
  CHECK(d < 1.628 * std::sqrt(2.0 / double(a.size())));
}

TEST_CASE("per-cycle drops have negative mean (4 sigma)") {
  const ModelSpec m = test::letac_critical();
  LadderSession s(m, RandomStream(8, 0), fast_opts());
  s.burn_in(1000);
  const LadderRunResult r = s.accumulate(20'000, {});
  REQUIRE(r.committed_cycles == 20'000);
  const double n = double(r.committed_cycles);
  const double mean = r.sum_cycle_drop / n;
  const double var = r.sum_cycle_drop_sq / n - mean * mean;
  const double se = std::sqrt(var / n);
  CHECK(mean + 4.0 * se < 0.0);
}

TEST_CASE("unit functional counts exactly the committed occupation") {
  const ModelSpec m = test::letac_critical();
  LadderSession s(m, RandomStream(9, 0), fast_opts());
  s.burn_in(200);
  const LadderRunResult r = s.accumulate(5'000, {make_one()});
  double total = 0.0;
  for (const auto& b : r.batches) total += b.fsum[0];
  CHECK(total == double(r.committed_steps));
  CHECK(r.hist.total_steps() == r.committed_steps);
}

TEST_CASE("exceedance channel is stable across halves (4 sigma)") {
  const ModelSpec m = test::letac_critical();
  LadderSession s(m, RandomStream(10, 0), fast_opts());
  s.burn_in(1000);
  const LadderRunResult r = s.accumulate(40'000, {make_exp_neg_walk()}, 100);
  REQUIRE(r.batches.size() >= 2);
  auto half_stats = [&](std::size_t from, std::size_t to) {
    std::vector<double> means;
    for (std::size_t i = from; i < to; ++i) {
      means.push_back(r.batches[i].fsum[0] / double(r.batches[i].cycles));
    }
    double mean = 0.0;
    for (double v : means) mean += v;
    mean /= double(means.size());
    double ss = 0.0;
    for (double v : means) ss += (v - mean) * (v - mean);
    return std::pair{mean, std::sqrt(ss / double(means.size() - 1) /
                                     double(means.size()))};
  };
  const auto [m1, se1] = half_stats(0, r.batches.size() / 2);
  const auto [m2, se2] = half_stats(r.batches.size() / 2, r.batches.size());
  CHECK(std::fabs(m1 - m2) < 4.0 * std::hypot(se1, se2));
}

TEST_CASE("occupation of (0, M] is dominated by the exceedance bound") {
  // Pathwise: X_n <= M forces e^{-S_n} >= delta/M within a cycle.
  const ModelSpec m = test::letac_critical();
  LadderSession s(m, RandomStream(11, 0), fast_opts());
  s.burn_in(500);
  for (double big_m : {2.0, 4.0, 8.0}) {
    LadderSession run(m, RandomStream(11, 1), fast_opts());
    run.burn_in(500);
    const LadderRunResult r = run.accumulate(
        5'000, {make_indicator(0.0, big_m, "ind"), make_exp_neg_walk()});
    double ind = 0.0, exc = 0.0;
    for (const auto& b : r.batches) {
      ind += b.fsum[0];
      exc += b.fsum[1];
    }
    CHECK(ind <= (big_m / m.delta) * exc * (1.0 + 1e-9));
  }
}

TEST_CASE("cycle partition merges to the same histogram") {
  const ModelSpec m = test::letac_critical();
  LadderSession whole(m, RandomStream(12, 0), fast_opts());
  LadderSession parts(m, RandomStream(12, 0), fast_opts());
  whole.burn_in(300);
  parts.burn_in(300);
  const LadderRunResult w = whole.accumulate(2'000, {});
  LadderRunResult p1 = parts.accumulate(800, {});
  const LadderRunResult p2 = parts.accumulate(1'200, {});
  p1.hist.merge(p2.hist);
  CHECK(p1.hist.total_steps() == w.hist.total_steps());
  const auto& g = w.hist.geometry();
  for (std::int32_t k = g.k_min; k <= g.k_max; ++k) {
    REQUIRE(p1.hist.pos_weight(k) == w.hist.pos_weight(k));
  }
}

TEST_CASE("capped cycles are rolled back, counted, and the run continues") {
  const ModelSpec m = test::letac_critical();
  LadderSession s(m, RandomStream(13, 0), fast_opts(/*cap=*/16));
  s.burn_in(50);
  const LadderRunResult r = s.accumulate(2'000, {});
  CHECK(r.committed_cycles == 2'000);
  CHECK(r.excluded_cycles > 0);
  CHECK(r.exclusion_fraction() > 0.0);
  CHECK(r.hist.total_steps() == r.committed_steps);
  // every committed cycle is at most the cap long
  CHECK(r.committed_steps <= 16u * 2'000u);
}

TEST_CASE("mean capped cycle length matches a direct epoch-gap scan") {
  const ModelSpec m = test::letac_critical();
  const std::uint64_t cap = 10'000;

  LadderSession s(m, RandomStream(14, 0), fast_opts(cap));
  s.burn_in(2'000);
  const LadderRunResult r = s.accumulate(20'000, {});
  const double mean_session =
      double(r.committed_steps) / double(r.committed_cycles);
  // batch-means standard error of the mean cycle length
  std::vector<double> batch_means;
  for (const auto& b : r.batches) {
    batch_means.push_back(double(b.steps) / double(b.cycles));
  }
  double bm = 0.0;
  for (double v : batch_means) bm += v;
  bm /= double(batch_means.size());
  double ss = 0.0;
  for (double v : batch_means) ss += (v - bm) * (v - bm);
  const double se_session = std::sqrt(ss / double(batch_means.size() - 1) /
                                      double(batch_means.size()));

  // independent scan: raw simulation, gaps between strict minima, same cap
  RandomStream rng(140, 0);
  LadderTracker t;
  std::vector<double> gaps;
  std::uint64_t last = 0;
  struct Obs {
    LadderTracker* t;
    std::vector<double>* gaps;
    std::uint64_t* last;
    std::uint64_t cap;
    void on_step(std::uint64_t n, const WideReal&, double s, const Innovation&) {
      if (t->on_step(n, s)) {
        const std::uint64_t gap = n - *last;
        if (gap <= cap) gaps->push_back(double(gap));
        *last = n;
      }
    }
  } obs{&t, &gaps, &last, cap};
  simulate(m, m.delta, 3'000'000, rng, kDefaultStateCapExp2, obs);
  REQUIRE(gaps.size() > 1'000);
  double gm = 0.0;
  for (double g : gaps) gm += g;
  gm /= double(gaps.size());
  double gss = 0.0;
  for (double g : gaps) gss += (g - gm) * (g - gm);
  const double se_scan =
      std::sqrt(gss / double(gaps.size() - 1) / double(gaps.size()));

  CHECK(std::fabs(mean_session - gm) <
        4.0 * std::hypot(se_session, se_scan));
}

TEST_CASE("accumulate is deterministic") {
  const ModelSpec m = test::letac_critical();
  auto run = [&] {
    LadderSession s(m, RandomStream(15, 0), fast_opts());
    s.burn_in(200);
    return s.accumulate(1'000, {make_tail_ratio_letac()});
  };
  const LadderRunResult a = run();
  const LadderRunResult b = run();
  CHECK(a.committed_steps == b.committed_steps);
  CHECK(a.sum_cycle_drop == b.sum_cycle_drop);
  REQUIRE(a.batches.size() == b.batches.size());
  for (std::size_t i = 0; i < a.batches.size(); ++i) {
    CHECK(a.batches[i].fsum[0] == b.batches[i].fsum[0]);
    CHECK(a.batches[i].iref_mass == b.batches[i].iref_mass);
  }
}

TEST_CASE("ladder session rejects the contractive regime") {
  CHECK_THROWS_AS(
      LadderSession(test::affine_contractive(), RandomStream(1, 0), {}),
      std::invalid_argument);
}
