#include <doctest.h>

#include <cmath>

#include "critmc/runner.hpp"
#include "helpers.hpp"

using namespace critmc;

namespace {

bool equal_hist(const LogHistogram& a, const LogHistogram& b) {
  if (a.total_steps() != b.total_steps()) return false;
  if (a.near_zero() != b.near_zero()) return false;
  for (std::int32_t k = a.geometry().k_min; k <= a.geometry().k_max; ++k) {
    if (a.pos_weight(k) != b.pos_weight(k)) return false;
    if (a.neg_weight(k) != b.neg_weight(k)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("serial and OpenMP schedules give bit-identical ensembles") {
  const ModelSpec m = test::affine_critical();
  EnsembleOptions serial;
  serial.seed = 55;
  serial.replicas = 4;
  serial.mode = ExecMode::Serial;
  EnsembleOptions parallel = serial;
  parallel.mode = ExecMode::OpenMP;
  parallel.workers = 2;  // oversubscribed on one core still exercises OMP

  const auto a = run_ratio_ensemble(m, 0.0, 200'000, {make_one()}, serial);
  const auto b = run_ratio_ensemble(m, 0.0, 200'000, {make_one()}, parallel);
  CHECK(equal_hist(a.merged, b.merged));
  REQUIRE(a.batches.size() == b.batches.size());
  for (std::size_t i = 0; i < a.batches.size(); ++i) {
    CHECK(a.batches[i].fsum[0] == b.batches[i].fsum[0]);
    CHECK(a.batches[i].iref_mass == b.batches[i].iref_mass);
  }
}

TEST_CASE("an ensemble equals the merge of its single-replica runs") {
  const ModelSpec m = test::affine_critical();
  EnsembleOptions opt;
  opt.seed = 56;
  opt.replicas = 8;
  const auto all = run_ratio_ensemble(m, 0.0, 50'000, {}, opt);

  LogHistogram merged(opt.geometry);
  for (int r = 0; r < 8; ++r) {
    RandomStream rng(opt.seed, std::uint64_t(r));
    const RatioRunResult one =
        estimate_ratio_run(m, 0.0, 50'000, rng, opt.geometry);
    merged.merge(one.hist);
  }
  CHECK(equal_hist(all.merged, merged));
}

TEST_CASE("ladder ensemble is deterministic and merges replica work") {
  const ModelSpec m = test::letac_critical();
  EnsembleOptions opt;
  opt.seed = 57;
  opt.replicas = 3;
  opt.workers = 2;
  const auto a = run_ladder_ensemble(m, 2'000, 200, 100'000, {}, opt);
  const auto b = run_ladder_ensemble(m, 2'000, 200, 100'000, {}, opt);
  CHECK(a.committed_cycles == 6'000);
  CHECK(equal_hist(a.merged, b.merged));
  CHECK(a.sum_cycle_drop == b.sum_cycle_drop);
  CHECK(a.merged.total_steps() == a.committed_steps);

  EnsembleOptions ser = opt;
  ser.mode = ExecMode::Serial;
  const auto c = run_ladder_ensemble(m, 2'000, 200, 100'000, {}, ser);
  CHECK(equal_hist(a.merged, c.merged));
}

TEST_CASE("default start points") {
  CHECK(default_x0(test::affine_critical()) == 0.0);
  CHECK(default_x0(test::letac_critical()) == 0.5);
  CHECK(default_x0(test::extremal_critical()) == 0.5);
}
