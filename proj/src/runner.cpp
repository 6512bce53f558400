#include "critmc/runner.hpp"

#include <omp.h>

#include <exception>
#include <stdexcept>

namespace critmc {

double default_x0(const ModelSpec& model) {
  return model.kind == ChainKind::Affine ? 0.0 : model.delta;
}

namespace {

// Runs fn(r) for r in [0, n) serially or under OpenMP; exceptions are
// captured and rethrown after the region.
template <class Fn>
void for_each_replica(int n, ExecMode mode, int workers, Fn&& fn) {
  std::exception_ptr error;
  if (mode == ExecMode::Serial) {
    for (int r = 0; r < n; ++r) fn(r);
    return;
  }
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int r = 0; r < n; ++r) {
    try {
      fn(r);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

RatioEnsembleResult run_ratio_ensemble(const ModelSpec& model, double x0,
                                       std::uint64_t steps_per_replica,
                                       const std::vector<Functional>& fns,
                                       const EnsembleOptions& opt) {
  if (opt.replicas < 1) throw std::invalid_argument("replicas must be >= 1");
  std::vector<RatioRunResult> slots(opt.replicas);
  for_each_replica(opt.replicas, opt.mode, opt.workers, [&](int r) {
    RandomStream rng(opt.seed, std::uint64_t(r));
    slots[r] = estimate_ratio_run(model, x0, steps_per_replica, rng,
                                  opt.geometry, fns, opt.batches_per_replica,
                                  opt.thin_fresh_draw);
  });

  RatioEnsembleResult out;
  out.merged = LogHistogram(opt.geometry);
  for (auto& s : slots) {
    out.merged.merge(s.hist);
    out.steps_done += s.sim.steps_done;
    if (s.sim.status != RunStatus::Complete && out.status == RunStatus::Complete) {
      out.status = s.sim.status;
    }
    out.partial = out.partial || s.sim.partial;
    for (auto& b : s.batches) out.batches.push_back(std::move(b));
    out.replicas.push_back(std::move(s.hist));
  }
  return out;
}

LadderEnsembleResult run_ladder_ensemble(const ModelSpec& model,
                                         std::uint64_t cycles_per_replica,
                                         std::uint64_t burn_in_cycles,
                                         std::uint64_t cycle_cap,
                                         const std::vector<Functional>& fns,
                                         const EnsembleOptions& opt) {
  if (opt.replicas < 1) throw std::invalid_argument("replicas must be >= 1");
  struct Slot {
    LadderRunResult run{LogHistogram{}};
    BurnInResult burn;
  };
  std::vector<Slot> slots(opt.replicas);
  for_each_replica(opt.replicas, opt.mode, opt.workers, [&](int r) {
    LadderOptions lopt;
    lopt.cycle_cap = cycle_cap;
    lopt.geometry = opt.geometry;
    lopt.thin_fresh_draw = opt.thin_fresh_draw;
    LadderSession session(model, RandomStream(opt.seed, std::uint64_t(r)), lopt);
    slots[r].burn = session.burn_in(burn_in_cycles);
    slots[r].run = session.accumulate(cycles_per_replica, fns,
                                      opt.batches_per_replica);
  });

  LadderEnsembleResult out;
  out.merged = LogHistogram(opt.geometry);
  for (auto& s : slots) {
    out.merged.merge(s.run.hist);
    out.committed_cycles += s.run.committed_cycles;
    out.excluded_cycles += s.run.excluded_cycles;
    out.committed_steps += s.run.committed_steps;
    out.excluded_steps += s.run.excluded_steps;
    out.sum_cycle_drop += s.run.sum_cycle_drop;
    out.sum_cycle_drop_sq += s.run.sum_cycle_drop_sq;
    out.burn_in_stabilized = out.burn_in_stabilized && s.burn.mean_stabilized;
    if (s.run.status != RunStatus::Complete && out.status == RunStatus::Complete) {
      out.status = s.run.status;
    }
    for (auto& b : s.run.batches) out.batches.push_back(std::move(b));
    out.replicas.push_back(std::move(s.run.hist));
  }
  return out;
}

}  // namespace critmc
