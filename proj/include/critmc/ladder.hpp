#pragma once

#include <cstdint>
#include <vector>

#include "critmc/functionals.hpp"
#include "critmc/histogram.hpp"

namespace critmc {

// Strict descending ladder epochs of the driving walk: an epoch fires
// exactly when s drops strictly below the minimum at the previous epoch.
// Ties do not fire; with absolutely continuous A they have probability 0.
struct LadderTracker {
  double current_min = 0.0;  // S at the last epoch (S_0 = 0)
  std::uint64_t last_epoch = 0;
  std::uint64_t cycles_completed = 0;

  // Call once per step, in order. True = this step is a ladder epoch.
  bool on_step(std::uint64_t n, double s) {
    if (s < current_min) {
      current_min = s;
      last_epoch = n;
      ++cycles_completed;
      return true;
    }
    return false;
  }
};

struct LadderOptions {
  std::uint64_t cycle_cap = 100'000'000;  // steps; longer cycles excluded
  double iref_lo = 1.0;
  double iref_hi = 2.718281828459045;  // occupation of (lo, hi] per batch
  HistogramGeometry geometry{};
  int thin_fresh_draw = 1;  // Bernoulli 1/thin subsampling of fresh-draw g
};

struct CycleBatch {
  std::uint64_t cycles = 0;
  std::uint64_t steps = 0;      // committed occupation in the batch
  double iref_mass = 0.0;       // apportioned hits in the reference interval
  std::vector<double> fsum;     // per functional
  std::vector<std::uint64_t> fexcluded;
};

struct BurnInResult {
  double end_state = 0.0;
  bool mean_stabilized = true;
  double mean_cycle_drop = 0.0;  // mean of S_L over burn-in cycles
  std::uint64_t steps_used = 0;
  std::uint64_t excluded_cycles = 0;
};

struct LadderRunResult {
  LogHistogram hist;
  std::vector<CycleBatch> batches;
  std::uint64_t committed_cycles = 0;
  std::uint64_t excluded_cycles = 0;  // hit the cap, rolled back
  std::uint64_t excluded_steps = 0;
  std::uint64_t committed_steps = 0;
  double sum_cycle_drop = 0.0;     // sum of per-cycle S_L (= log M_k)
  double sum_cycle_drop_sq = 0.0;
  RunStatus status = RunStatus::Complete;

  double exclusion_fraction() const {
    const double n = double(committed_cycles + excluded_cycles);
    return n > 0 ? double(excluded_cycles) / n : 0.0;
  }
};

// One long embedded run: the chain is observed between successive ladder
// epochs; each completed cycle contributes its occupation and per-cycle
// functional sums. Cycles hitting the cap are rolled back, counted, and
// the cycle restarts from the same epoch state with fresh randomness.
class LadderSession {
 public:
  LadderSession(const ModelSpec& model, RandomStream chain_rng,
                LadderOptions opt = {});

  // Runs the base chain through n_cycles ladder epochs; the embedded
  // chain is contractive, so the returned state is approximately a draw
  // from its stationary law. Flags a diagnostic when the running mean of
  // the per-cycle drop moves more than 1% over the last half.
  BurnInResult burn_in(std::uint64_t n_cycles);

  LadderRunResult accumulate(std::uint64_t n_cycles,
                             const std::vector<Functional>& functionals,
                             int n_batches = 100);

  const WideReal& state() const { return state_; }
  void set_state(double x) { state_ = WideReal::from_double(x); }

 private:
  // Runs one cycle from state_. Returns true when committed; false when
  // the cap was hit (scratch discarded, state_ unchanged).
  bool run_cycle(double& cycle_drop, std::uint64_t& length);

  ModelSpec model_;
  RandomStream rng_;
  RandomStream fresh_rng_;
  LadderOptions opt_;
  WideReal state_;
  std::vector<BinCode> scratch_;
  std::vector<Functional> fns_;
  std::vector<double> cycle_fsum_;
  std::vector<std::uint64_t> cycle_fexcl_;
  RunStatus status_ = RunStatus::Complete;
};

}  // namespace critmc
