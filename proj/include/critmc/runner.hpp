#pragma once

#include <cstdint>
#include <vector>

#include "critmc/measure.hpp"

namespace critmc {

enum class ExecMode { Serial, OpenMP };

// Replica scheduling: replica r always draws from the stream derived from
// (seed, r), so any replica subset reproduces independently of worker
// count or schedule. Results are merged in replica order after the
// parallel region; serial and OpenMP execution are bit-identical.
struct EnsembleOptions {
  std::uint64_t seed = 1;
  int replicas = 1;
  ExecMode mode = ExecMode::OpenMP;
  int workers = 0;  // 0 = machine parallelism
  HistogramGeometry geometry{};
  int batches_per_replica = 16;
  int thin_fresh_draw = 1;
};

struct RatioEnsembleResult {
  std::vector<LogHistogram> replicas;
  LogHistogram merged;
  std::vector<CycleBatch> batches;  // concatenated in replica order
  RunStatus status = RunStatus::Complete;
  bool partial = false;
  std::uint64_t steps_done = 0;
};

RatioEnsembleResult run_ratio_ensemble(const ModelSpec& model, double x0,
                                       std::uint64_t steps_per_replica,
                                       const std::vector<Functional>& fns,
                                       const EnsembleOptions& opt);

struct LadderEnsembleResult {
  std::vector<LogHistogram> replicas;
  LogHistogram merged;
  std::vector<CycleBatch> batches;
  RunStatus status = RunStatus::Complete;
  std::uint64_t committed_cycles = 0, excluded_cycles = 0;
  std::uint64_t committed_steps = 0, excluded_steps = 0;
  double sum_cycle_drop = 0.0, sum_cycle_drop_sq = 0.0;
  bool burn_in_stabilized = true;

  double exclusion_fraction() const {
    const double n = double(committed_cycles + excluded_cycles);
    return n > 0 ? double(excluded_cycles) / n : 0.0;
  }
};

LadderEnsembleResult run_ladder_ensemble(const ModelSpec& model,
                                         std::uint64_t cycles_per_replica,
                                         std::uint64_t burn_in_cycles,
                                         std::uint64_t cycle_cap,
                                         const std::vector<Functional>& fns,
                                         const EnsembleOptions& opt);

// Default start point: 0 for the affine chain, delta for chains whose
// invariant measure lives on [delta, inf).
double default_x0(const ModelSpec& model);

}  // namespace critmc
