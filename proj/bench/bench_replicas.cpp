// Compares the serial reference replica scheduler against the OpenMP one
// on the affine critical reference model. Both paths must produce the
// same merged histogram; the unit suite asserts that, this target only
// reports throughput.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "critmc/runner.hpp"

using namespace critmc;

namespace {

ModelSpec reference_model() {
  ModelSpec m;
  m.kind = ChainKind::Affine;
  m.regime = Regime::Critical;
  m.a_law = LogNormalLaw{0.0, 0.25};
  m.b_law = NormalLaw{0.0, 1.0};
  return m;
}

double run_once(ExecMode mode, int replicas, std::uint64_t steps) {
  EnsembleOptions opt;
  opt.seed = 7;
  opt.replicas = replicas;
  opt.mode = mode;
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = run_ratio_ensemble(reference_model(), 0.0, steps, {}, opt);
  const auto t1 = std::chrono::steady_clock::now();
  const double sec = std::chrono::duration<double>(t1 - t0).count();
  std::printf("  total_steps=%llu  near_zero=%llu\n",
              static_cast<unsigned long long>(res.merged.total_steps()),
              static_cast<unsigned long long>(res.merged.near_zero()));
  return sec;
}

}  // namespace

int main(int argc, char** argv) {
  const int replicas = argc > 1 ? std::atoi(argv[1]) : 8;
  const std::uint64_t steps = argc > 2 ? std::strtoull(argv[2], nullptr, 10)
                                       : 2'000'000ull;
  std::printf("replicas=%d steps_per_replica=%llu threads=%d\n", replicas,
              static_cast<unsigned long long>(steps), omp_get_max_threads());

  std::printf("serial reference:\n");
  const double ts = run_once(ExecMode::Serial, replicas, steps);
  std::printf("  %.3f s  (%.1f Msteps/s)\n", ts,
              double(replicas) * double(steps) / ts / 1e6);

  std::printf("openmp:\n");
  const double tp = run_once(ExecMode::OpenMP, replicas, steps);
  std::printf("  %.3f s  (%.1f Msteps/s)\n", tp,
              double(replicas) * double(steps) / tp / 1e6);

  std::printf("speedup: %.2fx\n", ts / tp);
  return 0;
}
