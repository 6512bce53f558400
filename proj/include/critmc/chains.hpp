#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "critmc/model.hpp"
#include "critmc/wide_real.hpp"

namespace critmc {

// One step of each recursion, double precision. The wide-range overloads
// below are the ones the simulator uses; these exist for direct use and
// for tests pinning the arithmetic.
inline double step_affine(double x, double a, double b) { return a * x + b; }
inline double step_letac(double x, double a, double b, double c) {
  return b + a * std::max(c, x);
}
inline double step_extremal(double x, double a, double d) {
  return std::max(a * x, d);
}

inline WideReal step_affine(const WideReal& x, double a, double b) {
  return x.mul_pos(a).add(b);
}
inline WideReal step_letac(const WideReal& x, double a, double b, double c) {
  return WideReal::max(x, WideReal::from_double(c)).mul_pos(a).add(b);
}
inline WideReal step_extremal(const WideReal& x, double a, double d) {
  return WideReal::max(x.mul_pos(a), WideReal::from_double(d));
}

inline WideReal apply_step(ChainKind kind, const WideReal& x, const Innovation& i) {
  switch (kind) {
    case ChainKind::Affine:
      return step_affine(x, i.a, i.b);
    case ChainKind::Letac:
      return step_letac(x, i.a, i.b, i.c);
    default:
      return step_extremal(x, i.a, i.d);
  }
}

struct ChainState {
  WideReal x;
  KahanSum log_prod;  // S_n = log(A_1 ... A_n), compensated
  std::uint64_t n = 0;

  double s() const { return log_prod.value(); }
};

enum class RunStatus { Complete, AbortedNonFinite, AbortedStateCap };

struct SimResult {
  ChainState state;
  RunStatus status = RunStatus::Complete;
  std::uint64_t steps_done = 0;
  bool partial = false;
};

// Exponent bound used as the overflow diagnostic; far beyond anything a
// run can reach, configurable down for tests of the abort path.
inline constexpr std::int64_t kDefaultStateCapExp2 = std::int64_t(1) << 40;

// Applies the chain's step n_steps times, feeding every observer each
// transition. Fully deterministic given (model, x0, stream). A state
// escaping the representable range aborts with a partial-result flag.
template <class... Obs>
SimResult simulate(const ModelSpec& model, double x0, std::uint64_t n_steps,
                   RandomStream& rng,
                   std::int64_t state_cap_exp2 = kDefaultStateCapExp2,
                   Obs&... obs) {
  SimResult r;
  r.state.x = WideReal::from_double(x0);
  const ChainKind kind = model.kind;
  for (std::uint64_t k = 1; k <= n_steps; ++k) {
    const Innovation inn = sample_innovation(model, rng);
    r.state.x = apply_step(kind, r.state.x, inn);
    r.state.log_prod.add(inn.log_a);
    r.state.n = k;
    if (!r.state.x.is_finite() ||
        (r.state.x.exp2 > state_cap_exp2 || r.state.x.exp2 < -state_cap_exp2)) {
      r.status = r.state.x.is_finite() ? RunStatus::AbortedStateCap
                                       : RunStatus::AbortedNonFinite;
      r.partial = true;
      r.steps_done = k;
      return r;
    }
    (obs.on_step(k, r.state.x, r.state.s(), inn), ...);
  }
  r.steps_done = n_steps;
  return r;
}

// The Letac chain bracketed pathwise by two affine chains driven by the
// identical innovation stream: lower x' = ax + b, upper x' = ax + b + ac.
struct SandwichResult {
  std::vector<WideReal> lower, letac, upper;  // index 0 = x0
  RunStatus status = RunStatus::Complete;
};

SandwichResult simulate_sandwich(const ModelSpec& model, double x0,
                                 std::uint64_t n_steps, RandomStream& rng);

}  // namespace critmc
