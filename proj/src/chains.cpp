#include "critmc/chains.hpp"

#include <stdexcept>

namespace critmc {

SandwichResult simulate_sandwich(const ModelSpec& model, double x0,
                                 std::uint64_t n_steps, RandomStream& rng) {
  if (model.kind != ChainKind::Letac) {
    throw std::invalid_argument("simulate_sandwich: requires a Letac model");
  }
  SandwichResult r;
  r.lower.reserve(n_steps + 1);
  r.letac.reserve(n_steps + 1);
  r.upper.reserve(n_steps + 1);
  WideReal lo = WideReal::from_double(x0);
  WideReal mid = lo;
  WideReal hi = lo;
  r.lower.push_back(lo);
  r.letac.push_back(mid);
  r.upper.push_back(hi);
  for (std::uint64_t k = 1; k <= n_steps; ++k) {
    const Innovation inn = sample_innovation(model, rng);
    lo = step_affine(lo, inn.a, inn.b);
    mid = step_letac(mid, inn.a, inn.b, inn.c);
    hi = step_affine(hi, inn.a, inn.b + inn.a * inn.c);
    if (!lo.is_finite() || !mid.is_finite() || !hi.is_finite()) {
      r.status = RunStatus::AbortedNonFinite;
      return r;
    }
    r.lower.push_back(lo);
    r.letac.push_back(mid);
    r.upper.push_back(hi);
  }
  return r;
}

}  // namespace critmc
