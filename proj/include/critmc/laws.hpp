#pragma once

#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "critmc/rng.hpp"

namespace critmc {

// Input law families. A-families are absolutely continuous by construction
// (spread-out holds structurally); closed-form moments are used for every
// assumption check, nothing is estimated from samples.

struct LogNormalLaw {  // log A ~ Normal(m, s2)
  double m = 0.0;
  double s2 = 1.0;
};

struct LogMixtureLaw {  // finite mixture of LogNormals
  struct Component {
    double p, m, s2;
  };
  std::vector<Component> components;
};

struct NormalLaw {
  double m = 0.0;
  double s2 = 1.0;
};

// shift + |Normal(0, s^2)|; support is [shift, inf).
struct ShiftedHalfNormalLaw {
  double shift = 0.0;
  double s = 1.0;
};

struct HalfNormalLaw {  // |Normal(0, s^2)|
  double s = 1.0;
};

struct ConstantLaw {
  double c = 0.0;
};

using ALaw = std::variant<LogNormalLaw, LogMixtureLaw>;
using BLaw = std::variant<NormalLaw, ShiftedHalfNormalLaw, ConstantLaw>;
using CLaw = std::variant<HalfNormalLaw, ConstantLaw>;
using DLaw = std::variant<LogNormalLaw, ShiftedHalfNormalLaw>;

inline double sample_log_a(const ALaw& law, RandomStream& rng) {
  if (const auto* ln = std::get_if<LogNormalLaw>(&law)) {
    return ln->m + std::sqrt(ln->s2) * rng.normal();
  }
  const auto& mix = std::get<LogMixtureLaw>(law);
  double u = rng.uniform01();
  for (const auto& c : mix.components) {
    if (u < c.p || &c == &mix.components.back()) {
      return c.m + std::sqrt(c.s2) * rng.normal();
    }
    u -= c.p;
  }
  throw std::logic_error("empty mixture");
}

inline double sample_b(const BLaw& law, RandomStream& rng) {
  if (const auto* n = std::get_if<NormalLaw>(&law)) {
    return n->m + std::sqrt(n->s2) * rng.normal();
  }
  if (const auto* h = std::get_if<ShiftedHalfNormalLaw>(&law)) {
    return h->shift + std::fabs(h->s * rng.normal());
  }
  return std::get<ConstantLaw>(law).c;
}

inline double sample_c(const CLaw& law, RandomStream& rng) {
  if (const auto* h = std::get_if<HalfNormalLaw>(&law)) {
    return std::fabs(h->s * rng.normal());
  }
  return std::get<ConstantLaw>(law).c;
}

inline double sample_d(const DLaw& law, RandomStream& rng) {
  if (const auto* ln = std::get_if<LogNormalLaw>(&law)) {
    return std::exp(ln->m + std::sqrt(ln->s2) * rng.normal());
  }
  const auto& h = std::get<ShiftedHalfNormalLaw>(law);
  return h.shift + std::fabs(h.s * rng.normal());
}

// E[log A] in closed form.
double mean_log_a(const ALaw& law);
// E[log^2 A] in closed form.
double mean_log2_a(const ALaw& law);
// E[A^t] = exp(t m + t^2 s2 / 2) per component; finite for every real t.
double a_moment(const ALaw& law, double t);
// Essential infimum of the law's support (-inf for unbounded-below).
double ess_inf_b(const BLaw& law);
double ess_inf_d(const DLaw& law);

}  // namespace critmc
