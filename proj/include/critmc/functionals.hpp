#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "critmc/chains.hpp"

namespace critmc {

// Pathwise integrators g accumulated along trajectories. Unbounded
// integrands are evaluated per visited state (never from histogram
// midpoints); kinds marked "fresh draw" consume one independent
// mu-innovation per evaluated visit.
enum class FunctionalKind {
  One,                 // g = 1 (per-cycle sum = cycle length)
  Indicator,           // 1_{(p1, p2]}(x)
  ExpNegWalk,          // exp(-s_n), walk coordinate of the current cycle
  InvPolyGamma,        // (1 + |x|)^(-p1)
  TailRatioLetac,      // log((b + a max(c, x)) / (a x)), fresh draw
  TailRatioAffineAbs,  // log|a x + b| - log|a x|, fresh draw, |ax| > p1
};

struct Functional {
  FunctionalKind kind = FunctionalKind::One;
  std::string id = "one";
  double p1 = 0.0;
  double p2 = 0.0;
};

inline Functional make_one() { return {FunctionalKind::One, "one", 0, 0}; }
inline Functional make_indicator(double lo, double hi, std::string id) {
  return {FunctionalKind::Indicator, std::move(id), lo, hi};
}
inline Functional make_exp_neg_walk() {
  return {FunctionalKind::ExpNegWalk, "exp_neg_walk", 0, 0};
}
inline Functional make_inv_poly(double gamma) {
  return {FunctionalKind::InvPolyGamma, "inv_poly", gamma, 0};
}
inline Functional make_tail_ratio_letac() {
  return {FunctionalKind::TailRatioLetac, "tail_ratio_letac", 0, 0};
}
inline Functional make_tail_ratio_affine(double floor_eps = 1e-12) {
  return {FunctionalKind::TailRatioAffineAbs, "tail_ratio_affine", floor_eps, 0};
}

// nullopt = visit excluded (counted by the caller).
inline std::optional<double> eval_functional(const Functional& f,
                                             const WideReal& x, double s,
                                             const ModelSpec& model,
                                             RandomStream& fresh_rng) {
  switch (f.kind) {
    case FunctionalKind::One:
      return 1.0;
    case FunctionalKind::Indicator: {
      const double xd = x.to_double();
      return (xd > f.p1 && xd <= f.p2) ? 1.0 : 0.0;
    }
    case FunctionalKind::ExpNegWalk:
      return std::exp(-s);
    case FunctionalKind::InvPolyGamma: {
      const double ax = std::fabs(x.to_double());
      return std::isinf(ax) ? 0.0 : std::pow(1.0 + ax, -f.p1);
    }
    case FunctionalKind::TailRatioLetac: {
      const Innovation inn = sample_innovation(model, fresh_rng);
      const WideReal num = step_letac(x, inn.a, inn.b, inn.c);
      const WideReal den = x.mul_pos(inn.a);
      return num.log_abs() - den.log_abs();
    }
    case FunctionalKind::TailRatioAffineAbs: {
      const Innovation inn = sample_innovation(model, fresh_rng);
      const WideReal den = x.mul_pos(inn.a);
      if (den.is_zero() || den.log_abs() <= std::log(f.p1)) return std::nullopt;
      const WideReal num = den.add(inn.b);
      if (num.is_zero()) return std::nullopt;
      return num.log_abs() - den.log_abs();
    }
  }
  return std::nullopt;
}

inline bool functional_uses_fresh_draw(FunctionalKind k) {
  return k == FunctionalKind::TailRatioLetac ||
         k == FunctionalKind::TailRatioAffineAbs;
}

}  // namespace critmc
