#include "critmc/model.hpp"

#include <cmath>
#include <stdexcept>

namespace critmc {

double mean_log_a(const ALaw& law) {
  if (const auto* ln = std::get_if<LogNormalLaw>(&law)) return ln->m;
  double m = 0.0;
  for (const auto& c : std::get<LogMixtureLaw>(law).components) m += c.p * c.m;
  return m;
}

double mean_log2_a(const ALaw& law) {
  if (const auto* ln = std::get_if<LogNormalLaw>(&law)) {
    return ln->m * ln->m + ln->s2;
  }
  double m2 = 0.0;
  for (const auto& c : std::get<LogMixtureLaw>(law).components) {
    m2 += c.p * (c.m * c.m + c.s2);
  }
  return m2;
}

double a_moment(const ALaw& law, double t) {
  if (const auto* ln = std::get_if<LogNormalLaw>(&law)) {
    return std::exp(t * ln->m + t * t * ln->s2 / 2.0);
  }
  double m = 0.0;
  for (const auto& c : std::get<LogMixtureLaw>(law).components) {
    m += c.p * std::exp(t * c.m + t * t * c.s2 / 2.0);
  }
  return m;
}

double ess_inf_b(const BLaw& law) {
  if (std::holds_alternative<NormalLaw>(law)) return -HUGE_VAL;
  if (const auto* h = std::get_if<ShiftedHalfNormalLaw>(&law)) return h->shift;
  return std::get<ConstantLaw>(law).c;
}

double ess_inf_d(const DLaw& law) {
  if (std::holds_alternative<LogNormalLaw>(law)) return 0.0;
  return std::get<ShiftedHalfNormalLaw>(law).shift;
}

Innovation sample_innovation(const ModelSpec& model, RandomStream& rng) {
  Innovation inn;
  inn.log_a = sample_log_a(model.a_law, rng);
  inn.a = std::exp(inn.log_a);
  switch (model.kind) {
    case ChainKind::Affine:
      inn.b = sample_b(*model.b_law, rng);
      break;
    case ChainKind::Letac:
      inn.b = sample_b(*model.b_law, rng);
      inn.c = sample_c(*model.c_law, rng);
      break;
    case ChainKind::Extremal:
      inn.d = sample_d(*model.d_law, rng);
      break;
  }
  return inn;
}

namespace {

bool law_is_degenerate(const ALaw& law) {
  if (const auto* ln = std::get_if<LogNormalLaw>(&law)) {
    return ln->s2 == 0.0 && ln->m == 0.0;
  }
  for (const auto& c : std::get<LogMixtureLaw>(law).components) {
    if (c.s2 != 0.0 || c.m != 0.0) return false;
  }
  return true;
}

bool mixture_weights_ok(const ALaw& law) {
  if (std::holds_alternative<LogNormalLaw>(law)) return true;
  const auto& mix = std::get<LogMixtureLaw>(law);
  if (mix.components.empty()) return false;
  double total = 0.0;
  for (const auto& c : mix.components) {
    if (c.p <= 0.0 || c.s2 < 0.0) return false;
    total += c.p;
  }
  return std::fabs(total - 1.0) <= 1e-12;
}

}  // namespace

ValidationReport validate(const ModelSpec& model) {
  const bool needs_b = model.kind != ChainKind::Extremal;
  if (needs_b && !model.b_law) {
    throw std::invalid_argument("model: b_law required for this chain kind");
  }
  if (model.kind == ChainKind::Letac && !model.c_law) {
    throw std::invalid_argument("model: c_law required for Letac");
  }
  if (model.kind == ChainKind::Extremal && !model.d_law) {
    throw std::invalid_argument("model: d_law required for Extremal");
  }
  if (!mixture_weights_ok(model.a_law)) {
    throw std::invalid_argument("model: mixture weights must be positive and sum to 1");
  }
  if (!(model.delta > 0.0)) {
    throw std::invalid_argument("model: delta must be positive");
  }

  ValidationReport rep;
  rep.e_log_a = mean_log_a(model.a_law);
  rep.sigma2 = mean_log2_a(model.a_law);
  rep.degenerate_a = law_is_degenerate(model.a_law);
  rep.spread_out = !rep.degenerate_a;  // all A-families are absolutely continuous

  auto set = [&](const std::string& id, bool holds, const char* method) {
    rep.moment_flags[id] = AssumptionFlag{holds, method};
  };

  // Centering: exact by parameter constraint in the critical regime,
  // strictly negative drift in the contractive regime.
  if (model.regime == Regime::Critical) {
    set("centering", rep.e_log_a == 0.0, "analytic");
    if (rep.e_log_a == 0.0) rep.e_log_a = 0.0;  // normalize -0
  } else {
    set("drift_negative", rep.e_log_a < 0.0, "analytic");
  }

  set("a_not_degenerate", !rep.degenerate_a, "analytic");
  set("spread_out", rep.spread_out, "structural");
  // No a.s. fixed point: automatic for absolutely continuous A.
  set("no_fixed_point", !rep.degenerate_a, "structural");

  // Log-moment of order 2+delta and the +-delta moments of A: every
  // supported A-family has all moments of log A and of A finite.
  const double mp = a_moment(model.a_law, model.delta);
  const double mn = a_moment(model.a_law, -model.delta);
  set("a_pos_moment", std::isfinite(mp), "analytic");
  set("a_neg_moment", std::isfinite(mn), "analytic");
  set("log_moment_2plus", true, "analytic");
  // Exponential moment of the reflected increment law reduces to E[A^-gamma].
  set("increment_exp_moment", std::isfinite(mn), "analytic");

  if (needs_b) {
    set("b_moment", true, "analytic");  // all B-families have all moments
  }
  if (model.kind == ChainKind::Letac) {
    set("c_moment", true, "analytic");
    set("b_floor", ess_inf_b(*model.b_law) >= model.delta, "structural");
  }
  if (model.kind == ChainKind::Extremal) {
    set("d_moment", true, "analytic");
    set("d_floor", ess_inf_d(*model.d_law) >= model.delta, "structural");
  }

  if (model.regime == Regime::Critical && !rep.degenerate_a) {
    // sigma2 > 0 whenever A is non-degenerate
    set("sigma2_positive", rep.sigma2 > 0.0, "analytic");
  }
  return rep;
}

}  // namespace critmc
