#pragma once

#include <map>
#include <optional>
#include <string>

#include "critmc/laws.hpp"

namespace critmc {

enum class ChainKind { Affine, Letac, Extremal };
enum class Regime { Critical, Contractive };

// Full description of the input law for one recursion, plus the regime.
// Criticality is enforced structurally: in the Critical regime the A-law
// parameters must give E[log A] = 0 exactly; nothing is re-centered at
// runtime.
struct ModelSpec {
  ChainKind kind = ChainKind::Affine;
  Regime regime = Regime::Critical;
  double delta = 0.5;  // moment exponent; also the floor in B >= delta
  ALaw a_law = LogNormalLaw{0.0, 0.25};
  std::optional<BLaw> b_law;   // Affine, Letac
  std::optional<CLaw> c_law;   // Letac only
  std::optional<DLaw> d_law;   // Extremal only
};

struct Innovation {
  double a = 1.0;
  double log_a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
};

Innovation sample_innovation(const ModelSpec& model, RandomStream& rng);

struct AssumptionFlag {
  bool holds = false;
  std::string method;  // "analytic" or "structural"
};

struct ValidationReport {
  double e_log_a = 0.0;
  double sigma2 = 0.0;  // E[log^2 A]
  std::map<std::string, AssumptionFlag> moment_flags;
  bool spread_out = false;
  bool degenerate_a = false;  // A == 1 a.s.

  bool all_hold() const {
    for (const auto& [k, f] : moment_flags)
      if (!f.holds) return false;
    return true;
  }
  std::string first_failure() const {
    for (const auto& [k, f] : moment_flags)
      if (!f.holds) return k;
    return {};
  }
};

// Pure: the same ModelSpec always yields the identical report. Throws
// std::invalid_argument only for structurally malformed specs (missing
// laws for the chain kind); assumption violations are reported as flags.
ValidationReport validate(const ModelSpec& model);

}  // namespace critmc
