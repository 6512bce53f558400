#pragma once

#include "critmc/model.hpp"

namespace critmc::test {

// Reference models used across the suite.
inline ModelSpec affine_critical() {  // M1
  ModelSpec m;
  m.kind = ChainKind::Affine;
  m.regime = Regime::Critical;
  m.delta = 0.5;
  m.a_law = LogNormalLaw{0.0, 0.25};
  m.b_law = NormalLaw{0.0, 1.0};
  return m;
}

inline ModelSpec letac_critical() {  // M2
  ModelSpec m;
  m.kind = ChainKind::Letac;
  m.regime = Regime::Critical;
  m.delta = 0.5;
  m.a_law = LogNormalLaw{0.0, 0.25};
  m.b_law = ShiftedHalfNormalLaw{0.5, 1.0};
  m.c_law = HalfNormalLaw{1.0};
  return m;
}

inline ModelSpec affine_contractive() {  // M3
  ModelSpec m;
  m.kind = ChainKind::Affine;
  m.regime = Regime::Contractive;
  m.delta = 0.5;
  m.a_law = LogNormalLaw{-0.125, 0.25};
  m.b_law = NormalLaw{0.0, 1.0};
  return m;
}

inline ModelSpec extremal_critical() {
  ModelSpec m;
  m.kind = ChainKind::Extremal;
  m.regime = Regime::Critical;
  m.delta = 0.5;
  m.a_law = LogNormalLaw{0.0, 0.25};
  m.d_law = ShiftedHalfNormalLaw{0.5, 1.0};
  return m;
}

}  // namespace critmc::test
