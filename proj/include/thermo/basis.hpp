#pragma once

#include <vector>

#include "thermo/model.hpp"

namespace thermo {

enum class Trig { Sin, Cos };

// amp * sin(freq x) or amp * cos(freq x) on [0, pi].
struct TrigTerm {
  Trig kind = Trig::Sin;
  int freq = 1;
  double amp = 1.0;

  double value(double x) const;
  double derivative_value(double x) const;
  // d/dx as another single trig term (sin -> cos, cos -> -sin).
  TrigTerm derivative() const;
};

// phi feeds the displacement gradient block, psi the velocity block and xi the
// temperature block. Index j in [0, n) holds mode j + 1.
struct ModalBasis {
  CouplingKind kind = CouplingKind::Strong;
  BoundaryCase bc = BoundaryCase::DD;
  int n = 0;
  std::vector<TrigTerm> phi, psi, xi;
};

ModalBasis build_basis(const CouplingModel& model, BoundaryCase bc, int n);
ModalBasis build_basis(CouplingKind kind, BoundaryCase bc, int n);

}  // namespace thermo
