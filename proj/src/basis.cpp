#include "thermo/basis.hpp"

#include <cmath>
#include <numbers>

#include "thermo/errors.hpp"

namespace thermo {

double TrigTerm::value(double x) const {
  const double fx = freq * x;
  return amp * (kind == Trig::Sin ? std::sin(fx) : std::cos(fx));
}

double TrigTerm::derivative_value(double x) const { return derivative().value(x); }

TrigTerm TrigTerm::derivative() const {
  if (kind == Trig::Sin) return {Trig::Cos, freq, amp * freq};
  return {Trig::Sin, freq, -amp * freq};
}

ModalBasis build_basis(const CouplingModel& model, BoundaryCase bc, int n) {
  return build_basis(model.kind(), bc, n);
}

ModalBasis build_basis(CouplingKind kind, BoundaryCase bc, int n) {
  if (n < 1) throw ValidationError("build_basis: n must be >= 1");
  const double c = std::sqrt(2.0 / std::numbers::pi);

  ModalBasis b;
  b.kind = kind;
  b.bc = bc;
  b.n = n;
  b.phi.reserve(n);
  b.psi.reserve(n);
  b.xi.reserve(n);

  const Trig phi_kind = displacement_dirichlet(bc) ? Trig::Sin : Trig::Cos;
  const Trig xi_kind = temperature_dirichlet(bc) ? Trig::Sin : Trig::Cos;
  // The weak Dirichlet-Dirichlet family drops the 1/j scaling on phi.
  const bool scale_phi = !(kind == CouplingKind::Weak && bc == BoundaryCase::DD);

  for (int j = 1; j <= n; ++j) {
    b.phi.push_back({phi_kind, j, scale_phi ? c / j : c});
    b.psi.push_back({Trig::Sin, j, c});
    b.xi.push_back({xi_kind, j, c});
  }
  return b;
}

}  // namespace thermo
