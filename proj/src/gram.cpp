#include "thermo/gram.hpp"

#include <cmath>
#include <sstream>

#include "thermo/errors.hpp"
#include "thermo/trig_integrals.hpp"

namespace thermo {

MatrixXd cholesky_lower_ltl(const MatrixXd& M, const char* label) {
  const Eigen::Index n = M.rows();
  if (M.cols() != n) throw GramNotSPD(std::string(label) + " is not square");
  const double max_diag = n > 0 ? M.diagonal().cwiseAbs().maxCoeff() : 0.0;
  const double floor = 1e-14 * max_diag;

  // Factor the index-reversed matrix as C C^T, then undo the reversal:
  // M = (P C P)(P C^T P) = U U^T with U upper, so L = U^T.
  MatrixXd R = M.reverse();
  MatrixXd C = MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = R(j, j) - C.row(j).head(j).squaredNorm();
    if (!(d > floor) || !std::isfinite(d)) {
      std::ostringstream msg;
      msg << label << " not positive definite: pivot " << j << " = " << d
          << " (threshold " << floor << ")";
      throw GramNotSPD(msg.str());
    }
    const double cjj = std::sqrt(d);
    C(j, j) = cjj;
    for (Eigen::Index i = j + 1; i < n; ++i)
      C(i, j) = (R(i, j) - C.row(i).head(j).dot(C.row(j).head(j))) / cjj;
  }
  MatrixXd U = C.reverse();
  return U.transpose();
}

GramBlocks assemble_gram(const ModalBasis& basis, const CouplingModel& model, BoundaryCase bc) {
  if (basis.kind != model.kind() || basis.bc != bc)
    throw ValidationError("assemble_gram: basis was built for a different model/boundary case");
  const int n = basis.n;
  GramBlocks g;
  g.M1.resize(n, n);
  g.M2.resize(n, n);
  g.M3.resize(n, n);
  g.Dtilde.resize(n, n);
  g.Ftilde.resize(n, n);
  g.G.resize(n, n);

  const bool strong = model.kind() == CouplingKind::Strong;
  for (int i = 0; i < n; ++i) {
    const TrigTerm dphi_i = basis.phi[i].derivative();
    const TrigTerm dxi_i = basis.xi[i].derivative();
    for (int j = 0; j < n; ++j) {
      const TrigTerm dphi_j = basis.phi[j].derivative();
      const TrigTerm dpsi_j = basis.psi[j].derivative();
      g.M1(i, j) = inner_exact(dphi_i, dphi_j);
      g.M2(i, j) = inner_exact(basis.psi[i], basis.psi[j]);
      g.M3(i, j) = inner_exact(basis.xi[i], basis.xi[j]);
      g.Dtilde(i, j) = inner_exact(dphi_i, dpsi_j);
      g.Ftilde(i, j) = strong ? inner_exact(dxi_i, basis.psi[j])
                              : inner_exact(basis.xi[i], basis.psi[j]);
      g.G(i, j) = inner_exact(dxi_i, basis.xi[j].derivative());
    }
  }
  g.L1 = cholesky_lower_ltl(g.M1, "M1");
  g.L2 = cholesky_lower_ltl(g.M2, "M2");
  g.L3 = cholesky_lower_ltl(g.M3, "M3");
  return g;
}

namespace {

// L^{-T} X for lower-triangular L.
MatrixXd left_inv_t(const MatrixXd& L, const MatrixXd& X) {
  return L.transpose().triangularView<Eigen::Upper>().solve(X);
}

// X L^{-1} for lower-triangular L, computed as (L^{-T} X^T)^T.
MatrixXd right_inv(const MatrixXd& X, const MatrixXd& L) {
  return left_inv_t(L, X.transpose()).transpose();
}

}  // namespace

FrameBlocks orthonormal_blocks(const GramBlocks& g) {
  FrameBlocks f;
  f.D = right_inv(left_inv_t(g.L2, g.Dtilde), g.L1);
  f.F = right_inv(left_inv_t(g.L2, g.Ftilde), g.L3);
  f.G = right_inv(left_inv_t(g.L3, g.G), g.L3);
  return f;
}

}  // namespace thermo
