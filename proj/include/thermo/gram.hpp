#pragma once

#include <Eigen/Dense>

#include "thermo/basis.hpp"
#include "thermo/model.hpp"

namespace thermo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct GramBlocks {
  MatrixXd M1, M2, M3;    // (dphi,dphi), (psi,psi), (xi,xi)
  MatrixXd Dtilde;        // (dphi_i, dpsi_j)
  MatrixXd Ftilde;        // strong: (dxi_i, psi_j), weak: (xi_i, psi_j)
  MatrixXd G;             // (dxi_i, dxi_j)
  MatrixXd L1, L2, L3;    // lower triangular, M = L^T L
};

// Lower-triangular L with M = L^T L (note the order: this is the reversed
// Cholesky, not Eigen's LL^T). Throws GramNotSPD if a pivot falls below
// 1e-14 * max diagonal.
MatrixXd cholesky_lower_ltl(const MatrixXd& M, const char* label = "M");

GramBlocks assemble_gram(const ModalBasis& basis, const CouplingModel& model, BoundaryCase bc);

// Orthonormal-frame blocks: X = L2^{-T} Dtilde L1^{-1}, C = L2^{-T} Ftilde L3^{-1},
// K = L3^{-T} G L3^{-1}. These are what the printed matrices call D, F, G.
struct FrameBlocks {
  MatrixXd D, F, G;
};
FrameBlocks orthonormal_blocks(const GramBlocks& g);

}  // namespace thermo
