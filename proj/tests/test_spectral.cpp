#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "thermo/errors.hpp"
#include "thermo/generator.hpp"
#include "thermo/spectrum.hpp"

using namespace thermo;

namespace {

bool contains(const std::vector<cdouble>& eigs, cdouble z, double tol) {
  return std::any_of(eigs.begin(), eigs.end(), [&](cdouble e) { return std::abs(e - z) <= tol; });
}

GeneratorMatrix weak(BoundaryCase bc, int n, double g = 0.05) {
  return build_generator(CouplingModel(CouplingKind::Weak, g), bc, n);
}

GeneratorMatrix strong(BoundaryCase bc, int n, double g = 0.05) {
  return build_generator(CouplingModel(CouplingKind::Strong, g), bc, n);
}

}  // namespace

TEST(Eigenvalues, UncoupledStrongDD) {
  const auto eigs = eigenvalues(
      build_generator(CouplingModel::uncoupled(CouplingKind::Strong), BoundaryCase::DD, 3));
  ASSERT_EQ(eigs.size(), 9u);
  for (cdouble z : {cdouble(0, 1), cdouble(0, -1), cdouble(0, 2), cdouble(0, -2), cdouble(0, 3),
                    cdouble(0, -3), cdouble(-1, 0), cdouble(-4, 0), cdouble(-9, 0)})
    EXPECT_TRUE(contains(eigs, z, 1e-12)) << z;
}

TEST(Eigenvalues, UncoupledWeakDD) {
  const auto eigs = eigenvalues(
      build_generator(CouplingModel::uncoupled(CouplingKind::Weak), BoundaryCase::DD, 2));
  for (cdouble z : {cdouble(0, 1), cdouble(0, -1), cdouble(0, 2), cdouble(0, -2), cdouble(-1, 0),
                    cdouble(-4, 0)})
    EXPECT_TRUE(contains(eigs, z, 1e-12)) << z;
}

TEST(Eigenvalues, WeakDDIsStableAndInvertible) {
  const auto eigs = eigenvalues(weak(BoundaryCase::DD, 8));
  for (cdouble e : eigs) {
    EXPECT_LT(e.real(), 0.0);
    EXPECT_GT(std::abs(e), 1e-3);
  }
}

TEST(Eigenvalues, SortedAndResidualChecked) {
  const auto A = strong(BoundaryCase::DD, 16);
  const auto eigs = eigenvalues(A);
  for (std::size_t k = 1; k < eigs.size(); ++k) EXPECT_GE(eigs[k - 1].real(), eigs[k].real());
  // Each eigenvalue makes lambda I - A numerically singular.
  for (cdouble e : eigs) {
    Eigen::MatrixXcd M = -A.entries().cast<cdouble>();
    M.diagonal().array() += e;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    EXPECT_LE(svd.singularValues().minCoeff(), 1e-9 * A.entries().norm());
  }
}

TEST(Eigenvalues, ClosedUnderConjugation) {
  for (auto kind : {CouplingKind::Strong, CouplingKind::Weak})
    for (auto bc : kAllBoundaryCases) {
      const auto eigs = eigenvalues(build_generator(CouplingModel(kind, 0.2), bc, 12));
      for (cdouble e : eigs) EXPECT_TRUE(contains(eigs, std::conj(e), 1e-9));
    }
}

TEST(Eigenvalues, AbscissaNegativeForPositiveGamma) {
  for (auto kind : {CouplingKind::Strong, CouplingKind::Weak})
    for (auto bc : kAllBoundaryCases) {
      const auto r = spectrum_report(build_generator(CouplingModel(kind, 0.05), bc, 10));
      EXPECT_LT(r.abscissa, 0.0) << to_string(kind) << "/" << to_string(bc);
      EXPECT_EQ(r.min_distance, -r.abscissa);
    }
}

TEST(Branches, ThresholdRule) {
  const auto labels =
      classify_branches({cdouble(-100, 1e-4), cdouble(-0.00089, 57), cdouble(-0.3, 0.1)});
  EXPECT_EQ(labels[0].branch, Branch::Parabolic);
  EXPECT_FALSE(labels[0].low_confidence);
  EXPECT_EQ(labels[1].branch, Branch::Hyperbolic);
  EXPECT_FALSE(labels[1].low_confidence);
  EXPECT_EQ(labels[2].branch, Branch::Hyperbolic);
  EXPECT_TRUE(labels[2].low_confidence);
}

TEST(Branches, StrongHyperbolicBranchNearGuoLine) {
  const double g = 0.0423;
  const auto r = spectrum_report(strong(BoundaryCase::DD, 32, g));
  std::vector<double> high;
  for (std::size_t k = 0; k < r.eigenvalues.size(); ++k)
    if (r.branches[k].branch == Branch::Hyperbolic && std::abs(r.eigenvalues[k].imag()) > 20)
      high.push_back(r.eigenvalues[k].real());
  ASSERT_FALSE(high.empty());
  for (double re : high) EXPECT_NEAR(re, -g * g / 2, 0.5 * g * g / 2);
}

TEST(Resolvent, NormalExamples) {
  Eigen::Matrix2d A;
  A << -1, 0, 0, -2;
  EXPECT_NEAR(resolvent_norm(A, 0.0), 1.0, 1e-14);
  Eigen::Matrix2d S;
  S << 0, 1, -1, 0;
  EXPECT_NEAR(resolvent_norm(S, cdouble(0, 2)), 1.0, 1e-14);
}

TEST(Resolvent, SingularShiftIsReported) {
  Eigen::Matrix2d S;
  S << 0, 1, -1, 0;
  EXPECT_THROW(resolvent_norm(S, cdouble(0, 1)), SingularShift);
}

TEST(Resolvent, WeakDNAtZeroMatchesDirectInverse) {
  const auto A = build_generator(CouplingModel(CouplingKind::Weak, 0.5), BoundaryCase::DN, 8,
                                 Provenance::Printed);
  const double ref = oracle::resolvent_norm(A.entries(), 0.0);
  EXPECT_NEAR(resolvent_norm(A, 0.0) / ref, 1.0, 1e-10);
}

TEST(Resolvent, AgreesWithExplicitInverseUpToSixteenModes) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> re(-0.5, 0.5), im(-40, 40);
  for (int n : {2, 8, 16})
    for (auto bc : {BoundaryCase::DD, BoundaryCase::NN}) {
      const auto A = strong(bc, n, 0.3);
      for (int t = 0; t < 10; ++t) {
        const cdouble z(re(rng), im(rng));
        EXPECT_NEAR(resolvent_norm(A, z) / oracle::resolvent_norm(A.entries(), z), 1.0, 1e-8);
      }
    }
}

// dim > 192 takes the Schur and inverse-iteration route.
TEST(Resolvent, LargeMatrixPathAgreesWithOracle) {
  const auto A = weak(BoundaryCase::DD, 70);
  for (cdouble z : {cdouble(0, 3.5), cdouble(0, 17.02), cdouble(0.01, 60.0)}) {
    EXPECT_NEAR(resolvent_norm(A, z) / oracle::resolvent_norm(A.entries(), z), 1.0, 1e-8);
  }
}

TEST(Resolvent, LowerBoundByDistanceToSpectrum) {
  const auto A = weak(BoundaryCase::DN, 8, 0.2);
  const auto eigs = eigenvalues(A);
  const auto scan = resolvent_scan(A, 0.5, 50, 60, 0.0);
  for (const auto& p : scan.samples) {
    double d = INFINITY;
    for (cdouble e : eigs) d = std::min(d, std::abs(cdouble(0, p.s) - e));
    EXPECT_GE(p.norm, 1.0 / d - 1e-9);
  }
}

TEST(Resolvent, EqualityForNormalMatrices) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
  A.topLeftCorner(2, 2) << -0.1, 3, -3, -0.1;
  A.bottomRightCorner(2, 2) << -0.5, 7, -7, -0.5;
  const std::vector<cdouble> eigs{{-0.1, 3}, {-0.1, -3}, {-0.5, 7}, {-0.5, -7}};
  for (double s : {0.3, 2.9, 5.0, 6.8}) {
    double d = INFINITY;
    for (cdouble e : eigs) d = std::min(d, std::abs(cdouble(0, s) - e));
    EXPECT_NEAR(resolvent_norm(A, cdouble(0, s)), 1.0 / d, 1e-9);
  }
}

TEST(Scan, FindsNormalPeak) {
  const double eps = 1e-3, s0 = 12.34;
  Eigen::Matrix2d A;
  A << -eps, s0, -s0, -eps;
  const auto scan = resolvent_scan(wrap_matrix(A), 1, 100, grid_points(1, 100), 0.0);
  EXPECT_NEAR(scan.supremum, 1.0 / eps, 1e-6 / eps);
  EXPECT_NEAR(std::abs(scan.argsup), s0, 1e-12);
}

TEST(Scan, SymmetricUnderConjugation) {
  const auto A = strong(BoundaryCase::DN, 10, 0.1);
  const auto scan = resolvent_scan(A, 1, 100, 40, 0.0);
  std::map<double, double> by_s;
  for (const auto& p : scan.samples) by_s[p.s] = p.norm;
  int pairs = 0;
  for (const auto& [s, v] : by_s)
    if (s > 0 && by_s.count(-s)) {
      EXPECT_NEAR(by_s[-s] / v, 1.0, 1e-10);
      ++pairs;
    }
  EXPECT_GT(pairs, 30);
}

TEST(Scan, ScaledValuesUseAlpha) {
  const auto scan = resolvent_scan(weak(BoundaryCase::DD, 6), 1, 50, 20, 2.0);
  for (const auto& p : scan.samples) {
    EXPECT_GE(std::abs(p.s), 1.0);
    EXPECT_NEAR(p.scaled, p.norm / (p.s * p.s), 1e-12 * p.norm);
  }
}

TEST(Scan, WorkerCountDoesNotChangeResult) {
  const auto A = weak(BoundaryCase::DD, 12);
  const auto a = resolvent_scan(A, 1, 100, 50, 2.0, {true, 1});
  const auto b = resolvent_scan(A, 1, 100, 50, 2.0, {true, 3});
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    EXPECT_EQ(a.samples[k].s, b.samples[k].s);
    EXPECT_EQ(a.samples[k].norm, b.samples[k].norm);
  }
}

TEST(Scan, RejectsBadGrid) {
  const auto A = weak(BoundaryCase::DD, 4);
  EXPECT_THROW(resolvent_scan(A, 0.5, 10, 20, 2.0), ValidationError);
  EXPECT_THROW(resolvent_scan(A, 1, 10, 1, 0.0), ValidationError);
  EXPECT_THROW(resolvent_scan(A, 10, 1, 20, 0.0), ValidationError);
}

TEST(Scan, WeakPolynomialSupremumStableAcrossN) {
  double lo = INFINITY, hi = 0;
  for (int n : {16, 32}) {
    const double s = resolvent_scan(weak(BoundaryCase::DD, n), 1, 1000, grid_points(1, 1000), 2.0)
                         .supremum;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  EXPECT_LE((hi - lo) / hi, 0.1);
}

// Table 2 comes out at gamma = 0.1; compare to the printed digits.
TEST(Abscissa, ReproducesTableTwo) {
  const auto rows = abscissa_table(CouplingKind::Strong, BoundaryCase::DD, {8, 16, 24, 32}, 0.1);
  const double paper[] = {8.9227e-4, 8.9383e-4, 8.9402e-4, 8.9407e-4};
  ASSERT_EQ(rows.size(), 4u);
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(rows[k].n, 8 * (k + 1));
    EXPECT_NEAR(rows[k].min_distance, paper[k], 5e-9);
  }
}

TEST(Abscissa, StrongSpreadIsSmall) {
  for (double g : {0.04228, 0.1}) {
    const auto rows = abscissa_table(CouplingKind::Strong, BoundaryCase::DD, {8, 16, 24, 32}, g);
    double lo = INFINITY, hi = 0;
    for (const auto& r : rows) lo = std::min(lo, r.min_distance), hi = std::max(hi, r.min_distance);
    EXPECT_LE((hi - lo) / hi, 5e-3);
  }
}

TEST(Abscissa, UncoupledRowIsZero) {
  const auto r = spectrum_report(
      build_generator(CouplingModel::uncoupled(CouplingKind::Strong), BoundaryCase::DD, 8));
  EXPECT_EQ(r.min_distance, 0.0);
}

TEST(Abscissa, WeakGapClosesWithN) {
  const auto rows = abscissa_table(CouplingKind::Weak, BoundaryCase::DD, {8, 16, 32, 64}, 0.05);
  for (std::size_t k = 1; k < rows.size(); ++k)
    EXPECT_LT(rows[k].min_distance, rows[k - 1].min_distance);
  EXPECT_LT(rows[3].min_distance, rows[0].min_distance / 4);
}

TEST(InverseNorm, Examples) {
  EXPECT_NEAR(inverse_inf_norm(Eigen::MatrixXd::Constant(1, 1, -2.0)), 0.5, 1e-15);
  const auto printed = [](double g, int n) {
    return build_generator(CouplingModel(CouplingKind::Weak, g), BoundaryCase::DN, n,
                           Provenance::Printed);
  };
  EXPECT_NEAR(inverse_inf_norm(printed(0.5, 8)), 1.75, 1e-10);
  EXPECT_NEAR(inverse_inf_norm(printed(1.0, 32)), 3.0, 1e-10);
  for (int n : {2, 4, 8, 16, 32})
    for (double g : {0.05, 0.5, 1.0}) EXPECT_NEAR(inverse_inf_norm(printed(g, n)), g * g + g + 1, 1e-10);
}

TEST(InverseNorm, SingularMatrix) {
  EXPECT_THROW(inverse_inf_norm(Eigen::MatrixXd::Zero(3, 3)), SingularMatrix);
}

TEST(BranchSlope, SyntheticIsExact) {
  std::vector<cdouble> eigs;
  for (int k = 1; k <= 30; ++k) {
    eigs.emplace_back(-1.0 / (k * k), k);
    eigs.emplace_back(-1.0 / (k * k), -k);
  }
  EXPECT_NEAR(fit_branch_slope(eigs), -2.0, 1e-12);
}

TEST(BranchSlope, InsufficientBranch) {
  EXPECT_THROW(fit_branch_slope({cdouble(-0.1, 3), cdouble(-0.01, 4)}), InsufficientBranch);
}

TEST(BranchSlope, WeakOrderIsTwo) {
  for (auto bc : {BoundaryCase::DD, BoundaryCase::DN}) {
    const double s = polynomial_order_fit(CouplingModel(CouplingKind::Weak, 0.05), bc, 64);
    EXPECT_GE(s, -2.2);
    EXPECT_LE(s, -1.8);
  }
  EXPECT_THROW(polynomial_order_fit(CouplingModel(CouplingKind::Strong, 0.05), BoundaryCase::DD, 8),
               ValidationError);
}
