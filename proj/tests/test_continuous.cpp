#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "thermo/continuous.hpp"
#include "thermo/errors.hpp"
#include "thermo/generator.hpp"
#include "thermo/spectrum.hpp"

using namespace thermo;
using oracle::kPi;

namespace {

constexpr double kGamma = 0.05;

QuarticRoots synthetic(cdouble lambda, cdouble a, cdouble b) {
  QuarticRoots r;
  r.lambda = lambda;
  r.gamma = kGamma;
  r.a = a;
  r.b = b;
  return r;
}

}  // namespace

TEST(Quartic, MinusOne) {
  for (double g : {0.05, 1.0}) {
    const QuarticRoots r = roots_ab(-1.0, g);
    const double q = std::pow(1 + g * g, 0.25);
    EXPECT_NEAR(std::abs(r.D - 4 * (1 + g * g)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(r.a - q), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(r.b - cdouble(0, q)), 0.0, 1e-14);
    EXPECT_LT(quartic_residual(r), 1e-12);
  }
}

TEST(Quartic, LemmaRatesAtFifty) {
  const cdouble lambda(0, 50);
  const QuarticRoots r = roots_ab(lambda, kGamma);
  EXPECT_LE(std::abs(r.b * r.b - lambda) * std::abs(lambda), 10.0);
  EXPECT_LE(std::abs(r.a - lambda), 10.0 * std::sqrt(50.0));
}

TEST(Quartic, InvariantsOnRandomAnnulus) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> rad(1, 100), ang(0, 2 * kPi);
  for (int k = 0; k < 1000; ++k) {
    const cdouble lambda = std::polar(rad(rng), ang(rng));
    const QuarticRoots r = roots_ab(lambda, kGamma);
    const cdouble s = lambda * (lambda + 1.0);
    const cdouble p = lambda * (lambda * lambda + kGamma * kGamma);
    EXPECT_LE(std::abs(r.a * r.a + r.b * r.b - s), 1e-10 * std::abs(s));
    EXPECT_LE(std::abs(r.a * r.a * r.b * r.b - p), 1e-10 * std::abs(p));
    EXPECT_LE(quartic_residual(r), 1e-9);
  }
}

TEST(Quartic, LemmaRatesAlongImaginaryAxis) {
  for (int k = 0; k <= 400; ++k) {
    const double t = std::pow(10.0, 1.0 + 3.0 * k / 400);
    const cdouble lambda(0, t);
    const QuarticRoots r = roots_ab(lambda, kGamma);
    EXPECT_LE(std::abs(r.a + r.b - lambda) / std::sqrt(t), 10.0);
    EXPECT_LE(std::abs(r.a - r.b - lambda) / std::sqrt(t), 10.0);
    EXPECT_LE(std::abs(r.b * r.b - lambda) * t, 10.0);
  }
}

// Columns are rescaled, so check row 3 against row 1 (all ones before scaling).
TEST(BoundaryMatrix, DDThirdRow) {
  const QuarticRoots r = synthetic(cdouble(0.3, 0.2), 1.0, 2.0);
  const Eigen::Matrix4cd M = boundary_matrix(r, BoundaryCase::DD);
  const cdouble expect[] = {1.0, 1.0, 4.0, 4.0};
  for (int c = 0; c < 4; ++c) EXPECT_NEAR(std::abs(M(2, c) / M(0, c) - expect[c]), 0.0, 1e-13);
}

TEST(BoundaryMatrix, DNThirdRow) {
  const cdouble lambda(0.4, 1.1), a(1.3, 0.2), b(0.1, 0.9);
  const QuarticRoots r = synthetic(lambda, a, b);
  const Eigen::Matrix4cd M = boundary_matrix(r, BoundaryCase::DN);
  const cdouble l = a * (a * a - lambda * lambda), m = b * (b * b - lambda * lambda);
  const cdouble expect[] = {l, -l, m, -m};
  for (int c = 0; c < 4; ++c) EXPECT_NEAR(std::abs(M(2, c) / M(0, c) - expect[c]), 0.0, 1e-12);
}

TEST(BoundaryMatrix, EntriesStayBoundedForLargeRealParts) {
  const QuarticRoots r = roots_ab(-400.0, kGamma);
  for (auto bc : kAllBoundaryCases) {
    const Eigen::Matrix4cd M = boundary_matrix(r, bc);
    EXPECT_TRUE(M.allFinite());
    const auto d = char_det(r, bc);
    EXPECT_TRUE(std::isfinite(std::abs(d.det_direct)));
    EXPECT_NEAR(d.log_scale, default_log_scale(r), 1e-12 * d.log_scale);
  }
}

TEST(CharDet, DirectDeterminantMatchesLeibniz) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> rad(1, 50), ang(0, 2 * kPi);
  for (auto bc : kAllBoundaryCases)
    for (int k = 0; k < 50; ++k) {
      const auto d = char_det(std::polar(rad(rng), ang(rng)), kGamma, bc);
      EXPECT_LE(std::abs(d.det_direct - oracle::det4(d.matrix)), 1e-12 * d.hadamard);
    }
}

TEST(CharDet, ClosedFormAgreesOnRandomAnnulus) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> rad(1, 50), ang(0, 2 * kPi);
  for (auto bc : kAllBoundaryCases)
    for (int k = 0; k < 200; ++k) {
      const auto d = char_det(std::polar(rad(rng), ang(rng)), kGamma, bc);
      if (std::abs(d.det_direct) <= 1e-12 * d.hadamard) continue;
      const cdouble closed = closed_form_orientation(bc) * d.det_closed;
      EXPECT_LE(std::abs(d.det_direct - closed), 1e-8 * std::abs(d.det_direct)) << to_string(bc);
    }
}

TEST(CharDet, DNAtTwentyI) {
  const auto d = char_det(cdouble(0, 20), kGamma, BoundaryCase::DN);
  const cdouble ratio = d.det_direct / (closed_form_orientation(BoundaryCase::DN) * d.det_closed);
  EXPECT_NEAR(ratio.real(), 1.0, 1e-6);
  EXPECT_NEAR(ratio.imag(), 0.0, 1e-6);
}

TEST(CharDet, DDVanishesWhenSinhVanishes) {
  const auto d = char_det(synthetic(cdouble(0.2, 3.0), cdouble(0, 3), cdouble(0.7, 0.4)),
                          BoundaryCase::DD);
  EXPECT_LE(std::abs(d.det_closed), 1e-13 * d.hadamard);
}

TEST(CharDet, NNVanishesWhenSinhVanishes) {
  const auto d = char_det(synthetic(cdouble(0.5, 1.0), cdouble(0, 1), cdouble(0.3, 1.2)),
                          BoundaryCase::NN);
  EXPECT_LE(std::abs(d.det_closed), 1e-13 * d.hadamard);
}

TEST(CharDet, NDAuxiliaryProductVanishesAtExcludedPoints) {
  for (cdouble lambda : {cdouble(0, 0), cdouble(0, kGamma), cdouble(0, -kGamma)}) {
    const auto d = char_det(lambda, kGamma, BoundaryCase::ND);
    EXPECT_EQ(d.l * d.m, cdouble(0.0));
  }
}

// a -> -a, b -> -b and a <-> b permute the roots; the determinant keeps its modulus.
TEST(CharDet, BranchFlipsPreserveModulus) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> rad(1, 30), ang(0, 2 * kPi);
  for (auto bc : kAllBoundaryCases)
    for (int k = 0; k < 30; ++k) {
      const QuarticRoots r = roots_ab(std::polar(rad(rng), ang(rng)), kGamma);
      const double ls = default_log_scale(r);
      const double ref = std::abs(char_det(r, bc, ls).det_direct);
      QuarticRoots f1 = r, f2 = r, f3 = r;
      f1.a = -r.a;
      f2.b = -r.b;
      std::swap(f3.a, f3.b);
      for (const auto& f : {f1, f2, f3})
        EXPECT_NEAR(std::abs(char_det(f, bc, ls).det_direct), ref, 1e-9 * ref);
    }
}

TEST(Newton, DDNearTenI) {
  const auto r = find_eigen_near(cdouble(0, 10), kGamma, BoundaryCase::DD);
  ASSERT_TRUE(r.converged);
  EXPECT_LE(std::abs(r.lambda.imag() - std::round(r.lambda.imag())), 0.05);
  EXPECT_LE(std::abs(r.lambda.real()), 1e-3);
  EXPECT_LT(r.lambda.real(), 0.0);
}

TEST(Newton, DDParabolicRoot) {
  const auto r = find_eigen_near(-100.0, kGamma, BoundaryCase::DD);
  ASSERT_TRUE(r.converged);
  EXPECT_LT(r.lambda.real(), 0.0);
  EXPECT_LE(std::abs(r.lambda.imag()), 1e-8);
  const double k = std::sqrt(-r.lambda.real());
  EXPECT_NEAR(k, std::round(k), 0.05);
  EXPECT_GE(std::round(k), 9);
  EXPECT_LE(std::round(k), 11);
}

TEST(Newton, NNNearFifteenI) {
  const auto r = find_eigen_near(cdouble(0, 15), kGamma, BoundaryCase::NN);
  ASSERT_TRUE(r.converged);
  EXPECT_LE(std::abs(r.lambda.real()), 1e-3);
}

TEST(Newton, RootsAreDeterminantZeros) {
  for (auto bc : kAllBoundaryCases)
    for (double k : {6.0, 13.0, 27.0}) {
      const auto r = find_eigen_near(cdouble(0, k), kGamma, bc);
      ASSERT_TRUE(r.converged) << to_string(bc) << " k=" << k;
      EXPECT_LE(r.residual, 1e-10);
      EXPECT_NEAR(r.lambda.imag(), k, 0.5);
    }
}

TEST(Newton, ZeroIterationBudgetReportsFlag) {
  const auto r = find_eigen_near(cdouble(0.3, 10.4), kGamma, BoundaryCase::DD, 1e-12, 1);
  EXPECT_FALSE(r.converged);
  EXPECT_TRUE(std::isfinite(r.lambda.real()));
}

TEST(Branch, WeakScaledRealPartBounded) {
  for (auto bc : {BoundaryCase::DD, BoundaryCase::DN}) {
    const auto rows = branch_asymptotics_check(kGamma, bc, 10, 30);
    ASSERT_EQ(rows.size(), 21u);
    double lo = INFINITY, hi = 0;
    for (const auto& row : rows) {
      ASSERT_TRUE(row.converged);
      lo = std::min(lo, row.scaled_re);
      hi = std::max(hi, row.scaled_re);
    }
    EXPECT_GT(lo, 0.0);
    EXPECT_LE(hi / lo, 4.0);
  }
}

TEST(Branch, DoublingGammaQuadruplesDamping) {
  const auto a = branch_asymptotics_check(kGamma, BoundaryCase::DD, 30, 30);
  const auto b = branch_asymptotics_check(2 * kGamma, BoundaryCase::DD, 30, 30);
  EXPECT_NEAR(b[0].lambda.real() / a[0].lambda.real(), 4.0, 1.0);
}

TEST(Branch, RangeValidated) {
  EXPECT_THROW(branch_asymptotics_check(kGamma, BoundaryCase::DD, 2, 10), ValidationError);
  EXPECT_THROW(branch_asymptotics_check(kGamma, BoundaryCase::DD, 10, 70), ValidationError);
}

TEST(Branch, ContinuousRootsMatchDiscreteSpectrum) {
  const auto eigs =
      eigenvalues(build_generator(CouplingModel(CouplingKind::Weak, kGamma), BoundaryCase::DD, 64));
  for (int k = 1; k <= 20; ++k) {
    const auto r = find_eigen_near(cdouble(0, k), kGamma, BoundaryCase::DD);
    double d = INFINITY;
    for (cdouble e : eigs) d = std::min(d, std::abs(e - r.lambda));
    EXPECT_LE(d, 1e-2) << "k=" << k;
  }
}
