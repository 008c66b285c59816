#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "thermo/model.hpp"

namespace thermo {

using cdouble = std::complex<double>;

// Roots of X^4 - lambda(lambda+1) X^2 + lambda(lambda^2+gamma^2) = 0 as +-a, +-b.
//
// Branch convention: sqrtD is the square root of D closest to lambda(lambda-1),
// so that b^2 -> lambda and a -> lambda for large |lambda|. The smaller of
// a^2, b^2 comes from a^2 b^2 = lambda(lambda^2+gamma^2) to avoid cancellation.
// a and b are then principal square roots (Re >= 0).
struct QuarticRoots {
  cdouble lambda;
  double gamma = 0.0;
  cdouble a, b;
  cdouble D;      // (lambda(lambda+1))^2 - 4 lambda(lambda^2+gamma^2)
  cdouble sqrtD;  // branch described above
};

QuarticRoots roots_ab(cdouble lambda, double gamma);

// Same root set as roots_ab(lambda), but with labels and signs chosen closest
// to ref. Newton uses this to follow one analytic branch across cuts.
QuarticRoots roots_ab_continued(cdouble lambda, double gamma, const QuarticRoots& ref);

// |X^4 - s X^2 + p| / max(1, |lambda|^4) for X in {a, -a, b, -b}, maximized.
double quartic_residual(const QuarticRoots& r);

// Boundary-condition matrix acting on (alpha, beta, mu, delta). Column c
// (exponential exp(z x), z in {a, -a, b, -b}) is divided by exp(pi max(0, Re z))
// so every entry is O(1); det picks up exp(-log_scale) with
// log_scale = pi (|Re a| + |Re b|) by default.
Eigen::Matrix4cd boundary_matrix(const QuarticRoots& r, BoundaryCase bc,
                                 std::optional<double> log_scale = std::nullopt);
double default_log_scale(const QuarticRoots& r);

struct BoundaryDeterminant {
  BoundaryCase bc;
  Eigen::Matrix4cd matrix;
  cdouble det_direct;
  cdouble det_closed;  // printed closed form, same exp(-log_scale) factor
  double log_scale = 0.0;
  cdouble l, m, l_star, m_star;
  double hadamard = 0.0;  // product of row norms of matrix, a bound for |det|
};

BoundaryDeterminant char_det(cdouble lambda, double gamma, BoundaryCase bc);
BoundaryDeterminant char_det(const QuarticRoots& r, BoundaryCase bc,
                             std::optional<double> log_scale = std::nullopt);

// Sign relating the printed closed form to the determinant of the printed
// matrix: det_direct = orientation * det_closed. +1 for DD and NN, -1 for DN and ND.
double closed_form_orientation(BoundaryCase bc);

struct RootResult {
  cdouble lambda;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // |det| / hadamard at the returned iterate
};

// Damped Newton on det_direct with central-difference derivative.
// Never throws on non-convergence: the best iterate comes back with converged = false.
RootResult find_eigen_near(cdouble seed, double gamma, BoundaryCase bc, double tol = 1e-12,
                           int max_iterations = 100);

struct BranchRow {
  int k;
  cdouble lambda;
  double scaled_re;  // |Re lambda| * k^2
  bool converged;
};

// One root per k from seed i k. k_min >= 5 and k_max <= 60.
std::vector<BranchRow> branch_asymptotics_check(double gamma, BoundaryCase bc, int k_min,
                                                int k_max, int workers = 0);

}  // namespace thermo
