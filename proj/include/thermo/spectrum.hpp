#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thermo/generator.hpp"

namespace thermo {

using cdouble = std::complex<double>;

// Dense non-symmetric eigensolve: diagonal balancing, then Hessenberg reduction
// and shifted QR. Every eigenpair is checked by its residual against
// 1e-9 * ||A||; failure raises NoConvergence with the matrix metadata.
std::vector<cdouble> eigenvalues(const GeneratorMatrix& A);
std::vector<cdouble> eigenvalues(const Eigen::MatrixXd& A, const std::string& label = "matrix");

// Diagonal similarity D^{-1} A D with power-of-two scales (Parlett-Reinsch).
struct Balanced {
  Eigen::MatrixXd B;
  Eigen::VectorXd scale;  // diagonal of D
};
Balanced balance(const Eigen::MatrixXd& A);

enum class Branch { Hyperbolic, Parabolic };
std::string_view to_string(Branch b);

struct BranchThresholds {
  double im_cut = 0.5;   // |Im| <= im_cut with Re <= re_cut is parabolic, |Im| >= im_cut hyperbolic
  double re_cut = -1.0;
};

struct BranchLabel {
  Branch branch;
  bool low_confidence;
};

std::vector<BranchLabel> classify_branches(const std::vector<cdouble>& eigs,
                                           const BranchThresholds& t = {});

struct SpectrumReport {
  int n = 0;
  std::vector<cdouble> eigenvalues;  // sorted by (Re descending, Im ascending)
  double abscissa = 0.0;             // max Re
  double min_distance = 0.0;         // min(-Re)
  std::vector<BranchLabel> branches;
};

SpectrumReport spectrum_report(const GeneratorMatrix& A, const BranchThresholds& t = {});

// ||(lambda I - A)^{-1}||_2 = 1 / sigma_min(lambda I - A).
// Raises SingularShift when sigma_min < 1e-14 ||A||.
double resolvent_norm(const GeneratorMatrix& A, cdouble lambda);
double resolvent_norm(const Eigen::MatrixXd& A, cdouble lambda);

struct ResolventSample {
  double s;
  double norm;
  double scaled;
};

struct ResolventScan {
  double alpha = 0.0;
  std::vector<ResolventSample> samples;  // sorted by s
  double supremum = 0.0;                 // of scaled values
  double argsup = 0.0;
  std::vector<double> skipped;           // frequencies flagged as numerically in the spectrum
};

struct ScanOptions {
  bool refine = true;  // add points around each |Im lambda|
  int workers = 0;     // 0: hardware concurrency
};

// Symmetric log grid: num points on [s_min, s_max] and their negatives.
ResolventScan resolvent_scan(const GeneratorMatrix& A, double s_min, double s_max, int num,
                             double alpha, const ScanOptions& opt = {});

// Points for a log grid with the given density.
int grid_points(double s_min, double s_max, int points_per_decade = 64);

struct AbscissaRow {
  int n;
  double min_distance;
};

std::vector<AbscissaRow> abscissa_table(CouplingKind kind, BoundaryCase bc,
                                        const std::vector<int>& ns, double gamma,
                                        Provenance provenance = Provenance::Assembled);

// max row sum of |A^{-1}|; raises SingularMatrix.
double inverse_inf_norm(const GeneratorMatrix& A);
double inverse_inf_norm(const Eigen::MatrixXd& A);

// Least-squares slope of log|Re| against log|Im| over eigenvalues with
// Im >= im_min (one of each conjugate pair). InsufficientBranch below 5 points.
double fit_branch_slope(const std::vector<cdouble>& eigs, double im_min = 2.0);

double polynomial_order_fit(const CouplingModel& model, BoundaryCase bc, int n);

}  // namespace thermo
