#pragma once

#include <complex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "thermo/basis.hpp"
#include "thermo/generator.hpp"
#include "thermo/gram.hpp"

namespace thermo {

// Field descriptors on [0, pi].
struct Zero {};
struct SineMode {
  int j = 1;
  double amp = 1.0;
};
struct CosineMode {
  int j = 1;
  double amp = 1.0;
};
// values[k] holds on (breakpoints[k-1], breakpoints[k]); one more value than breakpoints.
struct PiecewiseConstant {
  std::vector<double> breakpoints;
  std::vector<double> values;
};
using Field = std::variant<Zero, SineMode, CosineMode, PiecewiseConstant>;

struct InitialData {
  Field u0 = Zero{}, v0 = Zero{}, theta0 = Zero{};
};

// u0 = theta0 = 0, v0 = sin(j x).
InitialData smooth_velocity(int j);
// v0 = 2 on (0, pi/2), -1 on (pi/2, pi).
InitialData step_velocity();

std::string describe(const Field& f);

// Orthonormal-frame coordinates ybar = L^{-T} b, where b collects the L2 inner
// products of (du0, dphi_j), (v0, psi_j), (theta0, xi_j).
Eigen::VectorXd project_initial(const InitialData& data, const ModalBasis& basis,
                                const CouplingModel& model, BoundaryCase bc);
Eigen::VectorXd project_initial(const InitialData& data, const ModalBasis& basis,
                                const GramBlocks& gram);

enum class Scheme { TrapezoidalImplicit, EigenExpansion };
std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view text);

struct TrajectoryMeta {
  CouplingKind kind = CouplingKind::Strong;
  BoundaryCase bc = BoundaryCase::DD;
  int n = 0;
  double gamma = 0.0;
  double dt = 0.0;
  Scheme scheme = Scheme::TrapezoidalImplicit;
  bool fell_back = false;  // eigen expansion replaced by the trapezoidal scheme
  double eigvec_condition = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> energy_modal;
  std::vector<double> energy_grid;  // filled by attach_grid_energy
  TrajectoryMeta meta;
};

// Time grid 0, dt, 2 dt, ..., with a shorter final step when dt does not divide T.
std::vector<double> time_grid(double T, double dt);

Trajectory integrate(const GeneratorMatrix& A, const Eigen::VectorXd& y0, double T, double dt,
                     Scheme scheme = Scheme::TrapezoidalImplicit);

double modal_energy(const Eigen::VectorXd& y);

// Point values of u, v, theta at x_j = j pi / N, j = 0..N.
struct GridFields {
  Eigen::VectorXd u, v, theta;
};

class Reconstructor {
 public:
  Reconstructor(const ModalBasis& basis, const GramBlocks& gram, int n_grid);
  GridFields fields(const Eigen::VectorXd& ybar) const;
  // h/2 sum_{j<N} ((u_{j+1}-u_j)/h)^2 + v_j^2 + theta_j^2
  double energy(const Eigen::VectorXd& ybar) const;
  int n_grid() const { return n_grid_; }

 private:
  int n_grid_;
  int n_;
  Eigen::MatrixXd Pu_, Pv_, Pt_;  // grid values per orthonormal coordinate
};

double grid_energy(const GridFields& f, int n_grid);
std::vector<double> grid_energy(const Trajectory& traj, const ModalBasis& basis,
                                const GramBlocks& gram, int n_grid);

// int |d theta/dx|^2 for the state, from the orthonormal G block.
double thermal_dissipation(const Eigen::VectorXd& ybar, const Eigen::MatrixXd& G_frame);

struct RateFit {
  double value;      // rate (exponential) or exponent (polynomial)
  double r_squared;
};

RateFit fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& E,
                             std::pair<double, double> window);
RateFit fit_polynomial_rate(const std::vector<double>& times, const std::vector<double>& E,
                            std::pair<double, double> window);

// Slowest decaying eigenvalue among those whose component in y0 is at least
// `share` of the largest component.
std::complex<double> dominant_eigenvalue(const GeneratorMatrix& A, const Eigen::VectorXd& y0,
                                         double share = 0.1);

struct SimulationSetup {
  CouplingModel model;
  BoundaryCase bc;
  int n;
  double T = 100.0;
  double dt = 0.1;
  Scheme scheme = Scheme::TrapezoidalImplicit;
  Provenance provenance = Provenance::Assembled;
  int n_grid = 0;  // 0: same as n
};

Trajectory simulate(const SimulationSetup& setup, const InitialData& data);

struct SweepRow {
  std::string tag;  // "j=1", ..., or "sin", "step"
  int j = 0;
  double energy_initial = 0.0;
  double energy_final = 0.0;
  std::vector<double> times, energy;
};

// v0 = sin(j x) for each j. Results ordered as js; runs farmed to `workers` threads.
std::vector<SweepRow> smoothness_sweep(const SimulationSetup& setup, const std::vector<int>& js,
                                       int workers = 0);

// sin(x) datum next to the step datum 2 on (0, pi/2), -1 on (pi/2, pi).
std::vector<SweepRow> discontinuity_sweep(const SimulationSetup& setup, int workers = 0);

}  // namespace thermo
