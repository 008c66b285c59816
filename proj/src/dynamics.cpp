#include "thermo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "thermo/errors.hpp"
#include "thermo/spectrum.hpp"
#include "thermo/trig_integrals.hpp"

namespace thermo {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_piecewise(const PiecewiseConstant& p) {
  if (p.values.size() != p.breakpoints.size() + 1)
    throw ValidationError("PiecewiseConstant: need exactly one more value than breakpoints");
  double prev = 0.0;
  for (double b : p.breakpoints) {
    if (!(b > prev && b < kPi))
      throw ValidationError("PiecewiseConstant: breakpoints must increase strictly inside (0, pi)");
    prev = b;
  }
}

// (f, g) over (0, pi) for a field descriptor f and a single trig term g.
double field_inner(const Field& f, const TrigTerm& g) {
  return std::visit(
      overloaded{
          [](const Zero&) { return 0.0; },
          [&](const SineMode& s) { return inner_exact({Trig::Sin, s.j, s.amp}, g); },
          [&](const CosineMode& c) { return inner_exact({Trig::Cos, c.j, c.amp}, g); },
          [&](const PiecewiseConstant& p) {
            check_piecewise(p);
            double total = 0.0, lo = 0.0;
            for (std::size_t k = 0; k < p.values.size(); ++k) {
              const double hi = k < p.breakpoints.size() ? p.breakpoints[k] : kPi;
              total += p.values[k] * integral_exact(g, lo, hi);
              lo = hi;
            }
            return total;
          }},
      f);
}

// Rejects data whose boundary trace contradicts a Dirichlet (sine) family.
void check_trace(const Field& f, bool dirichlet, const char* name, BoundaryCase bc) {
  const auto* c = std::get_if<CosineMode>(&f);
  if (dirichlet && c && c->amp != 0.0) {
    std::ostringstream msg;
    msg << name << " = " << describe(f) << " has a nonzero boundary trace, but the " << name
        << " field is Dirichlet under " << to_string(bc);
    throw IncompatibleData(msg.str());
  }
}

}  // namespace

InitialData smooth_velocity(int j) {
  InitialData d;
  d.v0 = SineMode{j, 1.0};
  return d;
}

InitialData step_velocity() {
  InitialData d;
  d.v0 = PiecewiseConstant{{kPi / 2}, {2.0, -1.0}};
  return d;
}

std::string describe(const Field& f) {
  std::ostringstream out;
  std::visit(overloaded{[&](const Zero&) { out << "0"; },
                        [&](const SineMode& s) { out << s.amp << "*sin(" << s.j << "x)"; },
                        [&](const CosineMode& c) { out << c.amp << "*cos(" << c.j << "x)"; },
                        [&](const PiecewiseConstant& p) {
                          out << "piecewise{";
                          for (std::size_t k = 0; k < p.values.size(); ++k) {
                            if (k) out << " | " << p.breakpoints[k - 1] << " | ";
                            out << p.values[k];
                          }
                          out << "}";
                        }},
             f);
  return out.str();
}

VectorXd project_initial(const InitialData& data, const ModalBasis& basis,
                         const GramBlocks& gram) {
  const BoundaryCase bc = basis.bc;
  check_trace(data.u0, displacement_dirichlet(bc), "u0", bc);
  check_trace(data.v0, true, "v0", bc);
  check_trace(data.theta0, temperature_dirichlet(bc), "theta0", bc);
  if (std::holds_alternative<PiecewiseConstant>(data.u0))
    throw IncompatibleData("u0 must be H1: piecewise-constant displacement is not accepted");

  const int n = basis.n;
  VectorXd bu(n), bv(n), bt(n);
  // The displacement block stores du/dx, so u0 enters through its derivative.
  // Constant parts of Neumann fields are orthogonal to the cos(jx), j >= 1
  // families, which removes the mean mode at projection time.
  Field du0 = Zero{};
  if (const auto* s = std::get_if<SineMode>(&data.u0)) du0 = CosineMode{s->j, s->amp * s->j};
  if (const auto* c = std::get_if<CosineMode>(&data.u0)) du0 = SineMode{c->j, -c->amp * c->j};
  for (int j = 0; j < n; ++j) {
    bu(j) = field_inner(du0, basis.phi[j].derivative());
    bv(j) = field_inner(data.v0, basis.psi[j]);
    bt(j) = field_inner(data.theta0, basis.xi[j]);
  }
  VectorXd y(3 * n);
  y.segment(0, n) = gram.L1.transpose().triangularView<Eigen::Upper>().solve(bu);
  y.segment(n, n) = gram.L2.transpose().triangularView<Eigen::Upper>().solve(bv);
  y.segment(2 * n, n) = gram.L3.transpose().triangularView<Eigen::Upper>().solve(bt);
  return y;
}

VectorXd project_initial(const InitialData& data, const ModalBasis& basis,
                         const CouplingModel& model, BoundaryCase bc) {
  return project_initial(data, basis, assemble_gram(basis, model, bc));
}

std::string_view to_string(Scheme s) {
  return s == Scheme::TrapezoidalImplicit ? "trapezoidal" : "eigen";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "trapezoidal" || text == "TrapezoidalImplicit" || text == "cn")
    return Scheme::TrapezoidalImplicit;
  if (text == "eigen" || text == "EigenExpansion") return Scheme::EigenExpansion;
  throw ValidationError("scheme: expected \"trapezoidal\" or \"eigen\", got \"" +
                        std::string(text) + "\"");
}

std::vector<double> time_grid(double T, double dt) {
  if (!(T > 0) || !(dt > 0) || dt > T)
    throw ValidationError("time grid: need T > 0 and 0 < dt <= T");
  // Steps that land within 1e-9 dt of T count as exact.
  const double ratio = T / dt;
  long steps = std::lround(ratio);
  const bool exact = std::abs(ratio - steps) <= 1e-9 * std::max(1.0, ratio);
  if (!exact) steps = static_cast<long>(std::floor(ratio));
  std::vector<double> t;
  t.reserve(steps + 2);
  for (long k = 0; k <= steps; ++k) t.push_back(k * dt);
  if (exact)
    t.back() = T;
  else
    t.push_back(T);
  return t;
}

namespace {

MatrixXd cayley(const MatrixXd& A, double dt) {
  const Eigen::Index d = A.rows();
  const MatrixXd I = MatrixXd::Identity(d, d);
  Eigen::PartialPivLU<MatrixXd> lu(I - 0.5 * dt * A);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    std::ostringstream msg;
    msg << "trapezoidal step: I - (dt/2)A is singular (rcond " << rcond << ", dt " << dt << ")";
    throw SolveFailure(msg.str());
  }
  return lu.solve(I + 0.5 * dt * A);
}

struct EigenBasis {
  VectorXcd lambda;
  MatrixXcd V;
  double condition;
};

EigenBasis eigen_basis(const MatrixXd& A) {
  const Balanced bal = balance(A);
  Eigen::EigenSolver<MatrixXd> es(bal.B, true);
  if (es.info() != Eigen::Success) throw NoConvergence("eigen expansion: QR iteration failed");
  EigenBasis e{es.eigenvalues(), bal.scale.cast<std::complex<double>>().asDiagonal() *
                                     es.eigenvectors(),
               0.0};
  for (Eigen::Index k = 0; k < e.V.cols(); ++k) e.V.col(k).normalize();
  Eigen::BDCSVD<MatrixXcd> svd(e.V);
  const auto& sv = svd.singularValues();
  e.condition = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1)
                                      : std::numeric_limits<double>::infinity();
  return e;
}

}  // namespace

Trajectory integrate(const GeneratorMatrix& A, const VectorXd& y0, double T, double dt,
                     Scheme scheme) {
  const MatrixXd& M = A.entries();
  if (y0.size() != M.rows()) throw ValidationError("integrate: y0 has the wrong length");
  Trajectory tr;
  tr.times = time_grid(T, dt);
  tr.meta = {A.model().kind(), A.bc(), A.n(), A.model().gamma(), dt, scheme, false, 0.0};

  bool use_cayley = scheme == Scheme::TrapezoidalImplicit;
  if (!use_cayley) {
    const EigenBasis e = eigen_basis(M);
    tr.meta.eigvec_condition = e.condition;
    if (e.condition > 1e12) {
      tr.meta.fell_back = true;
      use_cayley = true;
    } else {
      const VectorXcd c = e.V.partialPivLu().solve(y0.cast<std::complex<double>>());
      for (double t : tr.times) {
        const VectorXcd w = (e.lambda * t).array().exp() * c.array();
        tr.states.push_back((e.V * w).real());
      }
    }
  }
  if (use_cayley) {
    const MatrixXd P = cayley(M, dt);
    tr.states.reserve(tr.times.size());
    tr.states.push_back(y0);
    for (std::size_t k = 1; k < tr.times.size(); ++k) {
      const double h = tr.times[k] - tr.times[k - 1];
      if (std::abs(h - dt) <= 1e-9 * dt)
        tr.states.push_back(P * tr.states.back());
      else
        tr.states.push_back(cayley(M, h) * tr.states.back());
    }
  }
  tr.energy_modal.reserve(tr.states.size());
  for (const auto& y : tr.states) tr.energy_modal.push_back(modal_energy(y));
  return tr;
}

double modal_energy(const VectorXd& y) { return 0.5 * y.squaredNorm(); }

Reconstructor::Reconstructor(const ModalBasis& basis, const GramBlocks& gram, int n_grid)
    : n_grid_(n_grid), n_(basis.n) {
  if (n_grid < 2) throw ValidationError("grid energy: N_grid must be >= 2");
  const int n = basis.n;
  MatrixXd Phi(n_grid + 1, n), Psi(n_grid + 1, n), Xi(n_grid + 1, n);
  const double h = kPi / n_grid;
  for (int i = 0; i <= n_grid; ++i) {
    const double x = i * h;
    for (int j = 0; j < n; ++j) {
      Phi(i, j) = basis.phi[j].value(x);
      Psi(i, j) = basis.psi[j].value(x);
      Xi(i, j) = basis.xi[j].value(x);
    }
  }
  // Dirichlet traces are imposed exactly rather than left at round-off.
  for (int i : {0, n_grid}) {
    Psi.row(i).setZero();
    if (displacement_dirichlet(basis.bc)) Phi.row(i).setZero();
    if (temperature_dirichlet(basis.bc)) Xi.row(i).setZero();
  }
  // z = L^{-1} ybar, so grid values are (basis values) L^{-1}.
  auto right_inv = [](const MatrixXd& X, const MatrixXd& L) -> MatrixXd {
    return L.transpose().triangularView<Eigen::Upper>().solve(X.transpose()).transpose();
  };
  Pu_ = right_inv(Phi, gram.L1);
  Pv_ = right_inv(Psi, gram.L2);
  Pt_ = right_inv(Xi, gram.L3);
}

GridFields Reconstructor::fields(const VectorXd& y) const {
  return {Pu_ * y.segment(0, n_), Pv_ * y.segment(n_, n_), Pt_ * y.segment(2 * n_, n_)};
}

double Reconstructor::energy(const VectorXd& y) const { return grid_energy(fields(y), n_grid_); }

double grid_energy(const GridFields& f, int n_grid) {
  const double h = kPi / n_grid;
  double sum = 0.0;
  for (int j = 0; j < n_grid; ++j) {
    const double du = (f.u(j + 1) - f.u(j)) / h;
    sum += du * du + f.v(j) * f.v(j) + f.theta(j) * f.theta(j);
  }
  return 0.5 * h * sum;
}

std::vector<double> grid_energy(const Trajectory& traj, const ModalBasis& basis,
                                const GramBlocks& gram, int n_grid) {
  const Reconstructor rec(basis, gram, n_grid);
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (const auto& y : traj.states) out.push_back(rec.energy(y));
  return out;
}

double thermal_dissipation(const VectorXd& y, const MatrixXd& G_frame) {
  const Eigen::Index n = G_frame.rows();
  const VectorXd th = y.segment(2 * n, n);
  return th.dot(G_frame * th);
}

namespace {

RateFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t m = xs.size();
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < m; ++k) mx += xs[k], my += ys[k];
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < m; ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  if (sxx == 0.0) throw ValidationError("rate fit: window holds a single abscissa");
  const double slope = sxy / sxx;
  const double r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return {slope, r2};
}

RateFit windowed_log_fit(const std::vector<double>& times, const std::vector<double>& E,
                         std::pair<double, double> window, bool log_time) {
  if (times.size() != E.size()) throw ValidationError("rate fit: times and E differ in length");
  if (!(window.first < window.second)) throw ValidationError("rate fit: empty window");
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    if (t < window.first || t > window.second) continue;
    if (!(E[k] > 0.0)) {
      std::ostringstream msg;
      msg << "rate fit: energy " << E[k] << " at t = " << t << " is not positive";
      throw NonPositiveEnergy(msg.str());
    }
    xs.push_back(log_time ? std::log(t) : t);
    ys.push_back(std::log(E[k]));
  }
  if (xs.size() < 2) throw ValidationError("rate fit: fewer than two samples in the window");
  return linear_fit(xs, ys);
}

}  // namespace

RateFit fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& E,
                             std::pair<double, double> window) {
  RateFit f = windowed_log_fit(times, E, window, false);
  f.value = -f.value;
  return f;
}

RateFit fit_polynomial_rate(const std::vector<double>& times, const std::vector<double>& E,
                            std::pair<double, double> window) {
  if (window.first < 1.0) throw ValidationError("polynomial rate fit: window must start at t >= 1");
  return windowed_log_fit(times, E, window, true);
}

std::complex<double> dominant_eigenvalue(const GeneratorMatrix& A, const VectorXd& y0,
                                         double share) {
  const EigenBasis e = eigen_basis(A.entries());
  const VectorXcd c = e.V.partialPivLu().solve(y0.cast<std::complex<double>>());
  const double top = c.cwiseAbs().maxCoeff();
  std::complex<double> best(-std::numeric_limits<double>::infinity(), 0.0);
  for (Eigen::Index k = 0; k < c.size(); ++k)
    if (std::abs(c(k)) >= share * top && e.lambda(k).real() > best.real()) best = e.lambda(k);
  if (best.imag() < 0) best = std::conj(best);
  return best;
}

Trajectory simulate(const SimulationSetup& s, const InitialData& data) {
  const ModalBasis basis = build_basis(s.model, s.bc, s.n);
  const GramBlocks gram = assemble_gram(basis, s.model, s.bc);
  const GeneratorMatrix A = build_generator(s.model, s.bc, s.n, s.provenance);
  const VectorXd y0 = project_initial(data, basis, gram);
  Trajectory tr = integrate(A, y0, s.T, s.dt, s.scheme);
  tr.energy_grid = grid_energy(tr, basis, gram, s.n_grid > 0 ? s.n_grid : std::max(2, s.n));
  return tr;
}

namespace {

std::vector<SweepRow> run_rows(const SimulationSetup& setup, std::vector<SweepRow> rows,
                               const std::vector<InitialData>& data, int workers) {
  auto one = [&](std::size_t k) {
    const Trajectory tr = simulate(setup, data[k]);
    rows[k].times = tr.times;
    rows[k].energy = tr.energy_modal;
    rows[k].energy_initial = tr.energy_modal.front();
    rows[k].energy_final = tr.energy_modal.back();
  };
  int w = workers > 0 ? workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  w = std::min<int>(w, static_cast<int>(rows.size()));
  if (w <= 1) {
    for (std::size_t k = 0; k < rows.size(); ++k) one(k);
  } else {
    std::vector<std::future<void>> futs;
    for (int t = 0; t < w; ++t)
      futs.push_back(std::async(std::launch::async, [&, t] {
        for (std::size_t k = t; k < rows.size(); k += w) one(k);
      }));
    for (auto& f : futs) f.get();
  }
  return rows;
}

}  // namespace

std::vector<SweepRow> smoothness_sweep(const SimulationSetup& setup, const std::vector<int>& js,
                                       int workers) {
  if (js.empty()) throw ValidationError("smoothness_sweep: js must be nonempty");
  std::vector<SweepRow> rows;
  std::vector<InitialData> data;
  for (int j : js) {
    if (j < 1) throw ValidationError("smoothness_sweep: j must be >= 1");
    rows.push_back({"j=" + std::to_string(j), j, 0, 0, {}, {}});
    data.push_back(smooth_velocity(j));
  }
  return run_rows(setup, std::move(rows), data, workers);
}

std::vector<SweepRow> discontinuity_sweep(const SimulationSetup& setup, int workers) {
  std::vector<SweepRow> rows{{"sin", 1, 0, 0, {}, {}}, {"step", 0, 0, 0, {}, {}}};
  return run_rows(setup, std::move(rows), {smooth_velocity(1), step_velocity()}, workers);
}

}  // namespace thermo
