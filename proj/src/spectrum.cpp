#include "thermo/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "thermo/errors.hpp"

namespace thermo {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

namespace {

std::string describe_matrix(const GeneratorMatrix& A) {
  std::ostringstream out;
  out << describe(A.model(), A.bc()) << " n=" << A.n() << " provenance="
      << to_string(A.provenance());
  return out.str();
}

bool eig_order(const cdouble& a, const cdouble& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() < b.imag();
}

}  // namespace

Balanced balance(const MatrixXd& A) {
  constexpr double radix = 2.0, sqrdx = radix * radix;
  const Eigen::Index n = A.rows();
  Balanced out{A, Eigen::VectorXd::Ones(n)};
  MatrixXd& B = out.B;
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = B.col(i).cwiseAbs().sum() - std::abs(B(i, i));
      double r = B.row(i).cwiseAbs().sum() - std::abs(B(i, i));
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        out.scale(i) *= f;
        B.row(i) /= f;
        B.col(i) *= f;
      }
    }
  }
  return out;
}

std::vector<cdouble> eigenvalues(const MatrixXd& A, const std::string& label) {
  if (A.rows() != A.cols()) throw ValidationError("eigenvalues: matrix must be square");
  if (!A.allFinite()) throw ValidationError("eigenvalues: non-finite entries in " + label);
  const Eigen::Index d = A.rows();
  if (d == 0) return {};

  const Balanced bal = balance(A);
  Eigen::EigenSolver<MatrixXd> es(bal.B, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success)
    throw NoConvergence("eigenvalues: QR iteration failed for " + label);

  const VectorXcd lam = es.eigenvalues();
  const MatrixXcd V = bal.scale.cast<cdouble>().asDiagonal() * es.eigenvectors();
  const MatrixXcd Ac = A.cast<cdouble>();
  const double normA = std::max(A.norm(), std::numeric_limits<double>::min());
  for (Eigen::Index k = 0; k < d; ++k) {
    const VectorXcd v = V.col(k);
    const double res = (Ac * v - lam(k) * v).norm() / v.norm();
    if (!(res <= 1e-9 * normA)) {
      std::ostringstream msg;
      msg << "eigenvalues: residual " << res << " exceeds 1e-9*||A|| for eigenvalue " << lam(k)
          << " of " << label;
      throw NoConvergence(msg.str());
    }
  }
  std::vector<cdouble> out(lam.data(), lam.data() + d);
  std::sort(out.begin(), out.end(), eig_order);
  return out;
}

std::vector<cdouble> eigenvalues(const GeneratorMatrix& A) {
  return eigenvalues(A.entries(), describe_matrix(A));
}

std::string_view to_string(Branch b) { return b == Branch::Parabolic ? "parabolic" : "hyperbolic"; }

std::vector<BranchLabel> classify_branches(const std::vector<cdouble>& eigs,
                                           const BranchThresholds& t) {
  std::vector<BranchLabel> out;
  out.reserve(eigs.size());
  for (const cdouble& l : eigs) {
    const double im = std::abs(l.imag());
    if (im <= t.im_cut && l.real() <= t.re_cut)
      out.push_back({Branch::Parabolic, false});
    else if (im >= t.im_cut)
      out.push_back({Branch::Hyperbolic, false});
    else
      out.push_back({Branch::Hyperbolic, true});
  }
  return out;
}

SpectrumReport spectrum_report(const GeneratorMatrix& A, const BranchThresholds& t) {
  SpectrumReport r;
  r.n = A.n();
  r.eigenvalues = eigenvalues(A);
  r.abscissa = -std::numeric_limits<double>::infinity();
  for (const auto& l : r.eigenvalues) r.abscissa = std::max(r.abscissa, l.real());
  // Round-off level abscissae (gamma = 0) are reported as exactly zero.
  if (std::abs(r.abscissa) <= 100 * std::numeric_limits<double>::epsilon() * A.entries().norm())
    r.abscissa = 0.0;
  r.min_distance = -r.abscissa;
  if (r.min_distance == 0.0) r.min_distance = 0.0;  // no negative zero in reports
  r.branches = classify_branches(r.eigenvalues, t);
  return r;
}

namespace {

// sigma_min(lambda I - A). Small matrices go through a full SVD; larger ones
// use inverse iteration on the triangular factor of the complex Schur form,
// which shares singular values with lambda I - A.
class SigmaMin {
 public:
  explicit SigmaMin(const MatrixXd& A) : A_(A), norm_(A.norm()) {
    if (A.rows() > 3 * 64) {
      Eigen::ComplexSchur<MatrixXcd> schur(A.cast<cdouble>(), /*computeU=*/false);
      if (schur.info() != Eigen::Success)
        throw NoConvergence("resolvent: complex Schur decomposition failed");
      T_ = schur.matrixT();
      use_schur_ = true;
    }
  }

  double norm() const { return norm_; }

  double operator()(cdouble lambda) const {
    return use_schur_ ? by_inverse_iteration(lambda) : by_svd(lambda);
  }

 private:
  double by_svd(cdouble lambda) const {
    MatrixXcd M = -A_.cast<cdouble>();
    M.diagonal().array() += lambda;
    Eigen::BDCSVD<MatrixXcd> svd(M);  // singular values only
    return svd.singularValues().minCoeff();
  }

  double by_inverse_iteration(cdouble lambda) const {
    MatrixXcd M = -T_;
    M.diagonal().array() += lambda;
    const Eigen::Index d = M.rows();
    if ((M.diagonal().cwiseAbs().array() == 0.0).any()) return 0.0;
    const auto U = M.triangularView<Eigen::Upper>();
    VectorXcd x(d);
    for (Eigen::Index k = 0; k < d; ++k) x(k) = cdouble(1.0 + 0.01 * k, 0.5 - 0.003 * k);
    x.normalize();
    double mu = 0.0;
    for (int it = 0; it < 400; ++it) {
      VectorXcd w = U.adjoint().solve(x);
      VectorXcd z = U.solve(w);
      mu = w.squaredNorm();  // x^H (M^H M)^{-1} x with ||x|| = 1
      if (!std::isfinite(mu)) return 0.0;
      const double res = (z - mu * x).norm();
      x = z / z.norm();
      if (res <= 1e-10 * mu) return 1.0 / std::sqrt(mu);
    }
    // Slow separation of the two smallest singular values: settle it exactly.
    Eigen::BDCSVD<MatrixXcd> svd(M);
    return svd.singularValues().minCoeff();
  }

  MatrixXd A_;
  double norm_;
  MatrixXcd T_;
  bool use_schur_ = false;
};

double checked_inverse(const SigmaMin& sm, cdouble lambda) {
  const double s = sm(lambda);
  if (!(s >= 1e-14 * sm.norm()) || s == 0.0) {
    std::ostringstream msg;
    msg << "resolvent: shift " << lambda << " is numerically in the spectrum (sigma_min = " << s
        << ")";
    throw SingularShift(msg.str());
  }
  return 1.0 / s;
}

}  // namespace

double resolvent_norm(const MatrixXd& A, cdouble lambda) {
  return checked_inverse(SigmaMin(A), lambda);
}

double resolvent_norm(const GeneratorMatrix& A, cdouble lambda) {
  return resolvent_norm(A.entries(), lambda);
}

int grid_points(double s_min, double s_max, int points_per_decade) {
  if (!(s_min > 0 && s_max > s_min)) throw ValidationError("grid_points: need 0 < s_min < s_max");
  return static_cast<int>(std::ceil(points_per_decade * std::log10(s_max / s_min))) + 1;
}

ResolventScan resolvent_scan(const GeneratorMatrix& A, double s_min, double s_max, int num,
                             double alpha, const ScanOptions& opt) {
  if (!(alpha >= 0.0)) throw ValidationError("resolvent_scan: alpha must be >= 0");
  if (num < 2) throw ValidationError("resolvent_scan: num must be >= 2");
  if (!(s_min > 0.0 && s_max > s_min))
    throw ValidationError("resolvent_scan: need 0 < s_min < s_max");
  if (alpha > 0.0 && s_min < 1.0)
    throw ValidationError("resolvent_scan: alpha > 0 requires s_min >= 1");

  const double ratio = std::pow(s_max / s_min, 1.0 / (num - 1));
  std::vector<double> pos;
  pos.reserve(num);
  for (int k = 0; k < num; ++k) pos.push_back(k == num - 1 ? s_max : s_min * std::pow(ratio, k));

  if (opt.refine) {
    for (const cdouble& l : eigenvalues(A)) {
      const double w = std::abs(l.imag());
      if (w < s_min || w > s_max) continue;
      const double step = w * (ratio - 1.0);
      for (double s : {w - step / 2, w, w + step / 2})
        if (s >= s_min && s <= s_max) pos.push_back(s);
    }
  }
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());

  std::vector<double> grid;
  grid.reserve(2 * pos.size());
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) grid.push_back(-*it);
  grid.insert(grid.end(), pos.begin(), pos.end());

  int workers = opt.workers > 0 ? opt.workers
                                : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min<int>(workers, static_cast<int>(grid.size()));

  // Each worker owns its evaluator (and so its matrix copy); results land in
  // slots indexed by grid position, which keeps the merge deterministic.
  std::vector<double> norms(grid.size(), std::numeric_limits<double>::quiet_NaN());
  const MatrixXd& M = A.entries();
  auto task = [&](int w) {
    const SigmaMin sm(M);
    for (std::size_t k = w; k < grid.size(); k += workers) {
      try {
        norms[k] = checked_inverse(sm, cdouble(0.0, grid[k]));
      } catch (const SingularShift&) {
        // left as NaN and reported as skipped
      }
    }
  };
  if (workers <= 1) {
    task(0);
  } else {
    std::vector<std::future<void>> futs;
    for (int w = 0; w < workers; ++w) futs.push_back(std::async(std::launch::async, task, w));
    for (auto& f : futs) f.get();
  }

  ResolventScan scan;
  scan.alpha = alpha;
  scan.supremum = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double s = grid[k];
    if (std::isnan(norms[k])) {
      scan.skipped.push_back(s);
      continue;
    }
    const double scaled = alpha == 0.0 ? norms[k] : norms[k] * std::pow(std::abs(s), -alpha);
    scan.samples.push_back({s, norms[k], scaled});
    if (scaled > scan.supremum) {
      scan.supremum = scaled;
      scan.argsup = s;
    }
  }
  return scan;
}

std::vector<AbscissaRow> abscissa_table(CouplingKind kind, BoundaryCase bc,
                                        const std::vector<int>& ns, double gamma,
                                        Provenance provenance) {
  if (ns.empty()) throw ValidationError("abscissa_table: ns must be nonempty");
  const CouplingModel model = CouplingModel::uncoupled(kind).with_gamma(gamma);
  std::vector<AbscissaRow> rows;
  for (int n : ns) {
    const GeneratorMatrix A = build_generator(model, bc, n, provenance);
    rows.push_back({n, spectrum_report(A).min_distance});
  }
  return rows;
}

double inverse_inf_norm(const MatrixXd& A) {
  Eigen::FullPivLU<MatrixXd> lu(A);
  if (!lu.isInvertible())
    throw SingularMatrix("inverse_inf_norm: matrix is singular (rank " +
                         std::to_string(lu.rank()) + " of " + std::to_string(A.rows()) + ")");
  const MatrixXd inv = lu.inverse();
  return inv.cwiseAbs().rowwise().sum().maxCoeff();
}

double inverse_inf_norm(const GeneratorMatrix& A) { return inverse_inf_norm(A.entries()); }

double fit_branch_slope(const std::vector<cdouble>& eigs, double im_min) {
  std::vector<double> xs, ys;
  const auto labels = classify_branches(eigs);
  for (std::size_t k = 0; k < eigs.size(); ++k) {
    const cdouble& l = eigs[k];
    if (labels[k].branch != Branch::Hyperbolic || l.imag() < im_min || l.real() == 0.0) continue;
    xs.push_back(std::log(l.imag()));
    ys.push_back(std::log(std::abs(l.real())));
  }
  if (xs.size() < 5)
    throw InsufficientBranch("fit_branch_slope: only " + std::to_string(xs.size()) +
                             " hyperbolic eigenvalues with Im >= " + std::to_string(im_min));
  Eigen::MatrixXd X(xs.size(), 2);
  Eigen::VectorXd y(ys.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    X(k, 0) = 1.0;
    X(k, 1) = xs[k];
    y(k) = ys[k];
  }
  const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
  return beta(1);
}

double polynomial_order_fit(const CouplingModel& model, BoundaryCase bc, int n) {
  if (model.kind() != CouplingKind::Weak)
    throw ValidationError("polynomial_order_fit: defined for the weak model only");
  if (model.is_uncoupled()) throw ValidationError("polynomial_order_fit: gamma must be > 0");
  return fit_branch_slope(eigenvalues(build_generator_assembled(model, bc, n)));
}

}  // namespace thermo
