#include "thermo/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

#include "thermo/continuous.hpp"
#include "thermo/dynamics.hpp"
#include "thermo/errors.hpp"
#include "thermo/generator.hpp"
#include "thermo/gram.hpp"
#include "thermo/spectrum.hpp"

namespace thermo::acceptance {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) passed = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " FAIL");
  }
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream out;
  out << std::setprecision(digits) << v;
  return out.str();
}

// C1
void printed_oracle(Outcome& o) {
  const std::pair<CouplingKind, BoundaryCase> cases[] = {
      {CouplingKind::Strong, BoundaryCase::DD},
      {CouplingKind::Weak, BoundaryCase::DD},
      {CouplingKind::Weak, BoundaryCase::DN}};
  for (auto [kind, bc] : cases) {
    bool ok = true;
    double worst = 0.0;
    std::string blocks;
    for (int n : {2, 4, 8}) {
      const DiscrepancyReport d = compare_printed_assembled(kind, bc, n, 1e-10);
      ok = ok && d.consistent();
      for (const auto& b : d.blocks) {
        worst = std::max(worst, b.max_abs_diff);
        if (b.status != BlockStatus::Match && blocks.find(b.block) == std::string::npos)
          blocks += b.block;
      }
    }
    std::string label = std::string(to_string(kind)) + "/" + std::string(to_string(bc)) +
                        " max diff " + fmt(worst);
    if (!blocks.empty()) label += " (block " + blocks + ")";
    o.require(ok, label);
  }
}

// C2
void inverse_norm_identity(Outcome& o) {
  double worst = 0.0;
  for (double g : {0.05, 0.5, 1.0})
    for (int n : {2, 8, 32}) {
      const GeneratorMatrix A =
          build_generator(CouplingModel(CouplingKind::Weak, g), BoundaryCase::DN, n,
                          Provenance::Printed);
      worst = std::max(worst, std::abs(inverse_inf_norm(A) - (g * g + g + 1.0)));
    }
  o.require(worst <= 1e-10, "max |norm - (g^2+g+1)| = " + fmt(worst));
}

// C3
void uncoupled_spectra(Outcome& o) {
  double worst = 0.0;
  for (int n = 1; n <= 32; ++n) {
    const auto eigs =
        eigenvalues(build_generator(CouplingModel::uncoupled(CouplingKind::Strong),
                                    BoundaryCase::DD, n));
    std::vector<cdouble> expect;
    for (int k = 1; k <= n; ++k) {
      expect.push_back({0.0, double(k)});
      expect.push_back({0.0, -double(k)});
      expect.push_back({-double(k) * k, 0.0});
    }
    std::vector<bool> used(eigs.size(), false);
    for (cdouble e : expect) {
      std::size_t best = 0;
      double d = INFINITY;
      for (std::size_t k = 0; k < eigs.size(); ++k)
        if (!used[k] && std::abs(eigs[k] - e) < d) d = std::abs(eigs[k] - e), best = k;
      used[best] = true;
      worst = std::max(worst, d);
    }
  }
  o.require(worst <= 1e-8, "max |lambda - exact| = " + fmt(worst) + " over n = 1..32");
}

// C4
void table_pattern(Outcome& o) {
  const auto rows = abscissa_table(CouplingKind::Strong, BoundaryCase::DD, {8, 16, 24, 32},
                                   0.04228);
  double lo = INFINITY, hi = -INFINITY;
  std::string values;
  for (const auto& r : rows) {
    lo = std::min(lo, r.min_distance);
    hi = std::max(hi, r.min_distance);
    values += (values.empty() ? "" : " ") + fmt(r.min_distance);
  }
  o.require((hi - lo) / hi <= 5e-3, "spread " + fmt(100 * (hi - lo) / hi, 3) + "%");
  o.require(lo >= 7e-4 && hi <= 1.1e-3, "values [" + values + "] in [7e-4, 1.1e-3]");
}

double scan_sup(CouplingKind kind, BoundaryCase bc, int n, double alpha) {
  const GeneratorMatrix A = build_generator(CouplingModel(kind, kDefaultGamma), bc, n);
  return resolvent_scan(A, 1.0, 1e3, grid_points(1.0, 1e3), alpha).supremum;
}

// C5
void uniform_exponential(Outcome& o) {
  const double s16 = scan_sup(CouplingKind::Strong, BoundaryCase::DD, 16, 0.0);
  const double s64 = scan_sup(CouplingKind::Strong, BoundaryCase::DD, 64, 0.0);
  const double rel = std::abs(s64 - s16) / std::max(s16, s64);
  o.require(rel <= 0.1, "sup n=16 " + fmt(s16, 6) + ", n=64 " + fmt(s64, 6) + ", variation " +
                            fmt(100 * rel, 3) + "%");
}

// C6
void uniform_polynomial(Outcome& o) {
  for (BoundaryCase bc : {BoundaryCase::DD, BoundaryCase::DN}) {
    const double s32 = scan_sup(CouplingKind::Weak, bc, 32, 2.0);
    const double s64 = scan_sup(CouplingKind::Weak, bc, 64, 2.0);
    const double rel = std::abs(s64 - s32) / std::max(s32, s64);
    o.require(rel <= 0.1, "weak/" + std::string(to_string(bc)) + " n=32 " + fmt(s32, 6) +
                              ", n=64 " + fmt(s64, 6) + ", variation " + fmt(100 * rel, 3) +
                              "%");
  }
}

// C7
void spectral_asymptotics(Outcome& o) {
  const auto eigs = eigenvalues(
      build_generator(CouplingModel(CouplingKind::Weak, 0.05), BoundaryCase::DD, 64));
  const double slope = fit_branch_slope(eigs);
  o.require(slope >= -2.2 && slope <= -1.8, "slope " + fmt(slope));
  double worst = 0.0;
  int missed = 0;
  for (int k = 1; k <= 20; ++k) {
    const RootResult r = find_eigen_near(cdouble(0.0, k), 0.05, BoundaryCase::DD);
    if (!r.converged) ++missed;
    double d = INFINITY;
    for (cdouble e : eigs) d = std::min(d, std::abs(e - r.lambda));
    worst = std::max(worst, d);
  }
  o.require(worst <= 1e-2 && missed == 0,
            "roots k<=20 max |dlambda| " + fmt(worst) + ", unconverged " + std::to_string(missed));
}

// C8
void determinant_equivalence(Outcome& o) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> radius(1.0, 50.0), angle(0.0, 2.0 * kPi);
  for (BoundaryCase bc : kAllBoundaryCases) {
    double worst = 0.0;
    int skipped = 0;
    for (int k = 0; k < 200; ++k) {
      const cdouble lambda = std::polar(radius(rng), angle(rng));
      const BoundaryDeterminant d = char_det(lambda, kDefaultGamma, bc);
      if (std::abs(d.det_direct) <= 1e-12 * d.hadamard) {
        ++skipped;
        continue;
      }
      const cdouble closed = closed_form_orientation(bc) * d.det_closed;
      worst = std::max(worst, std::abs(d.det_direct - closed) / std::abs(d.det_direct));
    }
    o.require(worst <= 1e-6, std::string(to_string(bc)) + " " + fmt(worst, 2) +
                                 (skipped ? " (" + std::to_string(skipped) + " near zeros)" : ""));
  }
}

// C9
void quartic_rates(Outcome& o) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> radius(1.0, 100.0), angle(0.0, 2.0 * kPi);
  double residual = 0.0, vieta = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const cdouble lambda = std::polar(radius(rng), angle(rng));
    const QuarticRoots r = roots_ab(lambda, kDefaultGamma);
    residual = std::max(residual, quartic_residual(r));
    const cdouble s = lambda * (lambda + 1.0);
    const cdouble p = lambda * (lambda * lambda + kDefaultGamma * kDefaultGamma);
    const cdouble a2 = r.a * r.a, b2 = r.b * r.b;
    vieta = std::max({vieta, std::abs(a2 + b2 - s) / std::max(1.0, std::abs(s)),
                      std::abs(a2 * b2 - p) / std::max(1.0, std::abs(p))});
  }
  o.require(residual <= 1e-9, "residual " + fmt(residual, 2));
  o.require(vieta <= 1e-9, "root sum/product " + fmt(vieta, 2));

  double r1 = 0.0, r2 = 0.0, r3 = 0.0;
  for (int k = 0; k <= 300; ++k) {
    const double t = std::pow(10.0, 1.0 + 3.0 * k / 300.0);
    const cdouble lambda(0.0, t);
    const QuarticRoots r = roots_ab(lambda, kDefaultGamma);
    const double h = std::sqrt(t);
    r1 = std::max(r1, std::abs(r.a + r.b - lambda) / h);
    r2 = std::max(r2, std::abs(r.a - r.b - lambda) / h);
    r3 = std::max(r3, std::abs(r.b * r.b - lambda) * t);
  }
  o.require(std::max({r1, r2, r3}) <= 10.0,
            "lemma ratios " + fmt(r1) + ", " + fmt(r2) + ", " + fmt(r3));
}

// C10
void energy_dissipation(Outcome& o) {
  for (CouplingKind kind : {CouplingKind::Strong, CouplingKind::Weak}) {
    const CouplingModel model(kind, kDefaultGamma);
    const ModalBasis basis = build_basis(model, BoundaryCase::DD, 100);
    const GramBlocks gram = assemble_gram(basis, model, BoundaryCase::DD);
    const GeneratorMatrix A = build_generator(model, BoundaryCase::DD, 100);
    const Trajectory tr =
        integrate(A, project_initial(smooth_velocity(1), basis, gram), 100.0, 0.1);
    const auto& E = tr.energy_modal;
    double rise = 0.0;
    for (std::size_t k = 1; k < E.size(); ++k) rise = std::max(rise, E[k] - E[k - 1]);

    const Eigen::MatrixXd G = orthonormal_blocks(gram).G;
    double num = 0.0, den = 0.0;
    for (std::size_t k = 1; k + 1 < E.size(); ++k) {
      if (tr.times[k] < 1.0) continue;
      const double rate = -(E[k + 1] - E[k - 1]) / (tr.times[k + 1] - tr.times[k - 1]);
      const double d = thermal_dissipation(tr.states[k], G);
      num += (rate - d) * (rate - d);
      den += d * d;
    }
    const double rel = std::sqrt(num / den);
    const std::string tag = std::string(to_string(kind)) + "/DD";
    o.require(rise <= 1e-12, tag + " max energy rise " + fmt(rise, 2));
    o.require(rel <= 0.05, tag + " dissipation error " + fmt(100 * rel, 3) + "%");
  }
}

// C11
void decay_dichotomy(Outcome& o) {
  {
    const CouplingModel model(CouplingKind::Strong, kDefaultGamma);
    const ModalBasis basis = build_basis(model, BoundaryCase::DD, 100);
    const GramBlocks gram = assemble_gram(basis, model, BoundaryCase::DD);
    const GeneratorMatrix A = build_generator(model, BoundaryCase::DD, 100);
    const Eigen::VectorXd y0 = project_initial(smooth_velocity(1), basis, gram);
    const Trajectory tr = integrate(A, y0, 100.0, 0.1);
    const RateFit fit = fit_exponential_rate(tr.times, tr.energy_modal, {50.0, 100.0});
    const double expect = 2.0 * std::abs(dominant_eigenvalue(A, y0).real());
    const double rel = std::abs(fit.value - expect) / expect;
    o.require(rel <= 0.15, "strong rate " + fmt(fit.value) + " vs " + fmt(expect) + " (" +
                               fmt(100 * rel, 3) + "%)");
  }
  std::vector<double> Ms;
  for (int n : {25, 50, 100}) {
    const CouplingModel model(CouplingKind::Weak, kDefaultGamma);
    const ModalBasis basis = build_basis(model, BoundaryCase::DD, n);
    const GramBlocks gram = assemble_gram(basis, model, BoundaryCase::DD);
    const GeneratorMatrix A = build_generator(model, BoundaryCase::DD, n);
    const Eigen::VectorXd y0 = project_initial(smooth_velocity(1), basis, gram);
    const Trajectory tr = integrate(A, y0, 100.0, 0.1);
    const double w = (A.entries() * y0).squaredNorm();
    double m = 0.0;
    for (std::size_t k = 0; k < tr.times.size(); ++k)
      if (tr.times[k] >= 1.0) m = std::max(m, tr.times[k] * tr.energy_modal[k] / w);
    Ms.push_back(m);
  }
  const double M = 1.1 * Ms[0];
  o.require(Ms[1] <= M && Ms[2] <= M, "weak M(25,50,100) = " + fmt(Ms[0]) + ", " + fmt(Ms[1]) +
                                          ", " + fmt(Ms[2]) + " with M = " + fmt(M));
}

// C12
void smoothness_sensitivity(Outcome& o) {
  const SimulationSetup weak{CouplingModel(CouplingKind::Weak, kDefaultGamma), BoundaryCase::DD,
                             100};
  const SimulationSetup strong{CouplingModel(CouplingKind::Strong, kDefaultGamma),
                               BoundaryCase::DD, 100};
  const auto w = smoothness_sweep(weak, {1, 2, 3});
  o.require(w[2].energy_final >= w[1].energy_final && w[1].energy_final >= w[0].energy_final,
            "weak E(100) j=1,2,3: " + fmt(w[0].energy_final) + ", " + fmt(w[1].energy_final) +
                ", " + fmt(w[2].energy_final));
  const auto s = smoothness_sweep(strong, {1, 2, 3});
  std::vector<double> rates;
  for (const auto& row : s) rates.push_back(fit_exponential_rate(row.times, row.energy, {50, 100}).value);
  const double lo = *std::min_element(rates.begin(), rates.end());
  const double hi = *std::max_element(rates.begin(), rates.end());
  o.require((hi - lo) / lo <= 0.2, "strong rates " + fmt(rates[0]) + ", " + fmt(rates[1]) +
                                       ", " + fmt(rates[2]));
  const auto d = discontinuity_sweep(weak);
  const double sin_ratio = d[0].energy_final / d[0].energy_initial;
  const double step_ratio = d[1].energy_final / d[1].energy_initial;
  o.require(step_ratio > sin_ratio,
            "E(100)/E(0) sin " + fmt(sin_ratio) + " vs step " + fmt(step_ratio));
}

// C13
void trotter_kato(Outcome& o) {
  constexpr int kGrid = 2048;
  const std::pair<CouplingKind, BoundaryCase> cases[] = {
      {CouplingKind::Weak, BoundaryCase::DD},
      {CouplingKind::Strong, BoundaryCase::DD},
      {CouplingKind::Weak, BoundaryCase::DN}};
  for (auto [kind, bc] : cases) {
    const CouplingModel model(kind, kDefaultGamma);
    GridFields f[2];
    for (int k = 0; k < 2; ++k) {
      const int n = k == 0 ? 64 : 128;
      const ModalBasis basis = build_basis(model, bc, n);
      const GramBlocks gram = assemble_gram(basis, model, bc);
      const GeneratorMatrix A = build_generator(model, bc, n);
      const Trajectory tr =
          integrate(A, project_initial(smooth_velocity(1), basis, gram), 1.0, 0.01,
                    Scheme::EigenExpansion);
      f[k] = Reconstructor(basis, gram, kGrid).fields(tr.states.back());
    }
    const GridFields diff{f[0].u - f[1].u, f[0].v - f[1].v, f[0].theta - f[1].theta};
    const double rel = std::sqrt(grid_energy(diff, kGrid) / grid_energy(f[1], kGrid));
    o.require(rel <= 1e-3, std::string(to_string(kind)) + "/" + std::string(to_string(bc)) +
                               " " + fmt(rel, 3));
  }
}

struct Spec {
  const char* name;
  double budget;
  std::function<void(Outcome&)> body;
};

const Spec& spec(int id) {
  static const Spec specs[kCriterionCount] = {
      {"printed-matrix oracle", 1, printed_oracle},
      {"inverse-norm identity", 1, inverse_norm_identity},
      {"uncoupled spectra", 5, uncoupled_spectra},
      {"abscissa table pattern", 30, table_pattern},
      {"uniform exponential criterion", 300, uniform_exponential},
      {"uniform polynomial criterion", 300, uniform_polynomial},
      {"spectral asymptotics", 120, spectral_asymptotics},
      {"determinant equivalence", 30, determinant_equivalence},
      {"quartic and lemma rates", 30, quartic_rates},
      {"energy monotonicity and dissipation", 60, energy_dissipation},
      {"decay dichotomy", 180, decay_dichotomy},
      {"smoothness and discontinuity sensitivity", 180, smoothness_sensitivity},
      {"numerical Trotter-Kato", 60, trotter_kato},
  };
  if (id < 1 || id > kCriterionCount)
    throw ValidationError("criterion must be in [1, " + std::to_string(kCriterionCount) + "]");
  return specs[id - 1];
}

}  // namespace

CriterionResult run_criterion(int id) {
  const Spec& s = spec(id);
  CriterionResult r;
  r.id = id;
  r.name = s.name;
  r.budget_seconds = s.budget;
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    s.body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("raised: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds > r.budget_seconds) o.require(false, "over time budget");
  r.passed = o.passed;
  r.detail = o.detail.str();
  return r;
}

std::vector<CriterionResult> run_all(const std::vector<int>& ids) {
  std::vector<int> todo = ids;
  if (todo.empty())
    for (int k = 1; k <= kCriterionCount; ++k) todo.push_back(k);
  std::vector<CriterionResult> out;
  for (int id : todo) out.push_back(run_criterion(id));
  return out;
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream out;
  out << (r.passed ? "[PASS] " : "[FAIL] ") << 'C' << std::setw(2) << std::setfill('0') << r.id
      << ' ' << r.name << ": " << r.detail << " (" << std::fixed << std::setprecision(1)
      << r.seconds << " s / " << std::setprecision(0) << r.budget_seconds << " s)";
  return out.str();
}

}  // namespace thermo::acceptance
