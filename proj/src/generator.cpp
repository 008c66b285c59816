#include "thermo/generator.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "thermo/basis.hpp"
#include "thermo/errors.hpp"
#include "thermo/gram.hpp"

namespace thermo {

using Eigen::MatrixXd;

std::string_view to_string(Provenance p) { return p == Provenance::Printed ? "printed" : "assembled"; }

Provenance parse_provenance(std::string_view text) {
  if (text == "printed" || text == "Printed") return Provenance::Printed;
  if (text == "assembled" || text == "Assembled") return Provenance::Assembled;
  throw ValidationError("provenance: expected \"printed\" or \"assembled\", got \"" +
                        std::string(text) + "\"");
}

std::string_view to_string(BlockStatus s) {
  switch (s) {
    case BlockStatus::Match: return "match";
    case BlockStatus::Mismatch: return "mismatch";
    case BlockStatus::Undefined: return "undefined";
  }
  return "?";
}

GeneratorMatrix::GeneratorMatrix(CouplingModel model, BoundaryCase bc, int n,
                                 Eigen::MatrixXd entries, Provenance provenance)
    : model_(model), bc_(bc), n_(n), entries_(std::move(entries)), provenance_(provenance) {
  if (entries_.rows() != entries_.cols())
    throw ValidationError("GeneratorMatrix: entries must be square");
  if (!entries_.allFinite()) throw ValidationError("GeneratorMatrix: non-finite entry");
}

GeneratorMatrix wrap_matrix(const Eigen::MatrixXd& entries) {
  // n is only meaningful for 3n-sized inputs; synthetic ones keep n = rows / 3.
  return GeneratorMatrix(CouplingModel::uncoupled(CouplingKind::Strong), BoundaryCase::DD,
                         static_cast<int>(entries.rows() / 3), entries, Provenance::Assembled);
}

MatrixXd compose_blocks(const MatrixXd& D, const MatrixXd& F, const MatrixXd& G, double gamma) {
  const Eigen::Index n = D.rows();
  MatrixXd A = MatrixXd::Zero(3 * n, 3 * n);
  A.block(0, n, n, n) = D.transpose();
  A.block(n, 0, n, n) = -D;
  // gamma multiplies a gamma-free block so coupling entries are exactly linear.
  A.block(n, 2 * n, n, n) = -(gamma * F);
  A.block(2 * n, n, n, n) = gamma * F.transpose();
  A.block(2 * n, 2 * n, n, n) = -G;
  return A;
}

namespace {

constexpr double kPi = std::numbers::pi;

MatrixXd diag_pow(int n, int p, double scale = 1.0) {
  MatrixXd M = MatrixXd::Zero(n, n);
  for (int j = 1; j <= n; ++j) M(j - 1, j - 1) = scale * std::pow(static_cast<double>(j), p);
  return M;
}

// -(4/pi) i j / (i^2 - j^2) on the given parity of |i-j|, zero elsewhere.
// Pairs with i == j inside the stated condition are recorded as undefined.
MatrixXd parity_formula(int n, bool odd, bool with_j, std::vector<std::pair<int, int>>& undefined,
                        bool flip_denominator = false) {
  MatrixXd M = MatrixXd::Zero(n, n);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      const bool is_odd = std::abs(i - j) % 2 == 1;
      if (is_odd != odd) continue;
      double den = static_cast<double>(i) * i - static_cast<double>(j) * j;
      if (flip_denominator) den = -den;
      if (den == 0.0) {
        undefined.emplace_back(i, j);
        M(i - 1, j - 1) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const double num = with_j ? static_cast<double>(i) * j : static_cast<double>(i);
      M(i - 1, j - 1) = -(4.0 / kPi) * num / den;
    }
  }
  return M;
}

}  // namespace

PrintedBlocks printed_blocks(CouplingKind kind, BoundaryCase bc, int n) {
  if (n < 1) throw ValidationError("n must be >= 1");
  PrintedBlocks p;
  const bool strong = kind == CouplingKind::Strong;

  if (displacement_dirichlet(bc)) {
    p.D = diag_pow(n, 1);
  } else {
    p.D = parity_formula(n, /*odd=*/false, /*with_j=*/true, p.undefined_D);
  }

  switch (bc) {
    case BoundaryCase::DD:
      p.F = strong ? parity_formula(n, true, true, p.undefined_F) : MatrixXd::Identity(n, n);
      p.G = diag_pow(n, 2);
      break;
    case BoundaryCase::DN:
      p.F = -diag_pow(n, 1);
      p.G = diag_pow(n, 2);
      break;
    case BoundaryCase::ND:
      p.F = strong ? parity_formula(n, true, true, p.undefined_F) : diag_pow(n, 1);
      p.G = strong ? diag_pow(n, 2, 2.0 / kPi) : diag_pow(n, 2);
      break;
    case BoundaryCase::NN:
      p.F = strong ? diag_pow(n, 1)
                   : parity_formula(n, false, false, p.undefined_F, /*flip_denominator=*/true);
      p.G = strong ? diag_pow(n, 1, 2.0 / kPi) : diag_pow(n, 2, 2.0 / kPi);
      break;
  }
  return p;
}

GeneratorMatrix build_generator_printed(const CouplingModel& model, BoundaryCase bc, int n) {
  PrintedBlocks p = printed_blocks(model.kind(), bc, n);
  auto reject = [&](const char* block, const std::vector<std::pair<int, int>>& where) {
    if (where.empty()) return;
    std::ostringstream msg;
    msg << "printed " << to_string(model.kind()) << "/" << to_string(bc) << " block " << block
        << " divides by zero at (i,j) = (" << where.front().first << "," << where.front().second
        << ")";
    if (where.size() > 1) msg << " and " << where.size() - 1 << " more";
    throw UndefinedEntry(msg.str());
  };
  reject("D", p.undefined_D);
  reject("F", p.undefined_F);
  reject("G", p.undefined_G);
  return GeneratorMatrix(model, bc, n, compose_blocks(p.D, p.F, p.G, model.gamma()),
                         Provenance::Printed);
}

GeneratorMatrix build_generator_assembled(const CouplingModel& model, BoundaryCase bc, int n) {
  const ModalBasis basis = build_basis(model, bc, n);
  const GramBlocks g = assemble_gram(basis, model, bc);
  const FrameBlocks f = orthonormal_blocks(g);
  return GeneratorMatrix(model, bc, n, compose_blocks(f.D, f.F, f.G, model.gamma()),
                         Provenance::Assembled);
}

GeneratorMatrix build_generator(const CouplingModel& model, BoundaryCase bc, int n,
                                Provenance provenance) {
  return provenance == Provenance::Printed ? build_generator_printed(model, bc, n)
                                           : build_generator_assembled(model, bc, n);
}

DissipativityDefect dissipativity_defect(const GeneratorMatrix& A, int trials,
                                         std::uint64_t seed) {
  if (trials < 1) throw ValidationError("dissipativity_defect: trials must be >= 1");
  const MatrixXd& M = A.entries();
  const Eigen::Index d = M.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  double sampled = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd y(d);
  for (int t = 0; t < trials; ++t) {
    for (Eigen::Index k = 0; k < d; ++k) y(k) = normal(rng);
    y.normalize();
    sampled = std::max(sampled, y.dot(M * y));
  }
  const MatrixXd S = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return {sampled, es.eigenvalues().maxCoeff()};
}

bool DiscrepancyReport::consistent() const {
  for (const auto& b : blocks)
    if (b.status != BlockStatus::Match) return false;
  return true;
}

nlohmann::json DiscrepancyReport::to_json() const {
  nlohmann::json j;
  j["kind"] = std::string(to_string(kind));
  j["bc"] = std::string(to_string(bc));
  j["n"] = n;
  j["tolerance"] = tolerance;
  j["consistent"] = consistent();
  auto& arr = j["blocks"] = nlohmann::json::array();
  for (const auto& b : blocks) {
    nlohmann::json e;
    e["block"] = b.block;
    e["status"] = std::string(to_string(b.status));
    e["max_abs_diff"] = b.max_abs_diff;
    auto& u = e["undefined_entries"] = nlohmann::json::array();
    for (auto [i, k] : b.undefined_entries) u.push_back({i, k});
    arr.push_back(e);
  }
  return j;
}

DiscrepancyReport compare_printed_assembled(CouplingKind kind, BoundaryCase bc, int n,
                                            double tol) {
  const PrintedBlocks p = printed_blocks(kind, bc, n);
  // gamma does not enter D, F, G, so any positive value works here.
  const CouplingModel model(kind, 1.0);
  const ModalBasis basis = build_basis(model, bc, n);
  const FrameBlocks f = orthonormal_blocks(assemble_gram(basis, model, bc));

  DiscrepancyReport r{kind, bc, n, tol, {}};
  auto cmp = [&](const char* name, const MatrixXd& printed, const MatrixXd& assembled,
                 const std::vector<std::pair<int, int>>& undefined) {
    BlockComparison b{name, BlockStatus::Match, 0.0, undefined};
    for (Eigen::Index i = 0; i < printed.rows(); ++i)
      for (Eigen::Index k = 0; k < printed.cols(); ++k)
        if (std::isfinite(printed(i, k)))
          b.max_abs_diff = std::max(b.max_abs_diff, std::abs(printed(i, k) - assembled(i, k)));
    if (!undefined.empty())
      b.status = BlockStatus::Undefined;
    else if (b.max_abs_diff > tol)
      b.status = BlockStatus::Mismatch;
    r.blocks.push_back(std::move(b));
  };
  cmp("D", p.D, f.D, p.undefined_D);
  cmp("F", p.F, f.F, p.undefined_F);
  cmp("G", p.G, f.G, p.undefined_G);
  return r;
}

void write_csv(std::ostream& out, const MatrixXd& M) {
  std::ostringstream row;
  row << std::setprecision(17);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    row.str("");
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) row << ',';
      row << M(i, j);
    }
    out << row.str() << '\n';
  }
}

nlohmann::json to_json(const GeneratorMatrix& A) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(A.model().kind()));
  j["bc"] = std::string(to_string(A.bc()));
  j["n"] = A.n();
  j["gamma"] = A.model().gamma();
  j["provenance"] = std::string(to_string(A.provenance()));
  auto& rows = j["entries"] = nlohmann::json::array();
  for (Eigen::Index i = 0; i < A.entries().rows(); ++i) {
    auto r = nlohmann::json::array();
    for (Eigen::Index k = 0; k < A.entries().cols(); ++k) r.push_back(A.entries()(i, k));
    rows.push_back(std::move(r));
  }
  return j;
}

}  // namespace thermo
