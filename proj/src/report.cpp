#include "thermo/report.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <future>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>

#include "thermo/acceptance.hpp"
#include "thermo/continuous.hpp"
#include "thermo/errors.hpp"
#include "thermo/gram.hpp"
#include "thermo/spectrum.hpp"

#include <Eigen/Core>

namespace thermo {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::ValidationFailed: return "validation_failed";
    case RunStatus::NumericalFailure: return "numerical_failure";
    case RunStatus::AcceptanceFailed: return "acceptance_failed";
  }
  return "?";
}

int exit_code(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return 0;
    case RunStatus::ValidationFailed: return 1;
    case RunStatus::NumericalFailure: return 2;
    case RunStatus::AcceptanceFailed: return 3;
  }
  return 2;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest failed");
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int k = 0; k < len; ++k) out << std::setw(2) << static_cast<int>(digest[k]);
  return out.str();
}

CsvWriter::CsvWriter(std::vector<std::string> header) {
  for (std::size_t k = 0; k < header.size(); ++k) body_ += (k ? "," : "") + header[k];
  body_ += '\n';
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) body_ += (k ? "," : "") + cells[k];
  body_ += '\n';
  ++rows_;
  return *this;
}

std::string CsvWriter::num(double v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << std::setprecision(17) << v;
  return out.str();
}

std::string CsvWriter::num(long long v) { return std::to_string(v); }

std::string CsvWriter::payload() const { return body_; }

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ProducedFile CsvWriter::write(const fs::path& path) const {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOError("cannot write " + path.string());
  out << "# generated " << utc_now() << " by thermolab " << THERMO_VERSION << '\n' << body_;
  out.close();
  if (!out) throw IOError("write failed for " + path.string());
  return {path.string(), sha256_hex(body_), rows_};
}

fs::path output_directory(const Scenario& s) {
  if (const char* env = std::getenv("THERMO_OUT_DIR"); env && *env) return fs::path(env);
  return fs::path(s.output_dir);
}

namespace {

using C = CsvWriter;

ordered_json params_of(const Scenario& s) {
  ordered_json p;
  p["model"] = std::string(to_string(s.kind));
  p["bc"] = std::string(to_string(s.bc));
  p["n"] = s.n;
  p["gamma"] = s.gamma;
  return p;
}

// Cross-checks the printed and assembled blocks for the scenario's case and
// turns every disagreement into a warning.
void discrepancy_warnings(const Scenario& s, RunReport& r) {
  const int n = std::min(s.n, 8);
  const DiscrepancyReport d = compare_printed_assembled(s.kind, s.bc, std::max(n, 2));
  for (const auto& b : d.blocks) {
    if (b.status == BlockStatus::Match) continue;
    ordered_json p = params_of(s);
    p["n_checked"] = d.n;
    p["block"] = b.block;
    p["status"] = std::string(to_string(b.status));
    std::ostringstream msg;
    msg << "printed " << to_string(s.kind) << "/" << to_string(s.bc) << " block " << b.block
        << " " << (b.status == BlockStatus::Undefined ? "is undefined (division by zero)"
                                                      : "disagrees with the assembled block")
        << "; max |diff| on defined entries " << b.max_abs_diff;
    r.warnings.push_back({"compare_printed_assembled", p, msg.str()});
  }
}

ProducedFile write_json(const std::string& body, const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOError("cannot write " + path.string());
  out << body;
  if (!out) throw IOError("write failed for " + path.string());
  return {path.string(), sha256_hex(body), 1};
}

fs::path out_file(const Scenario& s, const std::string& suffix) {
  return output_directory(s) / (s.file_prefix() + "_" + suffix);
}

void task_spectrum(const Scenario& s, RunReport& r) {
  const CouplingModel model(s.kind, s.gamma);
  const GeneratorMatrix A = build_generator(model, s.bc, s.n, s.provenance);
  const SpectrumReport sp = spectrum_report(A);
  C csv({"n", "re", "im", "branch"});
  int low = 0;
  for (std::size_t k = 0; k < sp.eigenvalues.size(); ++k) {
    const auto& l = sp.eigenvalues[k];
    csv.row({C::num(static_cast<long long>(s.n)), C::num(l.real()), C::num(l.imag()),
             std::string(to_string(sp.branches[k].branch))});
    low += sp.branches[k].low_confidence;
  }
  r.files.push_back(csv.write(out_file(s, "eigenvalues.csv")));

  std::vector<std::string> cols;
  for (int c = 1; c <= A.dim(); ++c) cols.push_back("c" + std::to_string(c));
  C gen(cols);
  for (int i = 0; i < A.dim(); ++i) {
    std::vector<std::string> cells;
    for (int c = 0; c < A.dim(); ++c) cells.push_back(C::num(A.entries()(i, c)));
    gen.row(cells);
  }
  r.files.push_back(gen.write(out_file(s, "generator.csv")));
  r.files.push_back(write_json(to_json(A).dump() + "\n", out_file(s, "generator.json")));

  const DissipativityDefect dd = dissipativity_defect(A, 1000, s.seed);
  r.results["abscissa"] = sp.abscissa;
  r.results["min_distance"] = sp.min_distance;
  r.results["dissipativity_sampled_max"] = dd.sampled_max;
  r.results["dissipativity_symmetric_max"] = dd.symmetric_part_max;
  r.results["seed"] = s.seed;
  r.results["generator"] = to_json(A);
  if (low > 0) {
    ordered_json p = params_of(s);
    p["count"] = low;
    r.warnings.push_back({"classify_branches", p,
                          std::to_string(low) +
                              " eigenvalue(s) matched neither branch rule; labeled hyperbolic "
                              "with low confidence"});
  }
  if (dd.symmetric_part_max > 1e-12) {
    r.warnings.push_back({"dissipativity_defect", params_of(s),
                          "largest symmetric-part eigenvalue " +
                              C::num(dd.symmetric_part_max) + " exceeds 1e-12"});
  }
}

void task_resolvent(const Scenario& s, RunReport& r) {
  std::vector<int> ns = s.ns.empty() ? std::vector<int>{s.n} : s.ns;
  const CouplingModel model(s.kind, s.gamma);
  const int num = grid_points(s.s_min, s.s_max, s.points_per_decade);
  ordered_json sups = ordered_json::array();
  double lo = INFINITY, hi = -INFINITY;
  for (int n : ns) {
    const GeneratorMatrix A = build_generator(model, s.bc, n, s.provenance);
    const ResolventScan scan = resolvent_scan(A, s.s_min, s.s_max, num, s.alpha);
    C csv({"s", "norm", "scaled"});
    for (const auto& p : scan.samples) csv.row({C::num(p.s), C::num(p.norm), C::num(p.scaled)});
    r.files.push_back(csv.write(out_file(s, "scan_n" + std::to_string(n) + ".csv")));
    sups.push_back({{"n", n}, {"supremum", scan.supremum}, {"argsup", scan.argsup},
                    {"samples", scan.samples.size()}});
    lo = std::min(lo, scan.supremum);
    hi = std::max(hi, scan.supremum);
    if (!scan.skipped.empty()) {
      ordered_json p = params_of(s);
      p["n"] = n;
      p["skipped"] = scan.skipped;
      r.warnings.push_back({"resolvent_scan", p,
                            std::to_string(scan.skipped.size()) +
                                " frequencies are numerically in the spectrum and were skipped"});
    }
  }
  r.results["alpha"] = s.alpha;
  r.results["grid_points_per_side"] = num;
  r.results["suprema"] = sups;
  r.results["relative_spread"] = (hi - lo) / hi;
}

void task_abscissa(const Scenario& s, RunReport& r) {
  const auto rows = abscissa_table(s.kind, s.bc, s.ns, s.gamma, s.provenance);
  C csv({"n", "min_distance"});
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& row : rows) {
    csv.row({C::num(static_cast<long long>(row.n)), C::num(row.min_distance)});
    lo = std::min(lo, row.min_distance);
    hi = std::max(hi, row.min_distance);
  }
  r.files.push_back(csv.write(out_file(s, "abscissa.csv")));
  r.results["relative_spread"] = hi > 0 ? (hi - lo) / hi : 0.0;
}

void task_roots(const Scenario& s, RunReport& r) {
  // Seeds default to i*k; the k column is the rounded imaginary part of the seed.
  std::vector<cdouble> seeds = s.seeds;
  if (seeds.empty())
    for (int k = s.k_min; k <= s.k_max; ++k) seeds.emplace_back(0.0, k);
  C csv({"bc", "gamma", "k", "re_lambda", "im_lambda", "converged"});
  ordered_json missed = ordered_json::array();
  for (cdouble seed : seeds) {
    const RootResult root = find_eigen_near(seed, s.gamma, s.bc, s.tol);
    csv.row({std::string(to_string(s.bc)), C::num(s.gamma), C::num(std::llround(seed.imag())),
             C::num(root.lambda.real()), C::num(root.lambda.imag()),
             root.converged ? "true" : "false"});
    if (!root.converged) missed.push_back({seed.real(), seed.imag()});
  }
  r.files.push_back(csv.write(out_file(s, "roots.csv")));
  r.results["roots"] = seeds.size();
  r.results["converged"] = seeds.size() - missed.size();
  if (!missed.empty()) {
    ordered_json p = params_of(s);
    p["seeds"] = missed;
    p["tol"] = s.tol;
    r.warnings.push_back({"find_eigen_near", p, "Newton did not converge from the listed seeds"});
  }
}

SimulationSetup setup_of(const Scenario& s) {
  return {CouplingModel(s.kind, s.gamma), s.bc, s.n, s.T, s.dt, s.scheme, s.provenance, s.n_grid};
}

void task_simulate(const Scenario& s, RunReport& r) {
  const Trajectory tr = simulate(setup_of(s), s.initial);
  C csv({"t", "E_modal", "E_grid"});
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    csv.row({C::num(tr.times[k]), C::num(tr.energy_modal[k]), C::num(tr.energy_grid[k])});
  r.files.push_back(csv.write(out_file(s, "energy.csv")));
  if (tr.meta.fell_back) {
    ordered_json p = params_of(s);
    p["condition"] = tr.meta.eigvec_condition;
    r.warnings.push_back({"integrate", p,
                          "eigenvector matrix is ill conditioned; fell back to the trapezoidal "
                          "scheme"});
  }
  const auto w = s.fit_window();
  r.results["energy_initial"] = tr.energy_modal.front();
  r.results["energy_final"] = tr.energy_modal.back();
  try {
    const RateFit e = fit_exponential_rate(tr.times, tr.energy_modal, w);
    r.results["exponential_rate"] = {{"rate", e.value}, {"r_squared", e.r_squared}};
    if (w.first >= 1.0) {
      const RateFit p = fit_polynomial_rate(tr.times, tr.energy_modal, w);
      r.results["polynomial_rate"] = {{"exponent", p.value}, {"r_squared", p.r_squared}};
    }
  } catch (const NonPositiveEnergy& e) {
    r.warnings.push_back({"fit_exponential_rate", params_of(s), e.what()});
  }
}

void write_sweep(const Scenario& s, RunReport& r, const std::vector<SweepRow>& rows,
                 const std::string& suffix) {
  C csv({"tag", "t", "E"});
  ordered_json terminal = ordered_json::array();
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.times.size(); ++k)
      csv.row({row.tag, C::num(row.times[k]), C::num(row.energy[k])});
    terminal.push_back({{"tag", row.tag},
                        {"E0", row.energy_initial},
                        {"ET", row.energy_final},
                        {"ratio", row.energy_final / row.energy_initial}});
  }
  r.files.push_back(csv.write(out_file(s, suffix)));
  r.results["terminal"] = terminal;
}

void task_verify(const Scenario& s, RunReport& r) {
  const auto results = acceptance::run_all(s.criteria);
  C csv({"criterion", "name", "passed", "seconds", "detail"});
  ordered_json arr = ordered_json::array();
  bool all = true;
  for (const auto& c : results) {
    std::string detail = c.detail;
    for (char& ch : detail)
      if (ch == ',' || ch == '\n') ch = ';';
    csv.row({C::num(static_cast<long long>(c.id)), c.name, c.passed ? "true" : "false",
             C::num(c.seconds), detail});
    arr.push_back({{"criterion", c.id}, {"passed", c.passed}, {"detail", c.detail},
                   {"line", acceptance::format_line(c)}});
    all = all && c.passed;
  }
  r.files.push_back(csv.write(out_file(s, "verify.csv")));
  r.results["criteria"] = arr;
  if (!all) {
    r.status = RunStatus::AcceptanceFailed;
    r.error = "AcceptanceFailure: one or more acceptance criteria failed";
  }
}

std::string error_name(const std::exception& e) {
  if (dynamic_cast<const GramNotSPD*>(&e)) return "GramNotSPD";
  if (dynamic_cast<const UndefinedEntry*>(&e)) return "UndefinedEntry";
  if (dynamic_cast<const NoConvergence*>(&e)) return "NoConvergence";
  if (dynamic_cast<const SingularShift*>(&e)) return "SingularShift";
  if (dynamic_cast<const SingularMatrix*>(&e)) return "SingularMatrix";
  if (dynamic_cast<const InsufficientBranch*>(&e)) return "InsufficientBranch";
  if (dynamic_cast<const IncompatibleData*>(&e)) return "IncompatibleData";
  if (dynamic_cast<const NonPositiveEnergy*>(&e)) return "NonPositiveEnergy";
  if (dynamic_cast<const SolveFailure*>(&e)) return "SolveFailure";
  if (dynamic_cast<const ValidationError*>(&e)) return "ValidationError";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const IOError*>(&e)) return "IOError";
  return "Error";
}

}  // namespace

RunReport run(const Scenario& s) {
  RunReport r;
  r.scenario = to_json(s);
  r.scenario["output_dir"] = output_directory(s).string();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    validate(s);
    if (s.task != Task::Verify && s.task != Task::ContinuousRoots) discrepancy_warnings(s, r);
    switch (s.task) {
      case Task::Spectrum: task_spectrum(s, r); break;
      case Task::Resolvent: task_resolvent(s, r); break;
      case Task::AbscissaTable: task_abscissa(s, r); break;
      case Task::ContinuousRoots: task_roots(s, r); break;
      case Task::Simulate: task_simulate(s, r); break;
      case Task::SmoothnessSweep:
        write_sweep(s, r, smoothness_sweep(setup_of(s), s.js), "sweep.csv");
        break;
      case Task::DiscontinuitySweep:
        write_sweep(s, r, discontinuity_sweep(setup_of(s)), "discontinuity.csv");
        break;
      case Task::Verify: task_verify(s, r); break;
    }
  } catch (const NumericalError& e) {
    r.status = RunStatus::NumericalFailure;
    r.error = error_name(e) + ": " + e.what();
  } catch (const Error& e) {
    r.status = RunStatus::ValidationFailed;
    r.error = error_name(e) + ": " + e.what();
  }
  if (r.status != RunStatus::Ok && r.status != RunStatus::AcceptanceFailed) {
    r.warnings.push_back({std::string(to_string(s.task)), params_of(s), r.error});
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<RunReport> run_batch(std::vector<Scenario> scenarios, int jobs) {
  // Output files are task-private: repeated prefixes get the batch index appended.
  std::set<std::string> seen;
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    std::string prefix = scenarios[k].file_prefix();
    if (!seen.insert(prefix).second) {
      scenarios[k].name = prefix + "_" + std::to_string(k);
      seen.insert(scenarios[k].name);
    }
  }
  std::vector<RunReport> out(scenarios.size());
  const int w = std::max(1, std::min<int>(jobs, static_cast<int>(scenarios.size())));
  if (w <= 1) {
    for (std::size_t k = 0; k < scenarios.size(); ++k) out[k] = run(scenarios[k]);
    return out;
  }
  std::vector<std::future<void>> futs;
  for (int t = 0; t < w; ++t)
    futs.push_back(std::async(std::launch::async, [&, t] {
      for (std::size_t k = t; k < scenarios.size(); k += w) out[k] = run(scenarios[k]);
    }));
  for (auto& f : futs) f.get();
  return out;
}

namespace {

ordered_json report_json(const RunReport& r) {
  ordered_json j;
  j["scenario"] = r.scenario;
  const auto& sc = r.scenario;
  ordered_json meta;
  for (const char* key : {"model", "bc", "gamma", "n", "seed"})
    if (sc.contains(key)) meta[key] = sc[key];
  if (sc.contains("T")) meta["grid"] = {{"T", sc["T"]}, {"dt", sc["dt"]}};
  if (sc.contains("s_min"))
    meta["grid"] = {{"s_min", sc["s_min"]}, {"s_max", sc["s_max"]},
                    {"points_per_decade", sc["points_per_decade"]}};
  meta["versions"] = {{"thermolab", THERMO_VERSION},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                    std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                    std::to_string(EIGEN_MINOR_VERSION)}};
  j["metadata"] = meta;
  j["status"] = std::string(to_string(r.status));
  if (!r.error.empty()) j["error"] = r.error;
  auto& files = j["files"] = ordered_json::array();
  for (const auto& f : r.files)
    files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"rows", f.rows}});
  j["results"] = r.results;
  auto& warns = j["warnings"] = ordered_json::array();
  for (const auto& w : r.warnings)
    warns.push_back({{"operation", w.operation}, {"parameters", w.parameters}, {"message", w.message}});
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

void render_text(std::ostringstream& out, const RunReport& r) {
  out << "scenario: " << r.scenario.dump() << '\n';
  out << "status: " << to_string(r.status) << '\n';
  if (!r.error.empty()) out << "error: " << r.error << '\n';
  out << "files:" << (r.files.empty() ? " []" : "") << '\n';
  for (const auto& f : r.files)
    out << "  - " << f.path << " rows=" << f.rows << " sha256=" << f.sha256 << '\n';
  if (!r.results.empty()) {
    ordered_json brief = r.results;
    brief.erase("generator");
    out << "results: " << brief.dump() << '\n';
  }
  if (r.warnings.empty()) {
    out << "warnings: []\n";
  } else {
    out << "warnings:\n";
    for (const auto& w : r.warnings)
      out << "  - " << w.operation << " " << w.parameters.dump() << ": " << w.message << '\n';
  }
  out << "wall_seconds: " << std::fixed << std::setprecision(3) << r.wall_seconds << '\n';
  out.unsetf(std::ios::fixed);
}

}  // namespace

std::string render_report(const RunReport& r, ReportFormat f) {
  if (f == ReportFormat::JSON) return report_json(r).dump(2) + "\n";
  std::ostringstream out;
  render_text(out, r);
  return out.str();
}

std::string render_reports(const std::vector<RunReport>& rs, ReportFormat f) {
  if (rs.size() == 1) return render_report(rs.front(), f);
  if (f == ReportFormat::JSON) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rs) arr.push_back(report_json(r));
    return arr.dump(2) + "\n";
  }
  std::ostringstream out;
  for (std::size_t k = 0; k < rs.size(); ++k) {
    if (k) out << "---\n";
    render_text(out, rs[k]);
  }
  return out.str();
}

void emit_report(const RunReport& r, ReportFormat f, const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOError("cannot write report " + path.string());
  out << render_report(r, f);
  if (!out) throw IOError("write failed for report " + path.string());
}

}  // namespace thermo
