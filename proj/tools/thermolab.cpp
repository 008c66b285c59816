// thermolab: command-line front end for the thermoelastic modal toolkit.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thermo/errors.hpp"
#include "thermo/report.hpp"
#include "thermo/scenario.hpp"

using nlohmann::json;

namespace {

// Flags mirror scenario fields. Only flags that were given end up in the JSON,
// so task defaults come from the same code path as scenario files.
struct Flags {
  std::string model, bc, provenance, scheme, name, v0, theta0, u0;
  int n = 0, n_grid = 0, ppd = 0, k_min = 0, k_max = 0;
  double gamma = 0, T = 0, dt = 0, alpha = 0, s_min = 0, s_max = 0, tol = 0;
  std::vector<double> window;
  std::vector<std::string> seeds;
  std::vector<int> ns, js, criteria;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, CLI::Option*>> given;

  template <class V>
  CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key, V& var,
           const std::string& help) {
    given.emplace_back(key, app->add_option(flag, var, help));
    return given.back().second;
  }

  json to_json() const {
    json j = json::object();
    json init = json::object();
    for (const auto& [key, opt] : given) {
      if (!opt->count()) continue;
      if (key == "model") j[key] = model;
      else if (key == "bc") j[key] = bc;
      else if (key == "provenance") j[key] = provenance;
      else if (key == "scheme") j[key] = scheme;
      else if (key == "name") j[key] = name;
      else if (key == "n") j[key] = n;
      else if (key == "n_grid") j[key] = n_grid;
      else if (key == "points_per_decade") j[key] = ppd;
      else if (key == "k_min") j[key] = k_min;
      else if (key == "k_max") j[key] = k_max;
      else if (key == "gamma") j[key] = gamma;
      else if (key == "T") j[key] = T;
      else if (key == "dt") j[key] = dt;
      else if (key == "alpha") j[key] = alpha;
      else if (key == "s_min") j[key] = s_min;
      else if (key == "s_max") j[key] = s_max;
      else if (key == "tol") j[key] = tol;
      else if (key == "window") j[key] = window;
      else if (key == "ns") j[key] = ns;
      else if (key == "js") j[key] = js;
      else if (key == "criteria") j[key] = criteria;
      else if (key == "seed") j[key] = seed;
      else if (key == "seeds") {
        j[key] = json::array();
        for (const auto& z : seeds) j[key].push_back(point(z));
      }
      else if (key == "u0") init["u0"] = field(u0);
      else if (key == "v0") init["v0"] = field(v0);
      else if (key == "theta0") init["theta0"] = field(theta0);
    }
    if (!init.empty()) {
      if (!init.contains("v0")) init["v0"] = "zero";
      j["initial"] = init;
    }
    return j;
  }

  // "re,im"
  static json point(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw CLI::ValidationError("--seeds", "expected re,im");
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  }

  // "sin:3", "cos:2", "step", "zero", or an inline JSON descriptor.
  static json field(const std::string& text) {
    if (!text.empty() && text.front() == '{') return json::parse(text);
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const int j = colon == std::string::npos ? 1 : std::stoi(text.substr(colon + 1));
    if (head == "sin" || head == "sine") return {{"type", "sine"}, {"j", j}};
    if (head == "cos" || head == "cosine") return {{"type", "cosine"}, {"j", j}};
    return text;
  }
};

void common(CLI::App* app, Flags& f) {
  f.add(app, "--model", "model", f.model, "coupling: strong | weak");
  f.add(app, "--bc", "bc", f.bc, "boundary case: DD | DN | ND | NN");
  f.add(app, "--n", "n", f.n, "modes per field");
  f.add(app, "--gamma", "gamma", f.gamma, "coupling strength");
  f.add(app, "--provenance", "provenance", f.provenance, "printed | assembled");
  f.add(app, "--name", "name", f.name, "output file prefix");
  f.add(app, "--seed", "seed", f.seed, "random seed");
}

void dynamics_flags(CLI::App* app, Flags& f) {
  f.add(app, "--T", "T", f.T, "final time");
  f.add(app, "--dt", "dt", f.dt, "time step");
  f.add(app, "--scheme", "scheme", f.scheme, "trapezoidal | eigen");
  f.add(app, "--n-grid", "n_grid", f.n_grid, "cells of the energy grid");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modal analysis of coupled thermoelastic systems"};
  app.set_version_flag("--version", std::string(THERMO_VERSION));
  app.require_subcommand(1);

  std::string out, format = "text", report_path;
  int jobs = 1;
  std::string batch_file;
  app.add_option("--out", out, "output directory (overrides THERMO_OUT_DIR)");
  app.add_option("--format", format, "report format: json | text")
      ->check(CLI::IsMember({"json", "text"}));
  app.add_option("--report", report_path, "also write the report to this file");

  Flags f;
  struct Sub {
    CLI::App* app;
    const char* task;
  };
  std::vector<Sub> subs;

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues, branches, dissipativity check");
  common(spectrum, f);
  subs.push_back({spectrum, "Spectrum"});

  auto* resolvent = app.add_subcommand("resolvent", "resolvent norm scan along the imaginary axis");
  common(resolvent, f);
  f.add(resolvent, "--alpha", "alpha", f.alpha, "polynomial weight |s|^-alpha");
  f.add(resolvent, "--s-min", "s_min", f.s_min, "smallest |s|");
  f.add(resolvent, "--s-max", "s_max", f.s_max, "largest |s|");
  f.add(resolvent, "--ppd", "points_per_decade", f.ppd, "grid points per decade");
  f.add(resolvent, "--ns", "ns", f.ns, "several n at once");
  subs.push_back({resolvent, "Resolvent"});

  auto* abscissa = app.add_subcommand("abscissa", "distance of the spectrum to the imaginary axis");
  common(abscissa, f);
  f.add(abscissa, "--ns", "ns", f.ns, "n values (default 8 16 24 32)");
  subs.push_back({abscissa, "AbscissaTable"});

  auto* roots = app.add_subcommand("roots", "roots of the continuous characteristic determinant");
  common(roots, f);
  f.add(roots, "--k-min", "k_min", f.k_min, "first seed i*k");
  f.add(roots, "--k-max", "k_max", f.k_max, "last seed i*k");
  f.add(roots, "--tol", "tol", f.tol, "Newton tolerance");
  f.add(roots, "--seeds", "seeds", f.seeds, "Newton starting points re,im (default i*k)")
      ->delimiter(' ');
  subs.push_back({roots, "ContinuousRoots"});

  auto* simulate = app.add_subcommand("simulate", "time integration and energy curve");
  common(simulate, f);
  dynamics_flags(simulate, f);
  f.add(simulate, "--u0", "u0", f.u0, "initial displacement: zero | sin:j | cos:j | {json}");
  f.add(simulate, "--v0", "v0", f.v0, "initial velocity: zero | sin:j | cos:j | step | {json}");
  f.add(simulate, "--theta0", "theta0", f.theta0, "initial temperature");
  f.add(simulate, "--window", "window", f.window, "rate-fit window: start end")->expected(2);
  subs.push_back({simulate, "Simulate"});

  std::string sweep_kind = "smoothness";
  auto* sweep = app.add_subcommand("sweep", "smoothness or discontinuity sweep");
  common(sweep, f);
  dynamics_flags(sweep, f);
  sweep->add_option("--kind", sweep_kind, "smoothness | discontinuity")
      ->check(CLI::IsMember({"smoothness", "discontinuity"}));
  f.add(sweep, "--js", "js", f.js, "frequencies of v0 = sin(jx)");
  subs.push_back({sweep, "SmoothnessSweep"});

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  f.add(verify, "--criterion", "criteria", f.criteria, "criteria to run (default all)");
  subs.push_back({verify, "Verify"});

  auto* runcmd = app.add_subcommand("run", "run a scenario file or a batch of scenarios");
  runcmd->add_option("file", batch_file, "scenario JSON")->required();
  runcmd->add_option("--jobs", jobs, "concurrent scenarios")->check(CLI::PositiveNumber);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  // An explicit --out wins over the environment, which wins over the scenario.
  if (!out.empty()) setenv("THERMO_OUT_DIR", out.c_str(), 1);
  const thermo::ReportFormat fmt =
      format == "json" ? thermo::ReportFormat::JSON : thermo::ReportFormat::Text;

  std::vector<thermo::RunReport> reports;
  try {
    if (runcmd->parsed()) {
      reports = thermo::run_batch(thermo::parse_scenario_batch(batch_file), jobs);
    } else {
      for (const auto& s : subs) {
        if (!s.app->parsed()) continue;
        json j = f.to_json();
        j["task"] = s.task;
        if (s.app == sweep && sweep_kind == "discontinuity") j["task"] = "DiscontinuitySweep";
        reports.push_back(thermo::run(thermo::parse_scenario_json(j, "command line")));
      }
    }
  } catch (const thermo::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  for (const auto& r : reports)
    if (r.results.contains("criteria"))
      for (const auto& c : r.results["criteria"]) std::cerr << c["line"].get<std::string>() << '\n';
  std::cout << thermo::render_reports(reports, fmt);
  if (!report_path.empty()) {
    std::ofstream rep(report_path, std::ios::binary);
    rep << thermo::render_reports(reports, fmt);
    if (!rep) {
      std::cerr << "error: cannot write " << report_path << '\n';
      return 1;
    }
  }
  int code = 0;
  for (const auto& r : reports) code = std::max(code, thermo::exit_code(r.status));
  return code;
}
