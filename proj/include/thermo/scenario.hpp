#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "thermo/dynamics.hpp"
#include "thermo/generator.hpp"
#include "thermo/model.hpp"

namespace thermo {

enum class Task {
  Spectrum,
  Resolvent,
  AbscissaTable,
  ContinuousRoots,
  Simulate,
  SmoothnessSweep,
  DiscontinuitySweep,
  Verify
};
std::string_view to_string(Task t);
Task parse_task(std::string_view text);

struct Scenario {
  std::string name;
  CouplingKind kind = CouplingKind::Weak;
  BoundaryCase bc = BoundaryCase::DD;
  int n = 32;
  double gamma = kDefaultGamma;
  Task task = Task::Spectrum;
  Provenance provenance = Provenance::Assembled;

  // Dynamics
  double T = 100.0;
  double dt = 0.1;
  Scheme scheme = Scheme::TrapezoidalImplicit;
  int n_grid = 0;  // 0: same as n
  std::optional<std::pair<double, double>> window;  // default: second half of [0, T]
  InitialData initial = smooth_velocity(1);
  std::vector<int> js{1, 2, 3};

  // Spectral
  double alpha = 0.0;
  double s_min = 1.0;
  double s_max = 1000.0;
  int points_per_decade = 64;
  std::vector<int> ns;  // abscissa table / resolvent family; empty: task default

  // Continuous spectrum
  int k_min = 5;
  int k_max = 30;
  double tol = 1e-12;
  std::vector<std::complex<double>> seeds;  // Newton starting points; empty: i*k over the k range

  // Verify
  std::vector<int> criteria;  // empty: all

  std::uint64_t seed = 42;
  std::string output_dir = "out";

  std::pair<double, double> fit_window() const;
  std::string file_prefix() const;  // name, or a tag built from the parameters
};

// Reads and validates a scenario file. ParseError carries the line (syntax) or
// the field (types); ValidationError lists every violated range at once.
Scenario parse_scenario(const std::filesystem::path& path);
Scenario parse_scenario_json(const nlohmann::json& j, const std::string& origin = "scenario");
// A file holding one scenario object, an array of them, or {"scenarios": [...]}.
std::vector<Scenario> parse_scenario_batch(const std::filesystem::path& path);

// Throws ValidationError naming all fields out of range.
void validate(const Scenario& s);

nlohmann::ordered_json to_json(const Scenario& s);
nlohmann::ordered_json to_json(const Field& f);
Field field_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace thermo
