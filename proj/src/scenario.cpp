#include "thermo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "thermo/acceptance.hpp"
#include "thermo/errors.hpp"

namespace thermo {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kTaskNames[] = {"Spectrum",        "Resolvent",        "AbscissaTable",
                                      "ContinuousRoots", "Simulate",         "SmoothnessSweep",
                                      "DiscontinuitySweep", "Verify"};

bool is_dynamics(Task t) {
  return t == Task::Simulate || t == Task::SmoothnessSweep || t == Task::DiscontinuitySweep;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void field_error(const std::string& origin, const std::string& field,
                              const std::string& what) {
  throw ParseError(origin + ": field \"" + field + "\": " + what);
}

double get_number(const json& j, const std::string& key, const std::string& origin) {
  const json& v = j.at(key);
  if (!v.is_number()) field_error(origin, key, "expected a number, got " + std::string(v.type_name()));
  return v.get<double>();
}

int get_int(const json& j, const std::string& key, const std::string& origin) {
  const json& v = j.at(key);
  if (!v.is_number_integer())
    field_error(origin, key, "expected an integer, got " + std::string(v.type_name()));
  return v.get<int>();
}

std::string get_string(const json& j, const std::string& key, const std::string& origin) {
  const json& v = j.at(key);
  if (!v.is_string()) field_error(origin, key, "expected a string, got " + std::string(v.type_name()));
  return v.get<std::string>();
}

std::vector<int> get_int_list(const json& j, const std::string& key, const std::string& origin) {
  const json& v = j.at(key);
  if (!v.is_array()) field_error(origin, key, "expected an array of integers");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) field_error(origin, key, "expected an array of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

// Parsing enum-valued strings reports ValidationError; rewrap it with the field.
template <class F>
auto parse_enum(const json& j, const std::string& key, const std::string& origin, F f) {
  const std::string text = get_string(j, key, origin);
  try {
    return f(text);
  } catch (const ValidationError& e) {
    field_error(origin, key, e.what());
  }
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n');
}

}  // namespace

std::string_view to_string(Task t) { return kTaskNames[static_cast<int>(t)]; }

Task parse_task(std::string_view text) {
  const std::string t = lower(std::string(text));
  for (int k = 0; k < 8; ++k)
    if (lower(kTaskNames[k]) == t) return static_cast<Task>(k);
  throw ValidationError("task: unknown task \"" + std::string(text) + "\"");
}

std::pair<double, double> Scenario::fit_window() const {
  return window.value_or(std::make_pair(T / 2, T));
}

std::string Scenario::file_prefix() const {
  if (!name.empty()) return name;
  std::ostringstream out;
  out << lower(std::string(to_string(task))) << "_" << to_string(kind) << "_" << to_string(bc)
      << "_n" << n;
  return out.str();
}

Field field_from_json(const json& j, const std::string& where) {
  if (j.is_string()) {
    const std::string s = lower(j.get<std::string>());
    if (s == "zero" || s == "0") return Zero{};
    if (s == "step") return step_velocity().v0;
    throw ParseError(where + ": unknown field shorthand \"" + j.get<std::string>() + "\"");
  }
  if (j.is_number() && j.get<double>() == 0.0) return Zero{};
  if (!j.is_object()) throw ParseError(where + ": expected an object or \"zero\"");
  const std::string type = j.contains("type") ? lower(get_string(j, "type", where)) : "";
  const double amp = j.contains("amp") ? get_number(j, "amp", where) : 1.0;
  if (type == "zero") return Zero{};
  if (type == "sine" || type == "sin") return SineMode{get_int(j, "j", where), amp};
  if (type == "cosine" || type == "cos") return CosineMode{get_int(j, "j", where), amp};
  if (type == "piecewise") {
    PiecewiseConstant p;
    if (!j.contains("breakpoints") || !j.contains("values"))
      throw ParseError(where + ": piecewise field needs \"breakpoints\" and \"values\"");
    for (const auto& b : j.at("breakpoints")) {
      if (!b.is_number()) throw ParseError(where + ": breakpoints must be numbers");
      p.breakpoints.push_back(b.get<double>());
    }
    for (const auto& v : j.at("values")) {
      if (!v.is_number()) throw ParseError(where + ": values must be numbers");
      p.values.push_back(v.get<double>());
    }
    return p;
  }
  throw ParseError(where + ": field type must be zero, sine, cosine or piecewise");
}

ordered_json to_json(const Field& f) {
  ordered_json j;
  if (std::holds_alternative<Zero>(f)) {
    j["type"] = "zero";
  } else if (const auto* s = std::get_if<SineMode>(&f)) {
    j["type"] = "sine";
    j["j"] = s->j;
    j["amp"] = s->amp;
  } else if (const auto* c = std::get_if<CosineMode>(&f)) {
    j["type"] = "cosine";
    j["j"] = c->j;
    j["amp"] = c->amp;
  } else {
    const auto& p = std::get<PiecewiseConstant>(f);
    j["type"] = "piecewise";
    j["breakpoints"] = p.breakpoints;
    j["values"] = p.values;
  }
  return j;
}

Scenario parse_scenario_json(const json& j, const std::string& origin) {
  if (!j.is_object()) throw ParseError(origin + ": a scenario must be a JSON object");
  static const std::set<std::string> known = {
      "name",   "model", "bc",     "n",     "gamma",  "task",  "provenance", "T",
      "dt",     "scheme", "n_grid", "window", "initial", "js",   "alpha",      "s_min",
      "s_max",  "points_per_decade", "ns", "k_min", "k_max", "tol", "seeds", "criteria", "seed",
      "output_dir", "outputs"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) field_error(origin, key, "unknown field");

  Scenario s;
  if (j.contains("task")) s.task = parse_enum(j, "task", origin, parse_task);
  if (j.contains("name")) s.name = get_string(j, "name", origin);
  if (j.contains("model")) s.kind = parse_enum(j, "model", origin, parse_coupling_kind);
  if (j.contains("bc")) s.bc = parse_enum(j, "bc", origin, parse_boundary_case);
  if (j.contains("provenance"))
    s.provenance = parse_enum(j, "provenance", origin, parse_provenance);
  if (j.contains("scheme")) s.scheme = parse_enum(j, "scheme", origin, parse_scheme);

  // Task-dependent defaults: the dynamics experiments use n = 100; the Table 2
  // reproduction uses gamma = 0.1 and n in {8, 16, 24, 32}.
  s.n = is_dynamics(s.task) ? 100 : 32;
  if (s.task == Task::AbscissaTable) {
    s.gamma = 0.1;
    s.ns = {8, 16, 24, 32};
  }
  s.alpha = s.kind == CouplingKind::Weak ? 2.0 : 0.0;

  if (j.contains("n")) s.n = get_int(j, "n", origin);
  if (j.contains("gamma")) s.gamma = get_number(j, "gamma", origin);
  if (j.contains("T")) s.T = get_number(j, "T", origin);
  if (j.contains("dt")) s.dt = get_number(j, "dt", origin);
  if (j.contains("n_grid")) s.n_grid = get_int(j, "n_grid", origin);
  if (j.contains("window")) {
    const json& w = j.at("window");
    if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
      field_error(origin, "window", "expected [start, end]");
    s.window = std::make_pair(w[0].get<double>(), w[1].get<double>());
  }
  if (j.contains("initial")) {
    const json& init = j.at("initial");
    if (!init.is_object()) field_error(origin, "initial", "expected an object {u0, v0, theta0}");
    s.initial = InitialData{};
    for (const auto& [key, val] : init.items()) {
      const std::string where = origin + ": initial." + key;
      if (key == "u0")
        s.initial.u0 = field_from_json(val, where);
      else if (key == "v0")
        s.initial.v0 = field_from_json(val, where);
      else if (key == "theta0")
        s.initial.theta0 = field_from_json(val, where);
      else
        field_error(origin, "initial." + key, "unknown field");
    }
  }
  if (j.contains("js")) s.js = get_int_list(j, "js", origin);
  if (j.contains("alpha")) s.alpha = get_number(j, "alpha", origin);
  if (j.contains("s_min")) s.s_min = get_number(j, "s_min", origin);
  if (j.contains("s_max")) s.s_max = get_number(j, "s_max", origin);
  if (j.contains("points_per_decade"))
    s.points_per_decade = get_int(j, "points_per_decade", origin);
  if (j.contains("ns")) s.ns = get_int_list(j, "ns", origin);
  if (j.contains("k_min")) s.k_min = get_int(j, "k_min", origin);
  if (j.contains("k_max")) s.k_max = get_int(j, "k_max", origin);
  if (j.contains("tol")) s.tol = get_number(j, "tol", origin);
  if (j.contains("seeds")) {
    const json& v = j.at("seeds");
    if (!v.is_array()) field_error(origin, "seeds", "expected a list of [re, im] pairs");
    for (const auto& p : v) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        field_error(origin, "seeds", "expected a list of [re, im] pairs");
      s.seeds.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
  }
  if (j.contains("criteria")) s.criteria = get_int_list(j, "criteria", origin);
  if (j.contains("seed")) {
    const json& v = j.at("seed");
    if (!v.is_number_unsigned()) field_error(origin, "seed", "expected a non-negative integer");
    s.seed = v.get<std::uint64_t>();
  }
  if (j.contains("output_dir")) s.output_dir = get_string(j, "output_dir", origin);
  if (j.contains("outputs")) s.output_dir = get_string(j, "outputs", origin);

  validate(s);
  return s;
}

void validate(const Scenario& s) {
  std::vector<std::string> bad;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) bad.push_back(msg);
  };
  need(s.n >= 1 && s.n <= 512, "n must lie in [1, 512] (got " + std::to_string(s.n) + ")");
  need(std::isfinite(s.gamma) && s.gamma > 0 && s.gamma <= 10, "gamma must lie in (0, 10]");
  need(std::isfinite(s.dt) && s.dt > 0 && s.dt <= 1, "dt must lie in (0, 1]");
  need(std::isfinite(s.T) && s.T > 0 && s.T <= 1e4, "T must lie in (0, 1e4]");
  need(!(s.dt > s.T), "dt must not exceed T");
  need(s.n_grid == 0 || s.n_grid >= 2, "n_grid must be 0 (same as n) or >= 2");
  if (s.window) {
    const auto [a, b] = *s.window;
    need(a >= 0 && a < b && b <= s.T, "window must satisfy 0 <= start < end <= T");
  }
  need(!s.js.empty(), "js must be nonempty");
  for (int j : s.js) need(j >= 1, "js entries must be >= 1");
  need(std::isfinite(s.alpha) && s.alpha >= 0, "alpha must be >= 0");
  need(s.s_min > 0 && s.s_max > s.s_min, "need 0 < s_min < s_max");
  need(!(s.alpha > 0 && s.s_min < 1), "alpha > 0 requires s_min >= 1");
  need(s.points_per_decade >= 2, "points_per_decade must be >= 2");
  for (int n : s.ns) need(n >= 1 && n <= 512, "ns entries must lie in [1, 512]");
  need(s.task != Task::AbscissaTable || !s.ns.empty(), "ns must be nonempty for AbscissaTable");
  for (auto z : s.seeds)
    need(std::isfinite(z.real()) && std::isfinite(z.imag()), "seeds must be finite");
  need(s.k_min >= 5 && s.k_max <= 60 && s.k_min <= s.k_max, "k_min..k_max must lie within [5, 60]");
  need(s.tol > 0, "tol must be > 0");
  for (int c : s.criteria)
    need(c >= 1 && c <= acceptance::kCriterionCount, "criteria entries must lie in [1, 13]");
  for (const Field* f : {&s.initial.u0, &s.initial.v0, &s.initial.theta0}) {
    if (const auto* p = std::get_if<PiecewiseConstant>(f)) {
      bool ok = p->values.size() == p->breakpoints.size() + 1;
      double prev = 0;
      for (double b : p->breakpoints) {
        ok = ok && b > prev && b < std::numbers::pi;
        prev = b;
      }
      need(ok, "piecewise initial data needs strictly increasing breakpoints in (0, pi) and one "
               "more value than breakpoints");
    }
  }
  if (bad.empty()) return;
  std::ostringstream msg;
  msg << "scenario" << (s.name.empty() ? "" : " \"" + s.name + "\"") << " has " << bad.size()
      << " invalid field" << (bad.size() > 1 ? "s" : "") << ":";
  for (const auto& b : bad) msg << "\n  - " << b;
  throw ValidationError(msg.str());
}

namespace {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream msg;
    msg << path.string() << ":" << line_of(text, e.byte) << ": invalid JSON (" << e.what() << ")";
    throw ParseError(msg.str());
  }
}

}  // namespace

Scenario parse_scenario(const std::filesystem::path& path) {
  return parse_scenario_json(read_json_file(path), path.string());
}

std::vector<Scenario> parse_scenario_batch(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  const json* list = &j;
  if (j.is_object() && j.contains("scenarios")) list = &j.at("scenarios");
  std::vector<Scenario> out;
  if (list->is_array()) {
    for (std::size_t k = 0; k < list->size(); ++k)
      out.push_back(parse_scenario_json((*list)[k], path.string() + "[" + std::to_string(k) + "]"));
  } else {
    out.push_back(parse_scenario_json(*list, path.string()));
  }
  return out;
}

ordered_json to_json(const Scenario& s) {
  ordered_json j;
  j["name"] = s.name;
  j["task"] = std::string(to_string(s.task));
  j["model"] = std::string(to_string(s.kind));
  j["bc"] = std::string(to_string(s.bc));
  j["n"] = s.n;
  j["gamma"] = s.gamma;
  j["provenance"] = std::string(to_string(s.provenance));
  switch (s.task) {
    case Task::Spectrum:
      break;
    case Task::Resolvent:
      j["alpha"] = s.alpha;
      j["s_min"] = s.s_min;
      j["s_max"] = s.s_max;
      j["points_per_decade"] = s.points_per_decade;
      j["ns"] = s.ns;
      break;
    case Task::AbscissaTable:
      j["ns"] = s.ns;
      break;
    case Task::ContinuousRoots:
      j["k_min"] = s.k_min;
      j["k_max"] = s.k_max;
      j["tol"] = s.tol;
      if (!s.seeds.empty()) {
        j["seeds"] = ordered_json::array();
        for (auto z : s.seeds) j["seeds"].push_back({z.real(), z.imag()});
      }
      break;
    case Task::Simulate:
    case Task::SmoothnessSweep:
    case Task::DiscontinuitySweep: {
      j["T"] = s.T;
      j["dt"] = s.dt;
      j["scheme"] = std::string(to_string(s.scheme));
      j["n_grid"] = s.n_grid > 0 ? s.n_grid : s.n;
      const auto w = s.fit_window();
      j["window"] = {w.first, w.second};
      if (s.task == Task::Simulate) {
        j["initial"] = {{"u0", to_json(s.initial.u0)},
                        {"v0", to_json(s.initial.v0)},
                        {"theta0", to_json(s.initial.theta0)}};
      }
      if (s.task == Task::SmoothnessSweep) j["js"] = s.js;
      break;
    }
    case Task::Verify:
      j["criteria"] = s.criteria;
      break;
  }
  j["seed"] = s.seed;
  j["output_dir"] = s.output_dir;
  return j;
}

}  // namespace thermo
