#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "thermo/errors.hpp"
#include "thermo/report.hpp"
#include "thermo/scenario.hpp"

using namespace thermo;
namespace fs = std::filesystem;

namespace {

class Sandbox : public ::testing::Test {
 protected:
  void SetUp() override {
    unsetenv("THERMO_OUT_DIR");
    dir_ = fs::temp_directory_path() /
           ("thermo_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override {
    unsetenv("THERMO_OUT_DIR");
    fs::remove_all(dir_);
  }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

  Scenario scenario(nlohmann::json j) const {
    j["output_dir"] = (dir_ / "out").string();
    return parse_scenario_json(j);
  }

  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string payload_of(const fs::path& p) {
  const std::string text = slurp(p);
  return text.substr(text.find('\n') + 1);
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(THERMOLAB_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_F(Sandbox, MinimalScenarioGetsDefaults) {
  const auto p = write("s.json",
                       R"({"model": "weak", "bc": "DD", "n": 100, "gamma": 0.05, "task": "Simulate"})");
  const Scenario s = parse_scenario(p);
  EXPECT_EQ(s.task, Task::Simulate);
  EXPECT_EQ(s.dt, 0.1);
  EXPECT_EQ(s.T, 100.0);
  EXPECT_EQ(s.seed, 42u);
  EXPECT_EQ(s.fit_window(), std::make_pair(50.0, 100.0));
}

TEST_F(Sandbox, NegativeGammaNamesTheField) {
  const auto p = write("s.json", R"({"model": "weak", "bc": "DD", "gamma": -1, "dt": 5})");
  try {
    parse_scenario(p);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("gamma"), std::string::npos);
    EXPECT_NE(msg.find("dt"), std::string::npos);
  }
}

TEST_F(Sandbox, SyntaxErrorCarriesLine) {
  const auto p = write("s.json", "{\n  \"model\": \"weak\",\n  \"n\": 4,,\n}\n");
  try {
    parse_scenario(p);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("s.json:3"), std::string::npos) << e.what();
  }
}

TEST_F(Sandbox, TypeErrorsNameTheField) {
  EXPECT_THROW(parse_scenario_json(nlohmann::json{{"n", "four"}}), ParseError);
  try {
    parse_scenario_json(nlohmann::json{{"gama", 0.1}});
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("gama"), std::string::npos);
  }
  EXPECT_THROW(parse_scenario(dir_ / "missing.json"), IOError);
}

TEST_F(Sandbox, ScenarioRoundTripsThroughJson) {
  const Scenario s = scenario({{"task", "Simulate"},
                               {"model", "strong"},
                               {"bc", "DN"},
                               {"initial", {{"v0", "step"}, {"theta0", {{"type", "cosine"}, {"j", 2}}}}}});
  const auto j = to_json(s);
  const Scenario t = parse_scenario_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(to_json(t).dump(), j.dump());
  EXPECT_TRUE(std::holds_alternative<PiecewiseConstant>(t.initial.v0));
}

TEST_F(Sandbox, BatchFileForms) {
  const auto a = write("a.json", R"([{"task": "Spectrum", "n": 2}, {"task": "Spectrum", "n": 3}])");
  EXPECT_EQ(parse_scenario_batch(a).size(), 2u);
  const auto b = write("b.json", R"({"scenarios": [{"task": "Spectrum"}]})");
  EXPECT_EQ(parse_scenario_batch(b).size(), 1u);
  const auto c = write("c.json", R"({"task": "Spectrum"})");
  EXPECT_EQ(parse_scenario_batch(c).size(), 1u);
}

TEST_F(Sandbox, SpectrumWritesThreeNRows) {
  const RunReport r = run(scenario({{"task", "Spectrum"}, {"model", "weak"}, {"bc", "DD"}, {"n", 32}}));
  ASSERT_EQ(r.status, RunStatus::Ok) << r.error;
  ASSERT_GE(r.files.size(), 1u);
  EXPECT_EQ(r.files[0].rows, 96u);
  const std::string text = slurp(r.files[0].path);
  EXPECT_EQ(text.rfind("# generated ", 0), 0u);
  EXPECT_NE(text.find("\nn,re,im,branch\n"), std::string::npos);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(r.results["seed"], 42);
  EXPECT_LE(r.results["dissipativity_symmetric_max"].get<double>(), 1e-12);
}

TEST_F(Sandbox, AbscissaTableIsTableShaped) {
  const RunReport r = run(scenario({{"task", "AbscissaTable"}, {"model", "strong"}, {"ns", {8, 16, 24, 32}}}));
  ASSERT_EQ(r.status, RunStatus::Ok) << r.error;
  std::istringstream lines(payload_of(r.files[0].path));
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "n,min_distance");
  const double paper[] = {8.9227e-4, 8.9383e-4, 8.9402e-4, 8.9407e-4};
  for (double v : paper) {
    ASSERT_TRUE(std::getline(lines, line));
    EXPECT_NEAR(std::stod(line.substr(line.find(',') + 1)), v, 5e-9);
  }
}

TEST_F(Sandbox, SimulateWritesOneThousandOneRows) {
  const RunReport r = run(scenario({{"task", "Simulate"}, {"model", "weak"}, {"bc", "DD"}}));
  ASSERT_EQ(r.status, RunStatus::Ok) << r.error;
  EXPECT_EQ(r.files[0].rows, 1001u);
  EXPECT_EQ(payload_of(r.files[0].path).substr(0, 15), "t,E_modal,E_gri");
}

TEST_F(Sandbox, ChecksumsCoverPayloadOnly) {
  const Scenario s = scenario({{"task", "Spectrum"}, {"n", 6}});
  const RunReport a = run(s);
  const std::string first = payload_of(a.files[0].path);
  const RunReport b = run(s);
  ASSERT_EQ(a.files.size(), b.files.size());
  for (std::size_t k = 0; k < a.files.size(); ++k) EXPECT_EQ(a.files[k].sha256, b.files[k].sha256);
  EXPECT_EQ(payload_of(b.files[0].path), first);
  EXPECT_EQ(a.files[0].sha256, sha256_hex(first));
}

TEST_F(Sandbox, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(Sandbox, CsvNumbersRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) EXPECT_EQ(std::stod(CsvWriter::num(v)), v);
  EXPECT_EQ(CsvWriter::num(0.5), "0.5");
  CsvWriter w({"a", "b"});
  w.row({"1", "2"});
  EXPECT_EQ(w.payload(), "a,b\n1,2\n");
  EXPECT_EQ(w.rows(), 1u);
}

TEST_F(Sandbox, EmptyWarningsRenderAsEmptyList) {
  const RunReport r = run(scenario({{"task", "AbscissaTable"}, {"model", "strong"}, {"ns", {4}}}));
  ASSERT_TRUE(r.warnings.empty());
  EXPECT_NE(render_report(r, ReportFormat::Text).find("warnings: []"), std::string::npos);
  const auto j = nlohmann::json::parse(render_report(r, ReportFormat::JSON));
  EXPECT_TRUE(j["warnings"].is_array() && j["warnings"].empty());
  EXPECT_EQ(j["metadata"]["seed"], 42);
  EXPECT_TRUE(j["metadata"].contains("versions"));
}

TEST_F(Sandbox, DiscrepancyWarningNamesBlockAndCase) {
  const RunReport r = run(scenario({{"task", "Spectrum"}, {"model", "strong"}, {"bc", "ND"}, {"n", 8}}));
  ASSERT_EQ(r.status, RunStatus::Ok) << r.error;
  bool found = false;
  for (const auto& w : r.warnings)
    if (w.operation == "compare_printed_assembled" && w.parameters["block"] == "G" &&
        w.parameters["bc"] == "ND")
      found = true;
  EXPECT_TRUE(found);
  const std::string text = render_report(r, ReportFormat::Text);
  EXPECT_NE(text.find("block G"), std::string::npos);
}

TEST_F(Sandbox, ModuleErrorsLandInReport) {
  const RunReport r = run(scenario({{"task", "Simulate"}, {"n", 8}, {"T", 1}, {"initial", {{"v0", {{"type", "cosine"}, {"j", 1}}}}}}));
  EXPECT_EQ(r.status, RunStatus::NumericalFailure);
  EXPECT_EQ(exit_code(r.status), 2);
  EXPECT_EQ(r.error.rfind("IncompatibleData", 0), 0u);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_EQ(r.warnings.back().operation, "Simulate");
}

TEST_F(Sandbox, ValidationFailureInRun) {
  Scenario s = scenario({{"task", "Spectrum"}});
  s.n = 0;
  const RunReport r = run(s);
  EXPECT_EQ(r.status, RunStatus::ValidationFailed);
  EXPECT_EQ(exit_code(r.status), 1);
}

TEST_F(Sandbox, VerifyTaskStatus) {
  const RunReport ok = run(scenario({{"task", "Verify"}, {"criteria", {2, 3}}}));
  EXPECT_EQ(ok.status, RunStatus::Ok);
  EXPECT_EQ(ok.results["criteria"].size(), 2u);
  const RunReport bad = run(scenario({{"task", "Verify"}, {"criteria", {1}}}));
  EXPECT_EQ(bad.status, RunStatus::AcceptanceFailed);
  EXPECT_EQ(exit_code(bad.status), 3);
}

TEST_F(Sandbox, BatchHasDeterministicFileGroups) {
  std::vector<Scenario> batch{scenario({{"task", "Spectrum"}, {"n", 3}}),
                              scenario({{"task", "Spectrum"}, {"n", 3}}),
                              scenario({{"task", "ContinuousRoots"}, {"bc", "NN"}, {"k_max", 8}})};
  const auto serial = run_batch(batch, 1);
  const auto parallel = run_batch(batch, 3);
  ASSERT_EQ(serial.size(), 3u);
  std::set<std::string> paths;
  for (std::size_t k = 0; k < 3; ++k) {
    ASSERT_EQ(serial[k].files.size(), parallel[k].files.size());
    for (std::size_t f = 0; f < serial[k].files.size(); ++f) {
      EXPECT_EQ(serial[k].files[f].path, parallel[k].files[f].path);
      EXPECT_EQ(serial[k].files[f].sha256, parallel[k].files[f].sha256);
      paths.insert(serial[k].files[f].path);
    }
  }
  EXPECT_EQ(paths.size(), 3u + 3u + 1u);
}

TEST_F(Sandbox, EnvironmentOverridesOutputDirectory) {
  const fs::path alt = dir_ / "env";
  setenv("THERMO_OUT_DIR", alt.c_str(), 1);
  const RunReport r = run(scenario({{"task", "Spectrum"}, {"n", 2}}));
  ASSERT_EQ(r.status, RunStatus::Ok);
  EXPECT_EQ(fs::path(r.files[0].path).parent_path(), alt);
}

TEST_F(Sandbox, EmitReportWritesFile) {
  const RunReport r = run(scenario({{"task", "Spectrum"}, {"n", 2}}));
  const fs::path p = dir_ / "rep" / "r.json";
  emit_report(r, ReportFormat::JSON, p);
  const auto j = nlohmann::json::parse(slurp(p));
  EXPECT_EQ(j["status"], "ok");
  write("blocker", "x");
  EXPECT_THROW(emit_report(r, ReportFormat::Text, dir_ / "blocker" / "r.txt"), IOError);
}

TEST_F(Sandbox, CliExitCodes) {
  const std::string out = " --out " + (dir_ / "cli").string();
  EXPECT_EQ(run_cli("spectrum --model weak --bc DD --n 4" + out), 0);
  EXPECT_EQ(run_cli("spectrum --gamma -1" + out), 1);
  EXPECT_EQ(run_cli("simulate --n 8 --T 1 --v0 cos:1" + out), 2);
  EXPECT_EQ(run_cli("verify --criterion 1" + out), 3);
  EXPECT_EQ(run_cli("verify --criterion 2" + out), 0);
  EXPECT_EQ(run_cli("nosuchcommand"), 1);
  EXPECT_TRUE(fs::exists(dir_ / "cli" / "spectrum_weak_DD_n4_eigenvalues.csv"));
}

TEST_F(Sandbox, CliRunsScenarioBatch) {
  const auto p = write("batch.json", R"([{"name": "one", "task": "Spectrum", "n": 2},
                                         {"name": "two", "task": "ContinuousRoots", "k_max": 6},
                                         {"name": "three", "task": "AbscissaTable", "ns": [4, 8]}])");
  EXPECT_EQ(run_cli("run " + p.string() + " --jobs 2 --out " + (dir_ / "b").string()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "b" / "one_eigenvalues.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "b" / "two_roots.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "b" / "three_abscissa.csv"));
}
