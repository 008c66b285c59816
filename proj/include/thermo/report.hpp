#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermo/scenario.hpp"

namespace thermo {

struct Warning {
  std::string operation;
  nlohmann::ordered_json parameters;
  std::string message;
};

struct ProducedFile {
  std::string path;
  std::string sha256;  // over the payload, excluding the "# generated" line
  std::size_t rows = 0;
};

enum class RunStatus { Ok, ValidationFailed, NumericalFailure, AcceptanceFailed };
std::string_view to_string(RunStatus s);
int exit_code(RunStatus s);

struct RunReport {
  nlohmann::ordered_json scenario;
  std::vector<ProducedFile> files;
  double wall_seconds = 0.0;
  std::vector<Warning> warnings;
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  RunStatus status = RunStatus::Ok;
  std::string error;  // "<ErrorType>: message" when status != Ok
};

// Resolves the output directory: explicit override, then THERMO_OUT_DIR, then the scenario.
std::filesystem::path output_directory(const Scenario& s);

// Dispatches the task and writes its outputs. Module errors are caught and
// recorded in the report rather than propagated.
RunReport run(const Scenario& s);

// Runs up to `jobs` scenarios at a time; reports come back in input order.
std::vector<RunReport> run_batch(std::vector<Scenario> scenarios, int jobs);

enum class ReportFormat { JSON, Text };
std::string render_report(const RunReport& r, ReportFormat f);
std::string render_reports(const std::vector<RunReport>& rs, ReportFormat f);
void emit_report(const RunReport& r, ReportFormat f, const std::filesystem::path& path);

// CSV writer: "# generated <UTC time>" line, header row, rows with 17
// significant digits, LF endings. The first line is excluded from the checksum.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& row(const std::vector<std::string>& cells);
  static std::string num(double v);
  static std::string num(long long v);
  std::string payload() const;  // header + rows
  std::size_t rows() const { return rows_; }
  ProducedFile write(const std::filesystem::path& path) const;

 private:
  std::string body_;
  std::size_t rows_ = 0;
};

std::string sha256_hex(const std::string& data);

}  // namespace thermo
