#pragma once

#include <string>
#include <vector>

namespace thermo::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

inline constexpr int kCriterionCount = 13;

// Runs one criterion. The time budget is part of the verdict.
CriterionResult run_criterion(int id);
std::vector<CriterionResult> run_all(const std::vector<int>& ids = {});

// "[PASS] C05 uniform exponential criterion: ... (12.3 s / 300 s)"
std::string format_line(const CriterionResult& r);

}  // namespace thermo::acceptance
