#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace homsum {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  std::vector<std::string> info;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 42;
  unsigned workers = 1;
  std::vector<int> only;  // empty runs every criterion
};

/// Runs the acceptance criteria, printing one PASS/FAIL line per criterion
/// (plus indented info lines) as each completes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& out);

}  // namespace homsum
