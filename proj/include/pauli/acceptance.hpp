#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pauli {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the numbered acceptance criteria (all of 1..10 when `ids` is empty),
/// printing one PASS/FAIL line per criterion to `out` as each finishes.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, std::ostream& out);

std::string format_result(const CriterionResult& r);

}  // namespace pauli
