#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gpa {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double elapsed_s = 0.0;
};

// Runs the full verification suite (formulation equivalences, degenerate
// cases, closed-form oracles, convergence diagnostics, conversion table, and
// the directional performance checks) with every tolerance pinned in code.
std::vector<CriterionResult> run_acceptance();

// Prints one PASS/FAIL line per criterion; returns true when all pass.
bool print_acceptance(std::ostream& out);

}  // namespace gpa
