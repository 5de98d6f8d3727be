#pragma once

#include <string>
#include <vector>

namespace quadromech {

struct OracleResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast self-checks against closed forms and independent numerical routes.
/// Each check catches its own exceptions and reports them as failures.
std::vector<OracleResult> run_oracle_suite();

}  // namespace quadromech
