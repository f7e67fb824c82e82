#pragma once

// Self-verification suites: structural checks of every module plus the
// numbered convergence criteria. Used by `sblfem verify` and the acceptance
// test binary.

#include <string>
#include <vector>

#include <json.hpp>

namespace sblfem::verify {

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct SuiteResult {
  std::string name;
  std::vector<Check> checks;

  bool passed() const;
};

nlohmann::json to_json(const SuiteResult& suite);

/// QUADRATURE, BASIS, MESH, INTERP, GALERKIN, CONTINUITY, CHI_BOUNDS, INVERSE_INEQ.
std::vector<std::string> structural_suites();

struct Criterion {
  int id = 0;
  std::string suite;  ///< suite name accepted by run_suite
  std::string title;
};

/// The eleven numbered convergence / consistency criteria.
const std::vector<Criterion>& criteria();

/// Every name accepted by run_suite except ALL.
std::vector<std::string> suite_names();

/// Runs one suite. Throws std::invalid_argument on an unknown name.
SuiteResult run_suite(const std::string& name);

/// Expands ALL to every structural suite followed by every criterion.
std::vector<SuiteResult> run_suites(const std::string& name);

}  // namespace sblfem::verify
