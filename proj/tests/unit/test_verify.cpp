#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>

#include "sblfem/verify.hpp"

using namespace sblfem;

TEST_CASE("fast structural suites pass") {
  for (const char* name : {"QUADRATURE", "BASIS", "CHI_BOUNDS", "INVERSE_INEQ"}) {
    const auto r = verify::run_suite(name);
    CAPTURE(name);
    CHECK(r.passed());
    CHECK_FALSE(r.checks.empty());
  }
}

TEST_CASE("criteria are numbered 1..11 and resolvable") {
  std::set<int> ids;
  const auto names = verify::suite_names();
  for (const auto& c : verify::criteria()) {
    ids.insert(c.id);
    CHECK(std::find(names.begin(), names.end(), c.suite) != names.end());
  }
  CHECK(ids.size() == 11);
  CHECK(*ids.begin() == 1);
  CHECK(*ids.rbegin() == 11);
}

TEST_CASE("JSON summary and unknown suites") {
  const auto j = verify::to_json(verify::run_suite("CORRECTORS"));
  CHECK(j["suite"] == "CORRECTORS");
  CHECK(j["passed"] == true);
  CHECK(j["checks"].size() >= 7);
  CHECK_THROWS_AS(verify::run_suite("NOPE"), std::invalid_argument);
  CHECK_FALSE(verify::SuiteResult{}.passed());
}
