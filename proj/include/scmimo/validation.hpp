#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace scmimo {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured errors and the tolerance they were held to
};

struct ValidationOptions {
  std::uint64_t seed = 1;
  unsigned workers = 0;
};

// Individual acceptance checks. Sample sizes and tolerances are fixed
// inside each check.
CriterionResult check_moments(const ValidationOptions& opt);            // 1
CriterionResult check_logdet(const ValidationOptions& opt);             // 2
CriterionResult check_determinants(const ValidationOptions& opt);       // 3
CriterionResult check_pdf(const ValidationOptions& opt);                // 4
CriterionResult check_identities(const ValidationOptions& opt);         // 5
// 6 and 7 share one Monte-Carlo grid.
std::vector<CriterionResult> check_bounds_and_mmse(const ValidationOptions& opt);
CriterionResult check_mrc_behavior(const ValidationOptions& opt);       // 8
CriterionResult check_growth(const ValidationOptions& opt);             // 9
CriterionResult check_determinism(const ValidationOptions& opt);        // 10
CriterionResult check_special_functions(const ValidationOptions& opt);  // 11

// Suites exposed by `scmimo validate`:
//   moments    -> 1, 2, 3
//   pdf        -> 4
//   identities -> 5, 10, 11
//   bounds     -> 6, 7, 8, 9
// Throws InvalidArgument for an unknown suite name.
std::vector<CriterionResult> run_suite(const std::string& suite, const ValidationOptions& opt);

std::vector<std::string> suite_names();

}  // namespace scmimo
