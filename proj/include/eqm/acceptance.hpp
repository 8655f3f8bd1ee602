#pragma once

// End-to-end verification suites shared by the acceptance test binary and the
// `verify` command. Every tolerance lives here, next to the check using it.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace eqm::acceptance {

struct CheckResult {
  std::string id;
  std::string name;
  bool passed = false;
  /// Headline measurement and the bound it was compared against.
  double measured = 0.0;
  double threshold = 0.0;
  nlohmann::ordered_json metrics;
};

struct Options {
  std::uint64_t seed = 42;
  /// Worker threads for path simulation; 0 picks hardware concurrency.
  unsigned workers = 0;
};

CheckResult pathwise_linear_identity(const Options& opt);   // 1
CheckResult ornstein_uhlenbeck_moments(const Options& opt);  // 2
CheckResult pde_certification(const Options& opt);           // 3
CheckResult affine_closure(const Options& opt);              // 4
CheckResult isovector_dichotomy(const Options& opt);         // 5
CheckResult affine_monte_carlo(const Options& opt);          // 6
CheckResult bridge_variance(const Options& opt);             // 7

/// Criteria 1-7 in order.
std::vector<CheckResult> run_criteria(const Options& opt);

/// Re-runs criteria 1-7 with a different worker count and compares the
/// serialized results byte for byte against `first`.
CheckResult determinism(const Options& opt, const std::vector<CheckResult>& first);

/// Criteria 1-8.
std::vector<CheckResult> run_all(const Options& opt);

/// Module-level invariants (drift consistency, SIMD equivalence, positivity,
/// drift scaling, transform identities at zero parameters).
std::vector<CheckResult> run_invariants(const Options& opt);

/// Canonical serialized form used for byte comparisons.
std::string serialize(const CheckResult& r);

nlohmann::ordered_json to_json(const CheckResult& r);

}  // namespace eqm::acceptance
