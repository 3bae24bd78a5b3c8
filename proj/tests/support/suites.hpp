#pragma once

// Property suites run both by the unit tests and by the acceptance gate.
// Each returns the number of checked cases and a message per failure.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace bicrit::testing {

struct SuiteResult {
  std::size_t cases = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
  void fail(std::string msg) { failures.push_back(std::move(msg)); }
};

/// Closed-form guarantee factors at their documented limits.
SuiteResult formula_fidelity();

/// Welfare optimum of the three hand-solved markets, against both the hand
/// values and an independent scalar root finder.
SuiteResult analytic_optima(double tol = 1e-6);

/// Solver optimum against grid search, and min-cost splits against
/// enumeration, on the recorded oracle markets.
SuiteResult oracle_equivalence(const std::string& fixture_path, double solver_tol = 1e-6);

/// Thresholded pricing bounds and cluster structure on random unit-demand markets.
SuiteResult unit_demand_guarantees(double alpha, std::size_t count, std::uint64_t seed);

/// Ladder audit on random multi-minded markets, `per_setting` per bundle
/// ratio in {1, 2, 4} and alpha in {0, 0.5}.
SuiteResult multi_minded_guarantees(std::size_t per_setting, std::uint64_t seed);

/// Regularity lemmas on `per_family` random parameterizations of every family.
SuiteResult demand_lemmas(std::size_t per_family, std::uint64_t seed);

/// Cost monotonicity, cost difference and income lemmas, `count` markets each.
SuiteResult cost_market_lemmas(std::size_t count, std::uint64_t seed);

/// Profit-maximizing versus welfare-maximizing price on a near-free good.
SuiteResult near_free_good_profit(const std::string& fixture_path);

/// Instance round trips and repeated command-line runs with identical bytes.
SuiteResult determinism_and_io(const std::string& cli, const std::string& data_dir,
                               const std::string& scratch_dir);

}  // namespace bicrit::testing
