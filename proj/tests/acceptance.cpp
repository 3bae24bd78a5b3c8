// Acceptance gate: one PASS/FAIL line per criterion.

#include <fmt/format.h>

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "support/suites.hpp"

using bicrit::testing::SuiteResult;

namespace {

struct Criterion {
  int number;
  std::string name;
  std::function<SuiteResult()> run;
};

SuiteResult combine(std::vector<SuiteResult> parts) {
  SuiteResult out;
  for (auto& p : parts) {
    out.cases += p.cases;
    for (auto& f : p.failures) out.failures.push_back(std::move(f));
  }
  return out;
}

}  // namespace

int main() {
  namespace t = bicrit::testing;
  const std::string fixtures = BICRIT_FIXTURE_FILE;
  const std::vector<Criterion> criteria = {
      {1, "formula fidelity", [] { return t::formula_fidelity(); }},
      {2, "analytic welfare optima", [] { return t::analytic_optima(1e-6); }},
      {3, "oracle equivalence", [&] { return t::oracle_equivalence(fixtures); }},
      {4, "unit-demand bicriteria guarantee",
       [] {
         std::vector<SuiteResult> parts;
         std::uint64_t seed = 4100;
         for (double a : {0.0, 0.25, 0.5, 0.75}) parts.push_back(t::unit_demand_guarantees(a, 50, seed++));
         return combine(std::move(parts));
       }},
      {5, "multi-minded ladder guarantee", [] { return t::multi_minded_guarantees(6, 5100); }},
      {6, "demand and cost property suites",
       [] { return combine({t::demand_lemmas(10, 6100), t::cost_market_lemmas(20, 6200)}); }},
      {7, "near-free good profit gap", [&] { return t::near_free_good_profit(fixtures); }},
      {8, "determinism and I/O",
       [] { return t::determinism_and_io(BICRIT_CLI, BICRIT_TEST_DATA, BICRIT_SCRATCH_DIR); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    SuiteResult r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fmt::print("{} criterion {}: {} ({} checks, {} failures, {:.2f} s)\n", r.ok() ? "PASS" : "FAIL",
               c.number, c.name, r.cases, r.failures.size(), secs);
    for (std::size_t k = 0; k < r.failures.size() && k < 20; ++k) {
      fmt::print("    {}\n", r.failures[k]);
    }
    if (!r.ok()) ++failed;
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
