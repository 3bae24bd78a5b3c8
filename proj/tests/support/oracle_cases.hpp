#pragma once

// Markets small enough for grid search, shared by the fixture generator and
// the tests that consume its records.

#include <string>
#include <vector>

#include "bicrit/market.hpp"
#include "bicrit/oracle.hpp"

namespace bicrit::testing {

struct OracleCase {
  std::string name;
  MarketInstance inst;
  GridSpec grid;
};

/// Twenty seeded random markets within the oracle caps.
std::vector<OracleCase> oracle_cases();

/// Uniform price levels (fractions of lambda_max) where bundle prices tie.
std::vector<double> tie_levels();

std::string tie_quantity(double level);

/// lambda = 1 - x with cost 1e-4 y^2.
MarketInstance near_free_good();
GridSpec near_free_grid();

/// Every record the fixture generator writes.
std::vector<FixtureRecord> compute_oracle_records();

/// Record lookup by instance hash and quantity; throws if missing.
double fixture_value(const std::vector<FixtureRecord>& records, const std::string& hash,
                     const std::string& quantity);

}  // namespace bicrit::testing
