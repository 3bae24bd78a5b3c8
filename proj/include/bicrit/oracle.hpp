#pragma once

// Brute-force references for tiny markets: exhaustive search over a price
// grid, with min-cost allocations found by enumerating bundle splits.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "bicrit/market.hpp"

namespace bicrit {

struct GridSpec {
  /// Price spacing; defaults to lambda_max / 100.
  std::optional<double> price_step;
  /// Split spacing as a fraction of each type's demand.
  double split_step = 0.01;
  std::size_t max_goods = 3;
  std::size_t max_types = 3;
  /// Upper bound on enumerated split combinations per price vector; the
  /// split spacing is coarsened until the enumeration fits.
  std::size_t max_combinations = 200000;
  /// 0 picks the hardware concurrency.
  std::size_t threads = 0;
};

class OracleCapError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct OracleResult {
  double value = 0.0;
  Vector prices;
  PricingSolution solution;
  std::size_t evaluated = 0;
};

/// Prices 0, step, 2 step, ... up to and including lambda_max.
std::vector<double> price_axis(const MarketInstance& inst, const GridSpec& grid);

/// Cheapest allocation of `demand` over each type's cheapest bundles at
/// `prices`, by enumerating splits on the grid's split spacing.
Allocation oracle_min_cost(const MarketInstance& inst, const Vector& prices, const Vector& demand,
                           const GridSpec& grid = {});

/// Envy-free outcome at `prices` with the enumerated min-cost allocation.
PricingSolution oracle_evaluate(const MarketInstance& inst, const Vector& prices,
                                const GridSpec& grid = {});

/// Grid argmax of social welfare.  Ties go to the lexicographically smallest
/// price vector.
OracleResult oracle_max_welfare(const MarketInstance& inst, const GridSpec& grid = {});

/// Grid argmax of profit, same tie rule.
OracleResult oracle_max_profit(const MarketInstance& inst, const GridSpec& grid = {});

struct FixtureRecord {
  std::string instance_hash;
  std::string quantity;
  double value = 0.0;
};

}  // namespace bicrit
