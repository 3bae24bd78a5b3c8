#pragma once

// Pricing for multi-minded markets: a ladder of augmented equilibria whose
// dummy prices double from threshold / (2 max bundle size), plus the rule that
// picks the first rung with enough profit.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "bicrit/market.hpp"
#include "bicrit/welfare_solver.hpp"

namespace bicrit {

/// Personalized-payment benchmark: the optimum with every type's demand cut
/// back to lambda^{-1}(threshold) and its bundle mix scaled accordingly.
struct BenchmarkSolution {
  Vector demand;
  Vector split;
  Vector allocation;
  double sw = 0.0;
  /// sum_i lambda_i(x_i) x_i - C(y).
  double profit = 0.0;
  double threshold = 0.0;
  /// demand <= optimum demand and allocation <= optimum allocation.
  bool dominated = true;
};

BenchmarkSolution benchmark(const MarketInstance& inst, const PricingSolution& opt, double alpha);

struct ThresholdBoundCheck {
  /// Every type faces lambda(x) >= threshold and no good is priced below
  /// its marginal cost.
  bool applicable = false;
  double welfare = 0.0;
  double bound = 0.0;  // (2 (1/(1-a))^(1/a) - 1) * (income - cost)
  bool holds = true;
};

/// SW <= (2 (1/(1-a))^(1/a) - 1) (income - cost) for outcomes where every
/// type pays at least the threshold price.  `prices` may be empty for
/// personalized payments, in which case only the demand premise is checked.
ThresholdBoundCheck check_threshold_bound(const MarketInstance& inst, const Vector& demand,
                                          const Vector& allocation, const Vector& prices,
                                          double alpha);

struct LadderSolution {
  /// -1 for the welfare optimum, else the rung number.
  int index = -1;
  double dummy_price = 0.0;
  double population = 0.0;
  PricingSolution solution;
  Vector dummy;  // per-good dummy consumption
  std::vector<std::size_t> saturated;
  std::size_t retries = 0;
};

/// Augmented equilibrium at dummy price p_d with dummies stripped: prices
/// are marginal costs at real plus dummy consumption.  The dummy population
/// starts at twice the total demand at price lambda_max * 1e-6 and doubles
/// (up to 5 times) while any dummy is capped.
LadderSolution augmented_we(const MarketInstance& inst, double dummy_price,
                            const SolverConfig& cfg = {}, int index = 0);

struct Ladder {
  double threshold = 0.0;
  /// Smallest d with 2^d * min bundle size >= max bundle size.
  std::size_t delta = 0;
  LadderSolution optimum;
  std::vector<LadderSolution> rungs;  // indices 0 .. delta + 1
};

/// Smallest d with 2^d * min bundle size >= max bundle size.
std::size_t ladder_depth(const MarketInstance& inst);

/// Dummy price of rung j: 2^j * threshold / (2 max bundle size).
double rung_price(const MarketInstance& inst, double alpha, int j);

/// All rungs, solved concurrently.  Empty for alpha >= 1, where the
/// threshold price vanishes.
Ladder ladder(const MarketInstance& inst, const PricingSolution& opt, double alpha,
              const SolverConfig& cfg = {});

class SelectionError : public std::runtime_error {
 public:
  SelectionError(const std::string& what, std::vector<double> profits)
      : std::runtime_error(what), profits_(std::move(profits)) {}
  /// pi(-1), pi(0), ..., in ladder order.
  const std::vector<double>& profits() const { return profits_; }

 private:
  std::vector<double> profits_;
};

/// 2 (log2 Delta + 2) (8 + 2 (1/(1-a))^(1/a) + 4/(1-a)).
double selection_threshold(const MarketInstance& inst, double alpha);

/// First of (optimum, rung 0, rung 1, ...) with SW*/pi <= selection threshold.
const LadderSolution& select_index(const MarketInstance& inst, const Ladder& lad, double sw_star,
                                   double alpha);

struct MultiMindedResult {
  PricingSolution optimum;
  BenchmarkSolution bench;
  Ladder lad;
  LadderSolution selected;
  double threshold = 0.0;
};

MultiMindedResult price_multi_minded(const MarketInstance& inst, double alpha,
                                     const SolverConfig& cfg = {});

struct LadderAudit {
  std::vector<std::string> violations;
  double claim_start_lhs = 0.0;  // SW* - SW(0)
  double claim_start_rhs = 0.0;
  double claim_sum_rhs = 0.0;    // constant * (sum_j pi(j) + pi(-1))
  double last_rung_rhs = 0.0;

  bool ok() const { return violations.empty(); }
};

/// Check every structural fact the ladder's guarantee rests on.  Bounds are
/// asserted with slack 1e-6 + 1e-6 SW*.
LadderAudit audit_ladder(const MarketInstance& inst, const MultiMindedResult& res, double alpha);

}  // namespace bicrit
