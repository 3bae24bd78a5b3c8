#pragma once

// Welfare-maximizing convex program
//
//   max  sum_i u_i(x_i) - sum_t C_t(y_t)
//   s.t. x_i = sum_S x_i(S),  y_t = sum_{i, S ∋ t} x_i(S),  x_i(S) >= 0,
//
// solved over the split variables x_i(S) by a projected Newton method with
// Levenberg damping and an Armijo search along the projection arc.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bicrit/market.hpp"

namespace bicrit {

struct SolverConfig {
  std::size_t max_iters = 50000;
  /// Relative stationarity tolerance; the solver stops once the projected
  /// gradient falls below tol * 1e-3 * lambda_max.
  double tol = 1e-8;
};

struct SolveReport {
  std::size_t iterations = 0;
  double residual = 0.0;  // infinity norm of the projected gradient
  bool stalled = false;   // accepted at the first-order floor after line-search failure
  std::vector<double> objective_trace;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, Vector best_split, double residual)
      : std::runtime_error(what), best_split_(std::move(best_split)), residual_(residual) {}
  const Vector& best_split() const { return best_split_; }
  double residual() const { return residual_; }

 private:
  Vector best_split_;
  double residual_;
};

/// One flat-valuation buyer per good, valuing the good at `price` for up to
/// `population` units.
struct DummyBuyers {
  double price = 0.0;
  double population = 0.0;
};

struct AugmentedOptimum {
  Vector split;       // real buyers only
  Vector dummy;       // per-good dummy consumption
  Vector allocation;  // real consumption per good
  Vector prices;      // c_t(real + dummy consumption)
  double objective = 0.0;
  bool cap_binding = false;
};

/// Welfare optimum with prices p*_t = c_t(y*_t).
PricingSolution solve_welfare(const MarketInstance& inst, const SolverConfig& cfg = {},
                              SolveReport* report = nullptr);

/// Welfare optimum of the instance augmented with dummy buyers.
AugmentedOptimum solve_augmented_welfare(const MarketInstance& inst, const DummyBuyers& dummies,
                                         const SolverConfig& cfg = {},
                                         SolveReport* report = nullptr);

/// Minimum-cost allocation of a fixed demand vector over all bundles.
Allocation solve_constrained_welfare(const MarketInstance& inst, const Vector& demand);

/// Gradient of the (optionally augmented) welfare objective in split space.
Vector welfare_gradient(const MarketInstance& inst, const Vector& split,
                        const std::optional<DummyBuyers>& dummies = std::nullopt);

/// Infinity norm of the gradient projected onto the feasible cone at `split`.
double projected_gradient_norm(const MarketInstance& inst, const Vector& split,
                               const std::optional<DummyBuyers>& dummies = std::nullopt);

}  // namespace bicrit
