#pragma once

// Thresholded pricing for unit-demand markets: every good is priced at the
// larger of its welfare-optimal price and a primary price
// lambda_max (1-a)^(1/a).

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bicrit/market.hpp"
#include "bicrit/welfare_solver.hpp"

namespace bicrit {

enum class Cluster { High, Low };

std::string_view to_string(Cluster c);

struct ThresholdedPrices {
  double primary_price = 0.0;
  Vector prices;  // max(primary_price, optimum price) per good
  std::vector<Cluster> good_cluster;
  std::vector<Cluster> type_cluster;
};

/// lambda_max (1-a)^(1/a); lambda_max/e at a = 0 and 0 at a = 1.
double threshold_price(double alpha, double lambda_max);

/// Raise every optimum price to at least `primary`.  Goods priced strictly
/// above it (beyond the tie tolerance) form the high cluster.  Types join the
/// cluster of the goods they buy, or of their cheapest good if they buy
/// nothing.
ThresholdedPrices threshold_prices(const MarketInstance& inst, const Vector& optimum_prices,
                                   double primary);

struct UnitDemandResult {
  ThresholdedPrices thresholded;
  PricingSolution solution;
  PricingSolution optimum;
};

/// Solve for the welfare optimum, threshold its prices and evaluate the
/// market at the thresholded prices.  Throws std::invalid_argument on
/// instances with a non-singleton bundle.
UnitDemandResult price_unit_demand(const MarketInstance& inst, double alpha,
                                   const SolverConfig& cfg = {});

struct ClusterReport {
  std::size_t high_goods = 0;
  std::size_t low_goods = 0;
  std::size_t high_types = 0;
  std::size_t low_types = 0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Structural checks of a thresholded solution against the optimum, each at
/// absolute tolerance `tol`:
///   high cluster: demand and consumption equal the optimum;
///   low cluster: demand and marginal cost do not exceed the optimum, and
///     (lambda(x) - r) / |lambda'(x)| <= x;
///   no type buys outside its cluster;
///   the allocation is cost-minimal for its demand.
ClusterReport cluster_diagnostics(const MarketInstance& inst, const ThresholdedPrices& tp,
                                  const PricingSolution& sol, const PricingSolution& opt,
                                  double tol = 1e-6);

}  // namespace bicrit
