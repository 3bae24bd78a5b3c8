#pragma once

// Market data model: goods with production costs, buyer types with desired
// bundles and inverse demand, and the envy-free outcome of a price vector.

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "bicrit/costs.hpp"
#include "bicrit/demand.hpp"

namespace bicrit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Sorted, duplicate-free good indices.
using Bundle = std::vector<std::size_t>;

inline constexpr double kTieTolerance = 1e-9;

struct Good {
  std::string id;
  CostFunction cost;
};

struct BuyerType {
  std::string id;
  std::vector<Bundle> bundles;
  InverseDemand demand;
};

class InstanceError : public std::runtime_error {
 public:
  explicit InstanceError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// A validated, immutable market.
///
/// Split variables x_i(S) are laid out flat, type by type and bundle by
/// bundle; `split_offset(i) + k` addresses bundle k of type i.
class MarketInstance {
 public:
  /// Throws InstanceError listing every violated invariant.
  static MarketInstance create(std::vector<Good> goods, std::vector<BuyerType> types);
  static std::vector<std::string> validate(const std::vector<Good>& goods,
                                           const std::vector<BuyerType>& types);

  std::size_t num_goods() const { return goods_.size(); }
  std::size_t num_types() const { return types_.size(); }
  std::size_t num_splits() const { return split_type_.size(); }
  const std::vector<Good>& goods() const { return goods_; }
  const std::vector<BuyerType>& types() const { return types_; }
  const Good& good(std::size_t t) const { return goods_[t]; }
  const BuyerType& type(std::size_t i) const { return types_[i]; }

  std::size_t split_offset(std::size_t i) const { return split_offset_[i]; }
  std::size_t split_type(std::size_t s) const { return split_type_[s]; }
  const Bundle& split_bundle(std::size_t s) const;

  /// Types x splits: x = A * split.
  const Matrix& demand_incidence() const { return demand_incidence_; }
  /// Goods x splits: y = G * split.
  const Matrix& good_incidence() const { return good_incidence_; }

  double lambda_max() const { return types_.front().demand.lambda_max(); }
  std::size_t max_bundle_size() const { return max_bundle_; }
  std::size_t min_bundle_size() const { return min_bundle_; }
  /// Delta = max bundle size / min bundle size.
  double bundle_ratio() const {
    return static_cast<double>(max_bundle_) / static_cast<double>(min_bundle_);
  }
  bool is_unit_demand() const { return max_bundle_ == 1; }
  /// Largest declared regularity parameter over all buyer types.
  double alpha() const;

 private:
  MarketInstance() = default;
  std::vector<Good> goods_;
  std::vector<BuyerType> types_;
  std::vector<std::size_t> split_offset_;
  std::vector<std::size_t> split_type_;
  std::vector<std::size_t> split_local_;
  Matrix demand_incidence_;
  Matrix good_incidence_;
  std::size_t max_bundle_ = 1;
  std::size_t min_bundle_ = 1;
};

/// Outcome (p, x, x(S), y) with its welfare and profit.
struct PricingSolution {
  Vector prices;
  Vector demand;
  Vector split;
  Vector allocation;
  double sw = 0.0;
  double profit = 0.0;
};

struct BundleQuote {
  double price;
  std::size_t bundle;  // index into the type's bundle list
};

struct Allocation {
  Vector split;
  Vector allocation;
};

/// Cheapest bundle price q_i(p); ties within kTieTolerance go to the
/// lexicographically smallest bundle.
BundleQuote min_bundle_price(const MarketInstance& inst, const Vector& prices, std::size_t type);

/// Indices of all bundles of `type` priced within `tolerance` of q_i(p).
std::vector<std::size_t> cheapest_bundles(const MarketInstance& inst, const Vector& prices,
                                          std::size_t type, double tolerance = kTieTolerance);

/// x_i = lambda_i^{-1}(q_i(p)), zero when q_i(p) >= lambda_max and the
/// support ceiling when q_i(p) <= 0.
Vector best_response(const MarketInstance& inst, const Vector& prices);

/// Cost-minimal split of `demand` over each type's cheapest bundles.
Allocation min_cost_allocation(const MarketInstance& inst, const Vector& prices,
                               const Vector& demand);

/// Cost-minimal split of `demand` over an explicit candidate bundle set per
/// type (indices into each type's bundle list).
Allocation allocate_min_cost(const MarketInstance& inst, const Vector& demand,
                             const std::vector<std::vector<std::size_t>>& candidates);

/// best_response followed by min_cost_allocation.
PricingSolution evaluate(const MarketInstance& inst, const Vector& prices);

/// Fill demand, allocation, sw and profit from prices and a split.
PricingSolution assemble_solution(const MarketInstance& inst, Vector prices, Vector split);

double total_cost(const MarketInstance& inst, const Vector& allocation);
double social_welfare(const MarketInstance& inst, const Vector& demand, const Vector& allocation);
double profit(const MarketInstance& inst, const Vector& prices, const Vector& allocation);
/// sum_t c_t(y_t) over a bundle.
double bundle_marginal_cost(const MarketInstance& inst, const Bundle& bundle,
                            const Vector& allocation);
/// sum_i lambda_i(x_i) x_i.
double buyer_income(const MarketInstance& inst, const Vector& demand);

/// r_i: marginal-cost sum of the cheapest used bundle of each type (or of
/// any bundle when the type buys nothing).
Vector buyer_marginal_cost(const MarketInstance& inst, const Vector& split,
                           const Vector& allocation);

/// Zero out negligible split mass.
void drop_split_dust(Vector& split, double threshold = 1e-12);

}  // namespace bicrit
