#pragma once

// Guarantee formulas for the two pricing algorithms, the profit-welfare
// trade-off curve, and certificates that check a concrete solution against
// them.

#include <cmath>
#include <concepts>
#include <limits>
#include <string>
#include <vector>

#include "bicrit/market.hpp"
#include "bicrit/regularity.hpp"

namespace bicrit {

/// Profit factor of thresholded unit-demand pricing:
/// 2 (1/(1-a))^(1/a) + a/(1-a); 2e at a = 0, +inf at a = 1.
template <std::floating_point T>
T zeta(T alpha) {
  if (alpha >= T(1)) return std::numeric_limits<T>::infinity();
  if (alpha < T(kAlphaZero)) return T(2) * std::numbers::e_v<T>;
  return T(2) * peak_ratio(alpha) + alpha / (T(1) - alpha);
}

/// Welfare factor (2-a)/(1-a) of thresholded unit-demand pricing.
template <std::floating_point T>
T welfare_factor(T alpha) {
  if (alpha >= T(1)) return std::numeric_limits<T>::infinity();
  return (T(2) - alpha) / (T(1) - alpha);
}

/// c1 = 2 (1/(1-a))^(1/a) - 1: bound on SW / profit once every buyer pays
/// at least the threshold price.
template <std::floating_point T>
T welfare_to_profit_bound(T alpha) {
  return T(2) * peak_ratio(alpha) - T(1);
}

/// 8 + 2 (1/(1-a))^(1/a) + 4/(1-a).
template <std::floating_point T>
T ladder_sum_constant(T alpha) {
  return T(8) + T(2) * peak_ratio(alpha) + T(4) * inverse_gap(alpha);
}

/// Selection threshold and profit factor of the dummy-price ladder:
/// 2 (log2(Delta) + 2) (8 + 2 (1/(1-a))^(1/a) + 4/(1-a)).
template <std::floating_point T>
T ladder_profit_factor(T alpha, T bundle_ratio) {
  return T(2) * (std::log2(bundle_ratio) + T(2)) * ladder_sum_constant(alpha);
}

/// Welfare factor 12 (2-a)/(1-a) of the dummy-price ladder.
template <std::floating_point T>
T ladder_welfare_factor(T alpha) {
  return T(12) * welfare_factor(alpha);
}

/// Absolute slack used when asserting any guarantee on a solution whose
/// optimum welfare is sw_star.
inline double bound_tolerance(double sw_star) { return 1e-6 + 1e-6 * std::abs(sw_star); }

struct BicriteriaPair {
  double revenue_factor;
  double welfare_factor;
};

/// SW(s) <= c1 pi(s) and SW* - SW(s) <= c2 pi(s) make s a
/// (c1 + c2, c2 + 1)-bicriteria approximation.
BicriteriaPair bicriteria_from_bounds(double c1, double c2);

struct TradeoffPoint {
  double revenue_factor;
  double welfare_factor;
  /// c <= 1: the solution is welfare optimal and only the worst-case
  /// revenue factor zeta applies.
  bool degenerate = false;
};

/// Revenue factor min(c c1, c c2/(c-1)) at welfare factor c, for
/// 1 < c <= (2-a)/(1-a).  Throws std::domain_error above that range.
TradeoffPoint tradeoff_bound(double c, double alpha);

struct Verdict {
  std::string name;
  double achieved;  // measured ratio
  double bound;     // guaranteed factor
  bool pass;
  bool unbounded = false;
};

struct GuaranteeCertificate {
  double alpha = 0.0;
  double zeta = 0.0;
  double welfare_factor = 0.0;
  double mm_profit_factor = 0.0;
  double mm_welfare_factor = 0.0;
  double sw_star = 0.0;
  double achieved_welfare_ratio = 0.0;  // SW*/SW(s)
  double achieved_profit_ratio = 0.0;   // SW*/pi(s)
  double measured_c = 1.0;
  double tradeoff_revenue_at_c = 0.0;
  bool unbounded = false;
  std::vector<Verdict> verdicts;

  bool pass() const;
};

/// SW*/pi <= zeta, SW*/SW <= (2-a)/(1-a) and the trade-off bound at the
/// measured c.
GuaranteeCertificate certify_unit_demand(double sw_star, const PricingSolution& s, double alpha);

/// SW*/pi <= ladder profit factor and SW*/SW <= 12 (2-a)/(1-a).
GuaranteeCertificate certify_multi_minded(double sw_star, const PricingSolution& s, double alpha,
                                          double bundle_ratio);

struct CrossCertificate {
  bool granted = false;
  double welfare_floor = 0.0;
  std::string reason;
};

/// A candidate earning at least the benchmark's profit inherits the
/// benchmark's profit guarantee as a welfare floor: SW*/zeta for unit demand,
/// SW*/ladder profit factor otherwise.
CrossCertificate certify_cross(const MarketInstance& inst, double candidate_profit,
                               const PricingSolution& benchmark, double sw_star, double alpha);

/// a/b with 0 for a <= 0 and +inf for b <= 0 < a.
double guarantee_ratio(double numerator, double denominator);

}  // namespace bicrit
