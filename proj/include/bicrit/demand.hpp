#pragma once

// Inverse demand functions lambda(x): the price at which exactly x mass of a
// buyer type still buys.  All families share a finite peak lambda(0) and are
// truncated to zero beyond a support ceiling.

#include <cstddef>
#include <functional>
#include <limits>
#include <string_view>
#include <utility>
#include <vector>

namespace bicrit {

enum class DemandFamily { Linear, Exponential, GeneralizedPareto, Tabulated };

std::string_view to_string(DemandFamily family);
DemandFamily demand_family_from_string(std::string_view name);

inline constexpr double kDefaultFloorRatio = 1e-6;

struct TablePoint {
  double x;
  double price;
};

/// Immutable parametric inverse demand.
///
/// `scale` is the linear intercept (linear), the hazard scale h0
/// (exponential, generalized-pareto) and unused for tabulated demand.
/// For exponential and generalized-pareto demand the support ceiling is the
/// quantity where the price falls to `floor_ratio * lambda_max`, unless an
/// explicit ceiling is supplied.
class InverseDemand {
 public:
  static InverseDemand linear(double lambda_max, double intercept);
  static InverseDemand exponential(double lambda_max, double scale,
                                   double floor_ratio = kDefaultFloorRatio);
  static InverseDemand generalized_pareto(double lambda_max, double alpha, double scale,
                                          double floor_ratio = kDefaultFloorRatio);
  static InverseDemand tabulated(std::vector<TablePoint> points, double alpha);

  /// Override the support ceiling (must be positive and, for linear demand,
  /// no larger than the intercept).
  InverseDemand with_support_ceiling(double ceiling) const;
  /// Declare a (weaker) regularity parameter; must be >= the family's own.
  InverseDemand with_declared_alpha(double alpha) const;

  DemandFamily family() const { return family_; }
  double lambda_max() const { return lambda_max_; }
  double alpha() const { return alpha_; }
  double scale() const { return scale_; }
  /// Generalized-pareto tail shape (the family's own alpha).
  double shape() const { return shape_; }
  double support_ceiling() const { return ceiling_; }
  double floor_ratio() const { return floor_ratio_; }
  /// lambda just below the support ceiling.
  double lambda_min() const;
  const std::vector<TablePoint>& table() const { return table_; }
  bool ceiling_is_explicit() const { return explicit_ceiling_; }

 private:
  InverseDemand() = default;
  double raw_eval(double x) const;

  DemandFamily family_ = DemandFamily::Linear;
  double lambda_max_ = 1.0;
  double alpha_ = 0.0;
  double shape_ = 0.0;  // generalized-pareto shape; equals alpha_ unless re-declared
  double scale_ = 1.0;
  double ceiling_ = 1.0;
  double floor_ratio_ = kDefaultFloorRatio;
  bool explicit_ceiling_ = false;
  std::vector<TablePoint> table_;

  friend double eval(const InverseDemand&, double);
  friend double derivative(const InverseDemand&, double);
  friend double inverse(const InverseDemand&, double);
  friend double utility_integral(const InverseDemand&, double);
};

/// lambda(x); zero at and beyond the support ceiling (except at the ceiling of
/// linear demand, where it is zero anyway).
double eval(const InverseDemand& d, double x);

/// lambda'(x) (right derivative on tabulated breakpoints); zero beyond support.
double derivative(const InverseDemand& d, double x);

/// Largest x with lambda(x) >= p, for 0 < p <= lambda_max.
double inverse(const InverseDemand& d, double p);

/// u(x) = integral of lambda over [0, x].
double utility_integral(const InverseDemand& d, double x);

/// lambda(x) / |lambda'(x)|; +inf where lambda' vanishes.
double hazard_ratio(const InverseDemand& d, double x);

/// Pairwise check h(x2) - h(x1) <= alpha (x2 - x1) + 1e-8 on an evenly spaced
/// grid of grid_n points covering the support (segment midpoints for
/// tabulated demand).
bool verify_regularity(const InverseDemand& d, double alpha, std::size_t grid_n);

/// Same check for an arbitrary hazard-ratio function sampled at `points`
/// (sorted ascending).
bool verify_regularity(const std::function<double(double)>& hazard,
                       const std::vector<double>& points, double alpha,
                       double tolerance = 1e-8);

/// The grid verify_regularity uses for `d`.
std::vector<double> regularity_grid(const InverseDemand& d, std::size_t grid_n);

}  // namespace bicrit
