#pragma once

// Doubly convex production costs.  The marginal cost is a sum of shifted
// power terms
//
//   c(y) = sum_k a_k * max(0, y - b_k)^beta_k,   b_0 = 0 < b_1 < ...,
//
// with a_k > 0 and beta_k >= 1, so c and C = integral of c are both convex,
// non-decreasing and vanish at zero.  The power family is the single-term case.

#include <string_view>
#include <vector>

namespace bicrit {

enum class CostFamily { Power, PiecewisePower };

std::string_view to_string(CostFamily family);
CostFamily cost_family_from_string(std::string_view name);

struct CostPiece {
  double breakpoint;
  double a;
  double beta;
};

class CostFunction {
 public:
  /// c(y) = a y^beta, C(y) = a y^(beta+1) / (beta+1).
  static CostFunction power(double a, double beta);
  /// Pieces ordered by strictly increasing breakpoint, the first at zero.
  static CostFunction piecewise_power(std::vector<CostPiece> pieces);

  CostFamily family() const { return family_; }
  const std::vector<CostPiece>& pieces() const { return pieces_; }
  double a() const { return pieces_.front().a; }
  double beta() const { return pieces_.front().beta; }

 private:
  CostFunction() = default;
  CostFamily family_ = CostFamily::Power;
  std::vector<CostPiece> pieces_;
};

/// C(y).
double total(const CostFunction& cf, double y);
/// c(y) = C'(y).
double marginal(const CostFunction& cf, double y);
/// c'(y), right derivative at breakpoints of linear pieces.
double marginal_slope(const CostFunction& cf, double y);
/// The y >= 0 with c(y) = p.
double marginal_inverse(const CostFunction& cf, double p);

}  // namespace bicrit
