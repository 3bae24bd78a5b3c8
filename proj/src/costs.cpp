#include "bicrit/costs.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bicrit {

std::string_view to_string(CostFamily family) {
  return family == CostFamily::Power ? "power" : "piecewise-power";
}

CostFamily cost_family_from_string(std::string_view name) {
  if (name == "power") return CostFamily::Power;
  if (name == "piecewise-power") return CostFamily::PiecewisePower;
  throw std::invalid_argument("unknown cost family '" + std::string(name) + "'");
}

namespace {

void check_piece(const CostPiece& p) {
  if (!(p.a > 0) || !std::isfinite(p.a)) {
    throw std::invalid_argument("cost coefficient a must be positive and finite");
  }
  if (!(p.beta >= 1) || !std::isfinite(p.beta)) {
    throw std::invalid_argument("cost exponent beta must be finite and >= 1");
  }
}

void require_quantity(double y) {
  if (!(y >= 0)) throw std::domain_error("cost evaluated at negative quantity");
}

}  // namespace

CostFunction CostFunction::power(double a, double beta) {
  CostPiece piece{0.0, a, beta};
  check_piece(piece);
  CostFunction cf;
  cf.family_ = CostFamily::Power;
  cf.pieces_ = {piece};
  return cf;
}

CostFunction CostFunction::piecewise_power(std::vector<CostPiece> pieces) {
  if (pieces.empty()) throw std::invalid_argument("piecewise-power cost needs at least one piece");
  if (pieces.front().breakpoint != 0.0) {
    throw std::invalid_argument("first piecewise-power breakpoint must be zero");
  }
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    check_piece(pieces[k]);
    if (k > 0 && !(pieces[k].breakpoint > pieces[k - 1].breakpoint)) {
      throw std::invalid_argument("piecewise-power breakpoints must be strictly increasing");
    }
    if (!std::isfinite(pieces[k].breakpoint)) {
      throw std::invalid_argument("piecewise-power breakpoints must be finite");
    }
  }
  CostFunction cf;
  cf.family_ = CostFamily::PiecewisePower;
  cf.pieces_ = std::move(pieces);
  return cf;
}

double total(const CostFunction& cf, double y) {
  require_quantity(y);
  double sum = 0.0;
  for (const auto& p : cf.pieces()) {
    if (y <= p.breakpoint) break;
    sum += p.a * std::pow(y - p.breakpoint, p.beta + 1.0) / (p.beta + 1.0);
  }
  return sum;
}

double marginal(const CostFunction& cf, double y) {
  require_quantity(y);
  double sum = 0.0;
  for (const auto& p : cf.pieces()) {
    if (y <= p.breakpoint) break;
    sum += p.a * std::pow(y - p.breakpoint, p.beta);
  }
  return sum;
}

double marginal_slope(const CostFunction& cf, double y) {
  require_quantity(y);
  double sum = 0.0;
  for (const auto& p : cf.pieces()) {
    if (y < p.breakpoint) break;
    if (p.beta == 1.0) {
      sum += p.a;
    } else if (y > p.breakpoint) {
      sum += p.a * p.beta * std::pow(y - p.breakpoint, p.beta - 1.0);
    }
  }
  return sum;
}

double marginal_inverse(const CostFunction& cf, double p) {
  if (!(p >= 0)) throw std::domain_error("marginal_inverse needs a non-negative price");
  if (p == 0.0) return 0.0;
  if (!std::isfinite(p)) return std::numeric_limits<double>::infinity();
  const auto& first = cf.pieces().front();
  if (cf.pieces().size() == 1) return std::pow(p / first.a, 1.0 / first.beta);
  // c is continuous and strictly increasing on (0, inf): bracket, then bisect.
  double lo = 0.0;
  double hi = std::max(1.0, cf.pieces().back().breakpoint);
  while (marginal(cf, hi) < p) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    (marginal(cf, mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace bicrit
