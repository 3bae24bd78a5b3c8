#include "bicrit/demand.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bicrit/regularity.hpp"

namespace bicrit {

std::string_view to_string(DemandFamily family) {
  switch (family) {
    case DemandFamily::Linear: return "linear";
    case DemandFamily::Exponential: return "exponential";
    case DemandFamily::GeneralizedPareto: return "generalized-pareto";
    case DemandFamily::Tabulated: return "tabulated";
  }
  return "unknown";
}

DemandFamily demand_family_from_string(std::string_view name) {
  if (name == "linear") return DemandFamily::Linear;
  if (name == "exponential") return DemandFamily::Exponential;
  if (name == "generalized-pareto") return DemandFamily::GeneralizedPareto;
  if (name == "tabulated") return DemandFamily::Tabulated;
  throw std::invalid_argument("unknown demand family '" + std::string(name) + "'");
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool pareto_is_exponential(double shape) { return shape < kAlphaZero; }

// Index k of the tabulated segment [x_k, x_{k+1}) containing x.
std::size_t segment_of(const std::vector<TablePoint>& t, double x) {
  auto it = std::upper_bound(t.begin(), t.end(), x,
                             [](double v, const TablePoint& p) { return v < p.x; });
  auto k = static_cast<std::size_t>(std::distance(t.begin(), it));
  return std::min(k == 0 ? 0 : k - 1, t.size() - 2);
}

}  // namespace

InverseDemand InverseDemand::linear(double lambda_max, double intercept) {
  require(lambda_max > 0 && std::isfinite(lambda_max), "lambda_max must be positive and finite");
  require(intercept > 0 && std::isfinite(intercept), "linear intercept must be positive");
  InverseDemand d;
  d.family_ = DemandFamily::Linear;
  d.lambda_max_ = lambda_max;
  d.scale_ = intercept;
  d.ceiling_ = intercept;
  return d;
}

InverseDemand InverseDemand::exponential(double lambda_max, double scale, double floor_ratio) {
  require(lambda_max > 0 && std::isfinite(lambda_max), "lambda_max must be positive and finite");
  require(scale > 0 && std::isfinite(scale), "exponential scale must be positive");
  require(floor_ratio > 0 && floor_ratio < 1, "floor ratio must lie in (0, 1)");
  InverseDemand d;
  d.family_ = DemandFamily::Exponential;
  d.lambda_max_ = lambda_max;
  d.scale_ = scale;
  d.floor_ratio_ = floor_ratio;
  d.ceiling_ = -scale * std::log(floor_ratio);
  return d;
}

InverseDemand InverseDemand::generalized_pareto(double lambda_max, double alpha, double scale,
                                                double floor_ratio) {
  require(lambda_max > 0 && std::isfinite(lambda_max), "lambda_max must be positive and finite");
  require(alpha >= 0 && alpha <= 1, "generalized-pareto alpha must lie in [0, 1]");
  require(scale > 0 && std::isfinite(scale), "generalized-pareto scale must be positive");
  require(floor_ratio > 0 && floor_ratio < 1, "floor ratio must lie in (0, 1)");
  InverseDemand d;
  d.family_ = DemandFamily::GeneralizedPareto;
  d.lambda_max_ = lambda_max;
  d.alpha_ = alpha;
  d.shape_ = alpha;
  d.scale_ = scale;
  d.floor_ratio_ = floor_ratio;
  d.ceiling_ = pareto_is_exponential(alpha)
                   ? -scale * std::log(floor_ratio)
                   : (scale / alpha) * (std::pow(floor_ratio, -alpha) - 1.0);
  return d;
}

InverseDemand InverseDemand::tabulated(std::vector<TablePoint> points, double alpha) {
  require(points.size() >= 2, "tabulated demand needs at least two points");
  require(points.front().x == 0.0, "tabulated demand must start at x = 0");
  require(points.front().price > 0 && std::isfinite(points.front().price),
          "tabulated peak price must be positive");
  require(alpha >= 0 && alpha <= 1, "alpha must lie in [0, 1]");
  for (std::size_t k = 1; k < points.size(); ++k) {
    require(points[k].x > points[k - 1].x, "tabulated x values must be strictly increasing");
    require(points[k].price <= points[k - 1].price, "tabulated prices must be non-increasing");
    require(points[k].price >= 0, "tabulated prices must be non-negative");
  }
  InverseDemand d;
  d.family_ = DemandFamily::Tabulated;
  d.lambda_max_ = points.front().price;
  d.alpha_ = alpha;
  d.scale_ = points.back().x;
  d.ceiling_ = points.back().x;
  d.table_ = std::move(points);
  if (!verify_regularity(d, alpha, 0)) {
    throw std::invalid_argument("tabulated demand is not alpha-strongly regular for the declared alpha");
  }
  return d;
}

InverseDemand InverseDemand::with_support_ceiling(double ceiling) const {
  require(ceiling > 0 && std::isfinite(ceiling), "support ceiling must be positive and finite");
  if (family_ == DemandFamily::Linear || family_ == DemandFamily::Tabulated) {
    require(ceiling <= scale_, "support ceiling cannot exceed the natural support");
  }
  InverseDemand d = *this;
  d.ceiling_ = ceiling;
  d.explicit_ceiling_ = true;
  return d;
}

InverseDemand InverseDemand::with_declared_alpha(double alpha) const {
  require(alpha >= 0 && alpha <= 1, "alpha must lie in [0, 1]");
  double intrinsic = family_ == DemandFamily::GeneralizedPareto ? shape_ : 0.0;
  if (family_ == DemandFamily::Tabulated) intrinsic = alpha_;
  require(alpha + 1e-12 >= intrinsic, "declared alpha is below the family's own regularity");
  InverseDemand d = *this;
  d.alpha_ = alpha;
  return d;
}

double InverseDemand::raw_eval(double x) const {
  switch (family_) {
    case DemandFamily::Linear: return lambda_max_ * (1.0 - x / scale_);
    case DemandFamily::Exponential: return lambda_max_ * std::exp(-x / scale_);
    case DemandFamily::GeneralizedPareto:
      if (pareto_is_exponential(shape_)) return lambda_max_ * std::exp(-x / scale_);
      return lambda_max_ * std::pow(1.0 + shape_ * x / scale_, -1.0 / shape_);
    case DemandFamily::Tabulated: {
      std::size_t k = segment_of(table_, x);
      const auto& a = table_[k];
      const auto& b = table_[k + 1];
      double w = (x - a.x) / (b.x - a.x);
      return a.price + w * (b.price - a.price);
    }
  }
  return 0.0;
}

double InverseDemand::lambda_min() const {
  if (family_ == DemandFamily::Tabulated && !explicit_ceiling_) return table_.back().price;
  return std::max(0.0, raw_eval(ceiling_));
}

double eval(const InverseDemand& d, double x) {
  if (!(x >= 0)) throw std::domain_error("inverse demand evaluated at negative quantity");
  if (x >= d.ceiling_) return 0.0;
  return std::max(0.0, d.raw_eval(x));
}

double derivative(const InverseDemand& d, double x) {
  if (!(x >= 0)) throw std::domain_error("inverse demand derivative at negative quantity");
  if (x >= d.ceiling_) return 0.0;
  switch (d.family_) {
    case DemandFamily::Linear: return -d.lambda_max_ / d.scale_;
    case DemandFamily::Exponential: return -d.lambda_max_ / d.scale_ * std::exp(-x / d.scale_);
    case DemandFamily::GeneralizedPareto:
      if (pareto_is_exponential(d.shape_)) {
        return -d.lambda_max_ / d.scale_ * std::exp(-x / d.scale_);
      }
      return -d.lambda_max_ / d.scale_ *
             std::pow(1.0 + d.shape_ * x / d.scale_, -1.0 / d.shape_ - 1.0);
    case DemandFamily::Tabulated: {
      std::size_t k = segment_of(d.table_, x);
      const auto& a = d.table_[k];
      const auto& b = d.table_[k + 1];
      return (b.price - a.price) / (b.x - a.x);
    }
  }
  return 0.0;
}

double inverse(const InverseDemand& d, double p) {
  if (!(p > 0)) throw std::domain_error("inverse demand needs a positive price");
  if (p > d.lambda_max_ * (1.0 + 1e-15)) {
    throw std::domain_error("inverse demand price above lambda_max");
  }
  if (p >= d.lambda_max_) return 0.0;
  double x = 0.0;
  switch (d.family_) {
    case DemandFamily::Linear: x = d.scale_ * (1.0 - p / d.lambda_max_); break;
    case DemandFamily::Exponential: x = d.scale_ * std::log(d.lambda_max_ / p); break;
    case DemandFamily::GeneralizedPareto:
      if (pareto_is_exponential(d.shape_)) {
        x = d.scale_ * std::log(d.lambda_max_ / p);
      } else {
        x = (d.scale_ / d.shape_) * (std::pow(d.lambda_max_ / p, d.shape_) - 1.0);
      }
      break;
    case DemandFamily::Tabulated: {
      const auto& t = d.table_;
      std::size_t k = t.size() - 1;
      while (k > 0 && t[k].price < p) --k;
      if (k == t.size() - 1) {
        x = t[k].x;
      } else {
        const auto& a = t[k];
        const auto& b = t[k + 1];
        x = a.x + (a.price - p) / (a.price - b.price) * (b.x - a.x);
      }
      break;
    }
  }
  return std::min(x, d.ceiling_);
}

double utility_integral(const InverseDemand& d, double x) {
  if (!(x >= 0)) throw std::domain_error("utility integral at negative quantity");
  x = std::min(x, d.ceiling_);
  const double lm = d.lambda_max_;
  const double s = d.scale_;
  switch (d.family_) {
    case DemandFamily::Linear: return lm * (x - 0.5 * x * x / s);
    case DemandFamily::Exponential: return lm * s * -std::expm1(-x / s);
    case DemandFamily::GeneralizedPareto: {
      const double a = d.shape_;
      if (pareto_is_exponential(a)) return lm * s * -std::expm1(-x / s);
      if (a >= 1.0) return lm * s * std::log1p(x / s);
      // lm s/(1-a) (1 - (1 + a x/s)^(1 - 1/a))
      return lm * s / (1.0 - a) * -std::expm1((1.0 - 1.0 / a) * std::log1p(a * x / s));
    }
    case DemandFamily::Tabulated: {
      const auto& t = d.table_;
      double total = 0.0;
      for (std::size_t k = 0; k + 1 < t.size() && t[k].x < x; ++k) {
        double hi = std::min(x, t[k + 1].x);
        double slope = (t[k + 1].price - t[k].price) / (t[k + 1].x - t[k].x);
        double at_hi = t[k].price + slope * (hi - t[k].x);
        total += 0.5 * (t[k].price + at_hi) * (hi - t[k].x);
      }
      return total;
    }
  }
  return 0.0;
}

double hazard_ratio(const InverseDemand& d, double x) {
  double slope = std::abs(derivative(d, x));
  if (slope == 0.0) return std::numeric_limits<double>::infinity();
  switch (d.family()) {
    case DemandFamily::Linear: return d.scale() - x;
    case DemandFamily::Exponential: return d.scale();
    case DemandFamily::GeneralizedPareto: return d.scale() + d.shape() * x;
    case DemandFamily::Tabulated: break;
  }
  return eval(d, x) / slope;
}

std::vector<double> regularity_grid(const InverseDemand& d, std::size_t grid_n) {
  std::vector<double> pts;
  if (d.family() == DemandFamily::Tabulated) {
    const auto& t = d.table();
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      double mid = 0.5 * (t[k].x + t[k + 1].x);
      if (mid < d.support_ceiling()) pts.push_back(mid);
    }
    return pts;
  }
  pts.reserve(grid_n);
  for (std::size_t k = 0; k < grid_n; ++k) {
    pts.push_back(d.support_ceiling() * static_cast<double>(k) / static_cast<double>(grid_n));
  }
  return pts;
}

bool verify_regularity(const std::function<double(double)>& hazard,
                       const std::vector<double>& points, double alpha, double tolerance) {
  // h(x2) - a x2 <= h(x1) - a x1 for every earlier x1, i.e. against the running minimum.
  double running_min = std::numeric_limits<double>::infinity();
  for (double x : points) {
    double g = hazard(x) - alpha * x;
    if (std::isfinite(running_min)) {
      double slack = tolerance * std::max(1.0, std::abs(running_min));
      if (!(g <= running_min + slack)) return false;
    }
    running_min = std::min(running_min, g);
  }
  return true;
}

bool verify_regularity(const InverseDemand& d, double alpha, std::size_t grid_n) {
  if (d.family() != DemandFamily::Tabulated && grid_n < 2) {
    throw std::invalid_argument("verify_regularity needs at least two grid points");
  }
  return verify_regularity([&d](double x) { return hazard_ratio(d, x); },
                           regularity_grid(d, grid_n), alpha);
}

}  // namespace bicrit
