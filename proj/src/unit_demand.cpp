#include "bicrit/unit_demand.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bicrit/regularity.hpp"

namespace bicrit {

namespace {

Eigen::Index at(std::size_t k) { return static_cast<Eigen::Index>(k); }

}  // namespace

std::string_view to_string(Cluster c) { return c == Cluster::High ? "H" : "L"; }

double threshold_price(double alpha, double lambda_max) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::domain_error("alpha must lie in [0, 1]");
  if (!(lambda_max > 0.0)) throw std::domain_error("lambda_max must be positive");
  return lambda_max * threshold_fraction(alpha);
}

ThresholdedPrices threshold_prices(const MarketInstance& inst, const Vector& optimum_prices,
                                   double primary) {
  ThresholdedPrices tp;
  tp.primary_price = primary;
  tp.prices = optimum_prices.cwiseMax(primary);
  tp.good_cluster.resize(inst.num_goods());
  for (std::size_t t = 0; t < inst.num_goods(); ++t) {
    tp.good_cluster[t] =
        optimum_prices[at(t)] > primary + kTieTolerance ? Cluster::High : Cluster::Low;
  }
  tp.type_cluster.resize(inst.num_types());
  for (std::size_t i = 0; i < inst.num_types(); ++i) {
    BundleQuote q = min_bundle_price(inst, tp.prices, i);
    tp.type_cluster[i] = tp.good_cluster[inst.type(i).bundles[q.bundle].front()];
  }
  return tp;
}

UnitDemandResult price_unit_demand(const MarketInstance& inst, double alpha,
                                   const SolverConfig& cfg) {
  if (!inst.is_unit_demand()) {
    throw std::invalid_argument("thresholded pricing requires every bundle to be a single good");
  }
  UnitDemandResult out;
  out.optimum = solve_welfare(inst, cfg);
  out.thresholded =
      threshold_prices(inst, out.optimum.prices, threshold_price(alpha, inst.lambda_max()));
  out.solution = evaluate(inst, out.thresholded.prices);
  return out;
}

ClusterReport cluster_diagnostics(const MarketInstance& inst, const ThresholdedPrices& tp,
                                  const PricingSolution& sol, const PricingSolution& opt,
                                  double tol) {
  ClusterReport rep;
  auto flag = [&](std::string msg) { rep.violations.push_back(std::move(msg)); };

  for (std::size_t t = 0; t < inst.num_goods(); ++t) {
    const auto k = at(t);
    const std::string& id = inst.good(t).id;
    if (tp.prices[k] < opt.prices[k] - tol || tp.prices[k] < tp.primary_price - tol) {
      flag(fmt::format("good {}: price {:.9g} below max(primary, optimum)", id, tp.prices[k]));
    }
    if (tp.good_cluster[t] == Cluster::High) {
      ++rep.high_goods;
      if (std::abs(sol.allocation[k] - opt.allocation[k]) > tol) {
        flag(fmt::format("good {} (H): consumption {:.9g} differs from optimum {:.9g}", id,
                         sol.allocation[k], opt.allocation[k]));
      }
    } else {
      ++rep.low_goods;
      const auto& cost = inst.good(t).cost;
      double now = marginal(cost, sol.allocation[k]);
      double best = marginal(cost, opt.allocation[k]);
      if (now > best + tol) {
        flag(fmt::format("good {} (L): marginal cost {:.9g} exceeds optimum {:.9g}", id, now,
                         best));
      }
    }
  }

  Vector r = buyer_marginal_cost(inst, sol.split, sol.allocation);
  for (std::size_t i = 0; i < inst.num_types(); ++i) {
    const auto k = at(i);
    const auto& bt = inst.type(i);
    const double x = sol.demand[k];
    if (tp.type_cluster[i] == Cluster::High) {
      ++rep.high_types;
      if (std::abs(x - opt.demand[k]) > tol) {
        flag(fmt::format("type {} (H): demand {:.9g} differs from optimum {:.9g}", bt.id, x,
                         opt.demand[k]));
      }
    } else {
      ++rep.low_types;
      if (x > opt.demand[k] + tol) {
        flag(fmt::format("type {} (L): demand {:.9g} exceeds optimum {:.9g}", bt.id, x,
                         opt.demand[k]));
      }
      double slope = std::abs(derivative(bt.demand, x));
      if (x > 0.0 && slope > 0.0) {
        double h = (eval(bt.demand, x) - r[k]) / slope;
        if (h > x + tol * (1.0 + x)) {
          flag(fmt::format("type {} (L): (lambda - r)/|lambda'| = {:.9g} exceeds demand {:.9g}",
                           bt.id, h, x));
        }
      }
    }
    for (std::size_t b = 0; b < bt.bundles.size(); ++b) {
      if (sol.split[at(inst.split_offset(i) + b)] <= tol) continue;
      for (std::size_t g : bt.bundles[b]) {
        if (tp.good_cluster[g] != tp.type_cluster[i]) {
          flag(fmt::format("type {} ({}) buys good {} from cluster {}", bt.id,
                           to_string(tp.type_cluster[i]), inst.good(g).id,
                           to_string(tp.good_cluster[g])));
        }
      }
    }
  }

  Allocation cheapest = solve_constrained_welfare(inst, sol.demand);
  double cost = total_cost(inst, sol.allocation);
  double floor = total_cost(inst, cheapest.allocation);
  if (cost > floor + tol * (1.0 + std::abs(floor))) {
    flag(fmt::format("allocation cost {:.12g} exceeds the minimum {:.12g} for its demand", cost,
                     floor));
  }
  return rep;
}

}  // namespace bicrit
