#include "bicrit/multi_minded.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <future>

#include "bicrit/analysis.hpp"
#include "bicrit/regularity.hpp"
#include "bicrit/unit_demand.hpp"

namespace bicrit {

namespace {

Eigen::Index at(std::size_t k) { return static_cast<Eigen::Index>(k); }

constexpr std::size_t kMaxPopulationRetries = 5;
constexpr double kSaturationRel = 1e-9;
constexpr double kSaturationAbs = 1e-12;

double base_population(const MarketInstance& inst) {
  double total = 0.0;
  for (const auto& bt : inst.types()) total += inverse(bt.demand, inst.lambda_max() * 1e-6);
  return 2.0 * total;
}

}  // namespace

BenchmarkSolution benchmark(const MarketInstance& inst, const PricingSolution& opt, double alpha) {
  BenchmarkSolution b;
  b.threshold = threshold_price(alpha, inst.lambda_max());
  b.demand = Vector::Zero(at(inst.num_types()));
  b.split = Vector::Zero(at(inst.num_splits()));
  for (std::size_t i = 0; i < inst.num_types(); ++i) {
    const auto k = at(i);
    const double xs = opt.demand[k];
    if (xs <= 0.0) continue;
    const auto& d = inst.type(i).demand;
    const double cap = b.threshold > 0.0 ? inverse(d, b.threshold) : d.support_ceiling();
    const double xb = std::min(xs, cap);
    b.demand[k] = xb;
    const double scale = xb / xs;
    for (std::size_t s = 0; s < inst.type(i).bundles.size(); ++s) {
      const auto a = at(inst.split_offset(i) + s);
      b.split[a] = scale * opt.split[a];
    }
  }
  b.allocation = inst.good_incidence() * b.split;
  b.sw = social_welfare(inst, b.demand, b.allocation);
  b.profit = buyer_income(inst, b.demand) - total_cost(inst, b.allocation);
  constexpr double kSlack = 1e-9;
  b.dominated = (b.demand.array() <= opt.demand.array() + kSlack).all() &&
                (b.allocation.array() <= opt.allocation.array() + kSlack).all();
  return b;
}

ThresholdBoundCheck check_threshold_bound(const MarketInstance& inst, const Vector& demand,
                                          const Vector& allocation, const Vector& prices,
                                          double alpha) {
  ThresholdBoundCheck out;
  const double threshold = threshold_price(alpha, inst.lambda_max());
  out.welfare = social_welfare(inst, demand, allocation);
  out.applicable = true;
  for (std::size_t i = 0; i < inst.num_types(); ++i) {
    if (eval(inst.type(i).demand, demand[at(i)]) < threshold - kTieTolerance) {
      out.applicable = false;
    }
  }
  if (prices.size() > 0) {
    for (std::size_t t = 0; t < inst.num_goods(); ++t) {
      if (prices[at(t)] < marginal(inst.good(t).cost, allocation[at(t)]) - kTieTolerance) {
        out.applicable = false;
      }
    }
  }
  const double income = buyer_income(inst, demand);
  out.bound = welfare_to_profit_bound(alpha) * (income - total_cost(inst, allocation));
  out.holds = !out.applicable || !std::isfinite(out.bound) ||
              out.welfare <= out.bound + bound_tolerance(out.welfare);
  return out;
}

LadderSolution augmented_we(const MarketInstance& inst, double dummy_price,
                            const SolverConfig& cfg, int index) {
  if (!(dummy_price > 0.0)) throw std::invalid_argument("dummy price must be positive");
  double population = base_population(inst);
  for (std::size_t attempt = 0;; ++attempt) {
    AugmentedOptimum aug = solve_augmented_welfare(inst, {dummy_price, population}, cfg);
    if (aug.cap_binding) {
      if (attempt == kMaxPopulationRetries) {
        throw SolverError(fmt::format("dummy population still binding after {} doublings "
                                      "(population {:.6g})",
                                      kMaxPopulationRetries, population),
                          aug.split, 0.0);
      }
      spdlog::debug("rung {}: dummy population {:.6g} binds, doubling", index, population);
      population *= 2.0;
      continue;
    }
    LadderSolution out;
    out.index = index;
    out.dummy_price = dummy_price;
    out.population = population;
    out.retries = attempt;
    out.dummy = aug.dummy;
    const double cutoff = dummy_price * (1.0 + kSaturationRel) + kSaturationAbs;
    for (std::size_t t = 0; t < inst.num_goods(); ++t) {
      if (aug.prices[at(t)] > cutoff) out.saturated.push_back(t);
    }
    out.solution = assemble_solution(inst, std::move(aug.prices), std::move(aug.split));
    return out;
  }
}

std::size_t ladder_depth(const MarketInstance& inst) {
  std::size_t d = 0;
  while ((std::size_t{1} << d) * inst.min_bundle_size() < inst.max_bundle_size()) ++d;
  return d;
}

double rung_price(const MarketInstance& inst, double alpha, int j) {
  const double base = threshold_price(alpha, inst.lambda_max()) /
                      (2.0 * static_cast<double>(inst.max_bundle_size()));
  return std::ldexp(base, j);
}

Ladder ladder(const MarketInstance& inst, const PricingSolution& opt, double alpha,
              const SolverConfig& cfg) {
  Ladder lad;
  lad.threshold = threshold_price(alpha, inst.lambda_max());
  lad.delta = ladder_depth(inst);
  lad.optimum.index = -1;
  lad.optimum.solution = opt;
  lad.optimum.dummy = Vector::Zero(at(inst.num_goods()));
  if (!(lad.threshold > 0.0)) return lad;

  const int top = static_cast<int>(lad.delta) + 1;
  std::vector<std::future<LadderSolution>> jobs;
  for (int j = 0; j <= top; ++j) {
    jobs.push_back(std::async(std::launch::async, [&inst, &cfg, alpha, j] {
      return augmented_we(inst, rung_price(inst, alpha, j), cfg, j);
    }));
  }
  for (auto& job : jobs) lad.rungs.push_back(job.get());
  return lad;
}

double selection_threshold(const MarketInstance& inst, double alpha) {
  if (alpha >= 1.0) return std::numeric_limits<double>::infinity();
  return ladder_profit_factor(alpha, inst.bundle_ratio());
}

const LadderSolution& select_index(const MarketInstance& inst, const Ladder& lad, double sw_star,
                                   double alpha) {
  const double threshold = selection_threshold(inst, alpha);
  const double slack = bound_tolerance(sw_star);
  auto qualifies = [&](const LadderSolution& s) {
    return !std::isfinite(threshold) || sw_star <= threshold * s.solution.profit + slack;
  };
  if (qualifies(lad.optimum)) return lad.optimum;
  for (const auto& r : lad.rungs) {
    if (qualifies(r)) return r;
  }
  std::vector<double> profits{lad.optimum.solution.profit};
  std::string listing = fmt::format("pi(-1)={:.9g}", lad.optimum.solution.profit);
  for (const auto& r : lad.rungs) {
    profits.push_back(r.solution.profit);
    listing += fmt::format(", pi({})={:.9g}", r.index, r.solution.profit);
  }
  throw SelectionError(fmt::format("no ladder rung meets SW*/pi <= {:.9g} with SW* = {:.9g}; "
                                   "solver tolerance too loose? ({})",
                                   threshold, sw_star, listing),
                       std::move(profits));
}

MultiMindedResult price_multi_minded(const MarketInstance& inst, double alpha,
                                     const SolverConfig& cfg) {
  MultiMindedResult res;
  res.optimum = solve_welfare(inst, cfg);
  res.bench = benchmark(inst, res.optimum, alpha);
  res.lad = ladder(inst, res.optimum, alpha, cfg);
  res.threshold = selection_threshold(inst, alpha);
  res.selected = select_index(inst, res.lad, res.optimum.sw, alpha);
  return res;
}

LadderAudit audit_ladder(const MarketInstance& inst, const MultiMindedResult& res, double alpha) {
  LadderAudit audit;
  auto flag = [&](std::string msg) { audit.violations.push_back(std::move(msg)); };
  const double sw_star = res.optimum.sw;
  const double slack = bound_tolerance(sw_star);
  const auto& rungs = res.lad.rungs;

  if (!res.bench.dominated) flag("benchmark is not dominated by the optimum");
  ThresholdBoundCheck bcheck =
      check_threshold_bound(inst, res.bench.demand, res.bench.allocation, Vector(), alpha);
  if (!bcheck.holds) {
    flag(fmt::format("benchmark welfare {:.9g} exceeds threshold bound {:.9g}", bcheck.welfare,
                     bcheck.bound));
  }

  const double lmax = static_cast<double>(inst.max_bundle_size());
  for (const auto& r : rungs) {
    const auto& s = r.solution;
    for (std::size_t t = 0; t < inst.num_goods(); ++t) {
      double expect = std::max(r.dummy_price, marginal(inst.good(t).cost, s.allocation[at(t)]));
      if (std::abs(s.prices[at(t)] - expect) > 1e-6) {
        flag(fmt::format("rung {}: good {} price {:.9g} != max(dummy, marginal) {:.9g}", r.index,
                         inst.good(t).id, s.prices[at(t)], expect));
      }
    }
    const double cost = total_cost(inst, s.allocation);
    if (s.profit < cost - slack) {
      flag(fmt::format("rung {}: profit {:.9g} below cost {:.9g}", r.index, s.profit, cost));
    }

    std::vector<bool> sat(inst.num_goods(), false);
    for (std::size_t t : r.saturated) sat[t] = true;
    const double reference = 2.0 * lmax * r.dummy_price;
    for (std::size_t i = 0; i < inst.num_types(); ++i) {
      const auto& bt = inst.type(i);
      const double lam = eval(bt.demand, s.demand[at(i)]);
      const double lam_b = eval(bt.demand, res.bench.demand[at(i)]);
      if (!(lam > lam_b + kTieTolerance && lam >= reference)) continue;
      for (const auto& bundle : bt.bundles) {
        double sat_sum = 0.0;
        bool any = false;
        for (std::size_t g : bundle) {
          if (sat[g]) {
            any = true;
            sat_sum += s.prices[at(g)];
          }
        }
        if (!any) {
          flag(fmt::format("rung {}: type {} has a bundle without saturated goods", r.index,
                           bt.id));
        } else if (lam > 2.0 * sat_sum + 1e-6) {
          flag(fmt::format("rung {}: type {} pays {:.9g} > twice saturated price {:.9g}",
                           r.index, bt.id, lam, sat_sum));
        }
      }
    }
  }

  if (!rungs.empty()) {
    const double pi_opt = res.optimum.profit;
    audit.claim_start_lhs = sw_star - rungs.front().solution.sw;
    audit.claim_start_rhs =
        (5.0 + 6.0 * inverse_gap(alpha)) * (rungs.front().solution.profit + pi_opt);
    if (audit.claim_start_lhs > audit.claim_start_rhs + slack) {
      flag(fmt::format("SW* - SW(0) = {:.9g} exceeds {:.9g}", audit.claim_start_lhs,
                       audit.claim_start_rhs));
    }
    for (std::size_t j = 0; j + 1 < rungs.size(); ++j) {
      const auto& a = rungs[j].solution;
      const auto& b = rungs[j + 1].solution;
      if (a.sw - b.sw > 3.0 * a.profit + 3.0 * b.profit + slack) {
        flag(fmt::format("SW({0}) - SW({1}) = {2:.9g} exceeds 3 pi({0}) + 3 pi({1}) = {3:.9g}", j,
                         j + 1, a.sw - b.sw, 3.0 * a.profit + 3.0 * b.profit));
      }
    }
    const auto& last = rungs.back().solution;
    audit.last_rung_rhs = welfare_to_profit_bound(alpha) * last.profit;
    if (last.sw > audit.last_rung_rhs + slack) {
      flag(fmt::format("SW(last) = {:.9g} exceeds {:.9g}", last.sw, audit.last_rung_rhs));
    }
    double sum = pi_opt;
    for (const auto& r : rungs) sum += r.solution.profit;
    audit.claim_sum_rhs = ladder_sum_constant(alpha) * sum;
    if (sw_star > audit.claim_sum_rhs + slack) {
      flag(fmt::format("SW* = {:.9g} exceeds ladder profit sum bound {:.9g}", sw_star,
                       audit.claim_sum_rhs));
    }
  }

  const auto& sel = res.selected.solution;
  if (std::isfinite(res.threshold) && sw_star > res.threshold * sel.profit + slack) {
    flag(fmt::format("selected rung {}: SW*/pi = {:.9g} exceeds threshold {:.9g}",
                     res.selected.index, guarantee_ratio(sw_star, sel.profit), res.threshold));
  }
  const double wf = ladder_welfare_factor(alpha);
  if (std::isfinite(wf) && sw_star > wf * sel.sw + slack) {
    flag(fmt::format("selected rung {}: SW*/SW = {:.9g} exceeds {:.9g}", res.selected.index,
                     guarantee_ratio(sw_star, sel.sw), wf));
  }
  return audit;
}

}  // namespace bicrit
