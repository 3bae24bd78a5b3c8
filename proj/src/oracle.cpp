#include "bicrit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <thread>

namespace bicrit {

namespace {

Eigen::Index at(std::size_t k) { return static_cast<Eigen::Index>(k); }

void check_caps(const MarketInstance& inst, const GridSpec& grid) {
  if (inst.num_goods() > grid.max_goods || inst.num_types() > grid.max_types) {
    throw OracleCapError("instance exceeds oracle caps (" + std::to_string(inst.num_goods()) +
                         " goods, " + std::to_string(inst.num_types()) + " types; caps " +
                         std::to_string(grid.max_goods) + ", " + std::to_string(grid.max_types) +
                         ")");
  }
  if (!(grid.split_step > 0.0 && grid.split_step <= 1.0)) {
    throw std::invalid_argument("split step must lie in (0, 1]");
  }
  if (grid.price_step && !(*grid.price_step > 0.0)) {
    throw std::invalid_argument("price step must be positive");
  }
}

double compositions(std::size_t n, std::size_t parts) {
  // C(n + parts - 1, parts - 1)
  double c = 1.0;
  for (std::size_t k = 1; k < parts; ++k) {
    c *= static_cast<double>(n + k) / static_cast<double>(k);
  }
  return c;
}

void list_compositions(std::size_t n, std::size_t parts, std::vector<std::size_t>& cur,
                       std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() + 1 == parts) {
    cur.push_back(n);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (std::size_t k = 0; k <= n; ++k) {
    cur.push_back(k);
    list_compositions(n - k, parts, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<double> price_axis(const MarketInstance& inst, const GridSpec& grid) {
  const double top = inst.lambda_max();
  const double step = grid.price_step.value_or(top / 100.0);
  std::vector<double> axis;
  for (std::size_t k = 0;; ++k) {
    double p = static_cast<double>(k) * step;
    if (p >= top * (1.0 - 1e-12)) break;
    axis.push_back(p);
  }
  axis.push_back(top);
  return axis;
}

Allocation oracle_min_cost(const MarketInstance& inst, const Vector& prices, const Vector& demand,
                           const GridSpec& grid) {
  check_caps(inst, grid);
  const std::size_t types = inst.num_types();
  std::vector<std::vector<std::size_t>> cand(types);
  std::vector<std::size_t> open;  // types whose demand must be split
  for (std::size_t i = 0; i < types; ++i) {
    cand[i] = cheapest_bundles(inst, prices, i);
    if (demand[at(i)] > 0.0 && cand[i].size() > 1) open.push_back(i);
  }

  Vector split = Vector::Zero(at(inst.num_splits()));
  for (std::size_t i = 0; i < types; ++i) {
    if (demand[at(i)] > 0.0 && cand[i].size() == 1) {
      split[at(inst.split_offset(i) + cand[i].front())] = demand[at(i)];
    }
  }
  if (open.empty()) return {split, inst.good_incidence() * split};
  const Vector base_y = inst.good_incidence() * split;

  // Each open type's demand is split by fractions w[k] over its cheapest
  // bundles.  Every round enumerates w[k] + step * d[k] over all integer
  // offsets d[k] summing to zero, for all open types jointly.
  auto cost_of = [&](const std::vector<std::vector<double>>& w) {
    Vector y = base_y;
    for (std::size_t k = 0; k < open.size(); ++k) {
      const std::size_t i = open[k];
      for (std::size_t b = 0; b < w[k].size(); ++b) {
        for (std::size_t g : inst.type(i).bundles[cand[i][b]]) {
          y[at(g)] += demand[at(i)] * std::max(0.0, w[k][b]);
        }
      }
    }
    return total_cost(inst, y);
  };

  std::vector<std::vector<std::vector<double>>> moves(open.size());
  auto search = [&](std::vector<std::vector<double>>& w, double step) {
    std::vector<std::vector<double>> trial = w, best_w = w;
    double best = cost_of(w);
    std::function<void(std::size_t)> walk = [&](std::size_t depth) {
      if (depth == open.size()) {
        double c = cost_of(trial);
        if (c < best) {
          best = c;
          best_w = trial;
        }
        return;
      }
      for (const auto& d : moves[depth]) {
        bool feasible = true;
        for (std::size_t b = 0; b < d.size(); ++b) {
          trial[depth][b] = w[depth][b] + step * d[b];
          feasible = feasible && trial[depth][b] >= -1e-15;
        }
        if (feasible) walk(depth + 1);
      }
      trial[depth] = w[depth];
    };
    walk(0);
    bool moved = best_w != w;
    w = best_w;
    return moved;
  };

  // Coarse pass: compositions of n steps, from the all-in-first-bundle start.
  auto n = static_cast<std::size_t>(std::llround(1.0 / grid.split_step));
  auto count = [&](std::size_t steps) {
    double c = 1.0;
    for (std::size_t i : open) c *= compositions(steps, cand[i].size());
    return c;
  };
  while (n > 1 && count(n) > static_cast<double>(grid.max_combinations)) --n;
  std::vector<std::vector<double>> w(open.size());
  for (std::size_t k = 0; k < open.size(); ++k) {
    const std::size_t parts = cand[open[k]].size();
    w[k].assign(parts, 0.0);
    w[k][0] = 1.0;
    std::vector<std::size_t> cur;
    std::vector<std::vector<std::size_t>> comps;
    list_compositions(n, parts, cur, comps);
    moves[k].clear();
    for (const auto& cmp : comps) {
      std::vector<double> d(parts);
      for (std::size_t b = 0; b < parts; ++b) {
        d[b] = static_cast<double>(cmp[b]) - (b == 0 ? static_cast<double>(n) : 0.0);
      }
      moves[k].push_back(std::move(d));
    }
  }
  search(w, 1.0 / static_cast<double>(n));

  // Refinement: offsets with entries in [-2, 2], shrinking the step.
  double combos = 1.0;
  for (std::size_t k = 0; k < open.size(); ++k) {
    const std::size_t parts = cand[open[k]].size();
    moves[k].clear();
    std::vector<int> d(parts, -2);
    while (true) {
      int sum = 0;
      for (std::size_t b = 0; b + 1 < parts; ++b) sum += d[b];
      if (std::abs(sum) <= 2) {
        std::vector<double> move(parts);
        for (std::size_t b = 0; b + 1 < parts; ++b) move[b] = d[b];
        move[parts - 1] = -sum;
        moves[k].push_back(std::move(move));
      }
      std::size_t b = 0;
      while (b + 1 < parts && d[b] == 2) d[b++] = -2;
      if (b + 1 >= parts) break;
      ++d[b];
    }
    combos *= static_cast<double>(moves[k].size());
  }
  if (combos <= static_cast<double>(grid.max_combinations)) {
    for (double step = 0.5 / static_cast<double>(n); step > 1e-7; step *= 0.5) {
      while (search(w, step)) {
      }
    }
  }

  for (std::size_t k = 0; k < open.size(); ++k) {
    const std::size_t i = open[k];
    for (std::size_t b = 0; b < w[k].size(); ++b) {
      split[at(inst.split_offset(i) + cand[i][b])] = demand[at(i)] * std::max(0.0, w[k][b]);
    }
  }
  return {split, inst.good_incidence() * split};
}

PricingSolution oracle_evaluate(const MarketInstance& inst, const Vector& prices,
                                const GridSpec& grid) {
  Vector x = best_response(inst, prices);
  Allocation a = oracle_min_cost(inst, prices, x, grid);
  PricingSolution sol = assemble_solution(inst, prices, std::move(a.split));
  sol.demand = x;
  sol.sw = social_welfare(inst, sol.demand, sol.allocation);
  return sol;
}

namespace {

OracleResult grid_argmax(const MarketInstance& inst, const GridSpec& grid,
                         double (*score)(const PricingSolution&)) {
  check_caps(inst, grid);
  const std::vector<double> axis = price_axis(inst, grid);
  const std::size_t m = inst.num_goods();
  std::size_t cells = 1;
  for (std::size_t t = 0; t < m; ++t) cells *= axis.size();

  auto prices_of = [&](std::size_t flat) {
    Vector p(at(m));
    for (std::size_t t = m; t-- > 0;) {
      p[at(t)] = axis[flat % axis.size()];
      flat /= axis.size();
    }
    return p;
  };

  struct Best {
    double value = -std::numeric_limits<double>::infinity();
    std::size_t index = 0;
  };
  auto better = [](const Best& a, const Best& b) {
    return a.value > b.value || (a.value == b.value && a.index < b.index);
  };

  std::size_t workers = grid.threads ? grid.threads : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, cells);
  std::vector<Best> partial(workers);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        Best local;
        for (std::size_t flat = w; flat < cells; flat += workers) {
          Best cand{score(oracle_evaluate(inst, prices_of(flat), grid)), flat};
          if (better(cand, local)) local = cand;
        }
        partial[w] = local;
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Best best = partial.front();
  for (const auto& b : partial) {
    if (better(b, best)) best = b;
  }
  OracleResult out;
  out.prices = prices_of(best.index);
  out.solution = oracle_evaluate(inst, out.prices, grid);
  out.value = best.value;
  out.evaluated = cells;
  return out;
}

double welfare_of(const PricingSolution& s) { return s.sw; }
double profit_of(const PricingSolution& s) { return s.profit; }

}  // namespace

OracleResult oracle_max_welfare(const MarketInstance& inst, const GridSpec& grid) {
  return grid_argmax(inst, grid, &welfare_of);
}

OracleResult oracle_max_profit(const MarketInstance& inst, const GridSpec& grid) {
  return grid_argmax(inst, grid, &profit_of);
}

}  // namespace bicrit
