#include "bicrit/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace bicrit {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::ostringstream os;
  os << "invalid market instance (" << v.size() << " violation" << (v.size() == 1 ? "" : "s")
     << ")";
  for (const auto& s : v) os << "\n  - " << s;
  return os.str();
}

Bundle normalized(Bundle b) {
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

}  // namespace

InstanceError::InstanceError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

std::vector<std::string> MarketInstance::validate(const std::vector<Good>& goods,
                                                  const std::vector<BuyerType>& types) {
  std::vector<std::string> out;
  if (goods.empty()) out.emplace_back("goods: at least one good is required");
  if (types.empty()) out.emplace_back("buyer_types: at least one buyer type is required");

  std::set<std::string> seen;
  for (std::size_t t = 0; t < goods.size(); ++t) {
    if (!seen.insert(goods[t].id).second) {
      out.push_back("goods[" + std::to_string(t) + "].id: duplicate id '" + goods[t].id + "'");
    }
  }
  seen.clear();
  for (std::size_t i = 0; i < types.size(); ++i) {
    const auto& bt = types[i];
    const std::string path = "buyer_types[" + std::to_string(i) + "]";
    if (!seen.insert(bt.id).second) out.push_back(path + ".id: duplicate id '" + bt.id + "'");
    if (bt.bundles.empty()) out.push_back(path + ".bundles: at least one bundle is required");
    std::set<Bundle> distinct;
    for (std::size_t k = 0; k < bt.bundles.size(); ++k) {
      const auto& b = bt.bundles[k];
      const std::string bpath = path + ".bundles[" + std::to_string(k) + "]";
      if (b.empty()) out.push_back(bpath + ": bundle is empty");
      for (std::size_t g : b) {
        if (g >= goods.size()) {
          out.push_back(bpath + ": references unknown good index " + std::to_string(g));
        }
      }
      if (!std::is_sorted(b.begin(), b.end()) ||
          std::adjacent_find(b.begin(), b.end()) != b.end()) {
        out.push_back(bpath + ": bundle goods must be sorted and distinct");
      }
      if (!distinct.insert(b).second) out.push_back(bpath + ": duplicate bundle");
    }
    if (!types.empty()) {
      double peak = types.front().demand.lambda_max();
      double mine = bt.demand.lambda_max();
      if (std::abs(mine - peak) > 1e-12 * std::max(1.0, peak)) {
        std::ostringstream os;
        os.precision(12);
        os << path << ".demand.lambda_max: uniform peak violated (" << mine << " != " << peak
           << ")";
        out.push_back(os.str());
      }
    }
  }
  return out;
}

MarketInstance MarketInstance::create(std::vector<Good> goods, std::vector<BuyerType> types) {
  for (auto& bt : types) {
    for (auto& b : bt.bundles) b = normalized(std::move(b));
  }
  auto violations = validate(goods, types);
  if (!violations.empty()) throw InstanceError(std::move(violations));

  MarketInstance m;
  m.goods_ = std::move(goods);
  m.types_ = std::move(types);
  std::size_t n = 0;
  m.max_bundle_ = 0;
  m.min_bundle_ = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < m.types_.size(); ++i) {
    m.split_offset_.push_back(n);
    for (std::size_t k = 0; k < m.types_[i].bundles.size(); ++k) {
      m.split_type_.push_back(i);
      m.split_local_.push_back(k);
      const auto size = m.types_[i].bundles[k].size();
      m.max_bundle_ = std::max(m.max_bundle_, size);
      m.min_bundle_ = std::min(m.min_bundle_, size);
      ++n;
    }
  }
  m.demand_incidence_ = Matrix::Zero(static_cast<Eigen::Index>(m.types_.size()),
                                     static_cast<Eigen::Index>(n));
  m.good_incidence_ = Matrix::Zero(static_cast<Eigen::Index>(m.goods_.size()),
                                   static_cast<Eigen::Index>(n));
  for (std::size_t s = 0; s < n; ++s) {
    const auto col = static_cast<Eigen::Index>(s);
    m.demand_incidence_(static_cast<Eigen::Index>(m.split_type_[s]), col) = 1.0;
    for (std::size_t g : m.split_bundle(s)) {
      m.good_incidence_(static_cast<Eigen::Index>(g), col) = 1.0;
    }
  }
  return m;
}

const Bundle& MarketInstance::split_bundle(std::size_t s) const {
  return types_[split_type_[s]].bundles[split_local_[s]];
}

double MarketInstance::alpha() const {
  double a = 0.0;
  for (const auto& bt : types_) a = std::max(a, bt.demand.alpha());
  return a;
}

namespace {

double bundle_price(const Bundle& b, const Vector& prices) {
  double sum = 0.0;
  for (std::size_t g : b) sum += prices[static_cast<Eigen::Index>(g)];
  return sum;
}

}  // namespace

std::vector<std::size_t> cheapest_bundles(const MarketInstance& inst, const Vector& prices,
                                          std::size_t type, double tolerance) {
  const auto& bundles = inst.type(type).bundles;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : bundles) best = std::min(best, bundle_price(b, prices));
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < bundles.size(); ++k) {
    if (bundle_price(bundles[k], prices) <= best + tolerance) out.push_back(k);
  }
  std::sort(out.begin(), out.end(),
            [&](std::size_t a, std::size_t b) { return bundles[a] < bundles[b]; });
  return out;
}

BundleQuote min_bundle_price(const MarketInstance& inst, const Vector& prices, std::size_t type) {
  auto ties = cheapest_bundles(inst, prices, type);
  const auto& bundles = inst.type(type).bundles;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : bundles) best = std::min(best, bundle_price(b, prices));
  return {best, ties.front()};
}

Vector best_response(const MarketInstance& inst, const Vector& prices) {
  Vector x(static_cast<Eigen::Index>(inst.num_types()));
  for (std::size_t i = 0; i < inst.num_types(); ++i) {
    const auto& d = inst.type(i).demand;
    double q = min_bundle_price(inst, prices, i).price;
    double xi = 0.0;
    if (q <= 0.0) {
      xi = d.support_ceiling();
    } else if (q < d.lambda_max()) {
      xi = inverse(d, q);
    }
    x[static_cast<Eigen::Index>(i)] = xi;
  }
  return x;
}

namespace {

// Derivative of the cost change when s units move from bundle `from` to `to`.
double exchange_slope(const MarketInstance& inst, const Bundle& from, const Bundle& to,
                      const Vector& y, double s) {
  double slope = 0.0;
  for (std::size_t g : to) {
    if (std::binary_search(from.begin(), from.end(), g)) continue;
    slope += marginal(inst.good(g).cost, y[static_cast<Eigen::Index>(g)] + s);
  }
  for (std::size_t g : from) {
    if (std::binary_search(to.begin(), to.end(), g)) continue;
    slope -= marginal(inst.good(g).cost, std::max(0.0, y[static_cast<Eigen::Index>(g)] - s));
  }
  return slope;
}

double optimal_exchange(const MarketInstance& inst, const Bundle& from, const Bundle& to,
                        const Vector& y, double available) {
  if (exchange_slope(inst, from, to, y, available) <= 0.0) return available;
  double lo = 0.0;
  double hi = available;
  for (int it = 0; it < 100 && hi - lo > 1e-16 * available; ++it) {
    double mid = 0.5 * (lo + hi);
    (exchange_slope(inst, from, to, y, mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void move_mass(const Bundle& from, const Bundle& to, double amount, Vector& y) {
  for (std::size_t g : from) y[static_cast<Eigen::Index>(g)] -= amount;
  for (std::size_t g : to) y[static_cast<Eigen::Index>(g)] += amount;
  for (std::size_t g : from) {
    auto& v = y[static_cast<Eigen::Index>(g)];
    v = std::max(0.0, v);
  }
}

}  // namespace

Allocation allocate_min_cost(const MarketInstance& inst, const Vector& demand,
                             const std::vector<std::vector<std::size_t>>& candidates) {
  constexpr int kMaxSweeps = 10000;
  Vector split = Vector::Zero(static_cast<Eigen::Index>(inst.num_splits()));
  for (std::size_t i = 0; i < inst.num_types(); ++i) {
    double xi = demand[static_cast<Eigen::Index>(i)];
    if (xi <= 0.0 || candidates[i].empty()) continue;
    double share = xi / static_cast<double>(candidates[i].size());
    for (std::size_t k : candidates[i]) {
      split[static_cast<Eigen::Index>(inst.split_offset(i) + k)] = share;
    }
  }
  Vector y = inst.good_incidence() * split;

  // Pairwise exchange: move mass from the most to the least marginally
  // expensive candidate bundle of each type with an exact line search.
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double max_gap = 0.0;
    for (std::size_t i = 0; i < inst.num_types(); ++i) {
      const auto& cand = candidates[i];
      if (cand.size() < 2 || demand[static_cast<Eigen::Index>(i)] <= 0.0) continue;
      const auto& bundles = inst.type(i).bundles;
      std::size_t hi = cand.front();
      std::size_t lo = cand.front();
      double m_hi = -std::numeric_limits<double>::infinity();
      double m_lo = std::numeric_limits<double>::infinity();
      for (std::size_t k : cand) {
        double m = bundle_marginal_cost(inst, bundles[k], y);
        if (m < m_lo) {
          m_lo = m;
          lo = k;
        }
        if (split[static_cast<Eigen::Index>(inst.split_offset(i) + k)] > 0.0 && m > m_hi) {
          m_hi = m;
          hi = k;
        }
      }
      double gap = m_hi - m_lo;
      if (!(gap > 1e-12 * (1.0 + std::abs(m_hi)))) continue;
      max_gap = std::max(max_gap, gap / (1.0 + std::abs(m_hi)));
      auto& from = split[static_cast<Eigen::Index>(inst.split_offset(i) + hi)];
      double amount = optimal_exchange(inst, bundles[hi], bundles[lo], y, from);
      if (amount <= 0.0) continue;
      move_mass(bundles[hi], bundles[lo], amount, y);
      from -= amount;
      if (from < 1e-15 * demand[static_cast<Eigen::Index>(i)]) {
        amount += from;
        from = 0.0;
      }
      split[static_cast<Eigen::Index>(inst.split_offset(i) + lo)] += amount;
    }
    if (max_gap == 0.0) break;
  }
  drop_split_dust(split);
  return {split, inst.good_incidence() * split};
}

Allocation min_cost_allocation(const MarketInstance& inst, const Vector& prices,
                               const Vector& demand) {
  std::vector<std::vector<std::size_t>> candidates(inst.num_types());
  for (std::size_t i = 0; i < inst.num_types(); ++i) {
    candidates[i] = cheapest_bundles(inst, prices, i);
  }
  return allocate_min_cost(inst, demand, candidates);
}

PricingSolution assemble_solution(const MarketInstance& inst, Vector prices, Vector split) {
  PricingSolution sol;
  sol.prices = std::move(prices);
  sol.split = std::move(split);
  sol.demand = inst.demand_incidence() * sol.split;
  sol.allocation = inst.good_incidence() * sol.split;
  sol.sw = social_welfare(inst, sol.demand, sol.allocation);
  sol.profit = profit(inst, sol.prices, sol.allocation);
  return sol;
}

PricingSolution evaluate(const MarketInstance& inst, const Vector& prices) {
  Vector x = best_response(inst, prices);
  Allocation a = min_cost_allocation(inst, prices, x);
  PricingSolution sol = assemble_solution(inst, prices, std::move(a.split));
  // Keep the exact best-response demand rather than the re-summed split.
  sol.demand = x;
  sol.sw = social_welfare(inst, sol.demand, sol.allocation);
  return sol;
}

double total_cost(const MarketInstance& inst, const Vector& allocation) {
  double c = 0.0;
  for (std::size_t t = 0; t < inst.num_goods(); ++t) {
    c += total(inst.good(t).cost, allocation[static_cast<Eigen::Index>(t)]);
  }
  return c;
}

double social_welfare(const MarketInstance& inst, const Vector& demand, const Vector& allocation) {
  double u = 0.0;
  for (std::size_t i = 0; i < inst.num_types(); ++i) {
    u += utility_integral(inst.type(i).demand, demand[static_cast<Eigen::Index>(i)]);
  }
  return u - total_cost(inst, allocation);
}

double profit(const MarketInstance& inst, const Vector& prices, const Vector& allocation) {
  return prices.dot(allocation) - total_cost(inst, allocation);
}

double bundle_marginal_cost(const MarketInstance& inst, const Bundle& bundle,
                            const Vector& allocation) {
  double m = 0.0;
  for (std::size_t g : bundle) {
    m += marginal(inst.good(g).cost, allocation[static_cast<Eigen::Index>(g)]);
  }
  return m;
}

double buyer_income(const MarketInstance& inst, const Vector& demand) {
  double s = 0.0;
  for (std::size_t i = 0; i < inst.num_types(); ++i) {
    double xi = demand[static_cast<Eigen::Index>(i)];
    s += eval(inst.type(i).demand, xi) * xi;
  }
  return s;
}

Vector buyer_marginal_cost(const MarketInstance& inst, const Vector& split,
                           const Vector& allocation) {
  Vector r(static_cast<Eigen::Index>(inst.num_types()));
  for (std::size_t i = 0; i < inst.num_types(); ++i) {
    const auto& bundles = inst.type(i).bundles;
    double used = std::numeric_limits<double>::infinity();
    double any = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < bundles.size(); ++k) {
      double m = bundle_marginal_cost(inst, bundles[k], allocation);
      any = std::min(any, m);
      if (split[static_cast<Eigen::Index>(inst.split_offset(i) + k)] > 1e-12) {
        used = std::min(used, m);
      }
    }
    r[static_cast<Eigen::Index>(i)] = std::isfinite(used) ? used : any;
  }
  return r;
}

void drop_split_dust(Vector& split, double threshold) {
  for (auto& v : split) {
    if (std::abs(v) < threshold) v = 0.0;
  }
}

}  // namespace bicrit
