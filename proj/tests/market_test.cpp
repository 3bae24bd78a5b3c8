#include <gtest/gtest.h>

#include "bicrit/market.hpp"
#include "bicrit/welfare_solver.hpp"
#include "support/generators.hpp"
#include "support/suites.hpp"

using namespace bicrit;
using bicrit::testing::Rng;

namespace {

const CostFunction kUnitCost = CostFunction::power(1.0, 1.0);
const InverseDemand kLinear = InverseDemand::linear(1.0, 1.0);

MarketInstance two_goods(std::vector<Bundle> bundles) {
  return MarketInstance::create({{"a", kUnitCost}, {"b", kUnitCost}},
                                {{"t", std::move(bundles), kLinear}});
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

}  // namespace

TEST(Market, MinBundlePriceExamples) {
  auto pair = two_goods({{0}, {1}});
  auto q = min_bundle_price(pair, vec({0.3, 0.5}), 0);
  EXPECT_DOUBLE_EQ(q.price, 0.3);
  EXPECT_EQ(q.bundle, 0u);

  auto joint = two_goods({{0, 1}});
  q = min_bundle_price(joint, vec({0.3, 0.5}), 0);
  EXPECT_DOUBLE_EQ(q.price, 0.8);
  EXPECT_EQ(joint.type(0).bundles[q.bundle], (Bundle{0, 1}));

  q = min_bundle_price(pair, vec({0.4, 0.4}), 0);
  EXPECT_DOUBLE_EQ(q.price, 0.4);
  EXPECT_EQ(q.bundle, 0u);
  EXPECT_EQ(cheapest_bundles(pair, vec({0.4, 0.4}), 0).size(), 2u);
}

TEST(Market, BestResponseExamples) {
  auto single = bicrit::testing::single_good(kLinear, kUnitCost);
  EXPECT_NEAR(best_response(single, vec({0.25}))[0], 0.75, 1e-15);
  EXPECT_EQ(best_response(single, vec({1.0}))[0], 0.0);

  auto pair = two_goods({{0}, {1}});
  PricingSolution s = evaluate(pair, vec({0.5, 0.9}));
  EXPECT_NEAR(s.demand[0], 0.5, 1e-15);
  EXPECT_NEAR(s.allocation[0], 0.5, 1e-15);
  EXPECT_EQ(s.allocation[1], 0.0);
}

TEST(Market, MinCostAllocationExamples) {
  auto pair = two_goods({{0}, {1}});
  Allocation a = min_cost_allocation(pair, vec({0.4, 0.4}), vec({1.0}));
  EXPECT_NEAR(a.allocation[0], 0.5, 1e-9);
  EXPECT_NEAR(a.allocation[1], 0.5, 1e-9);

  a = min_cost_allocation(pair, vec({0.3, 0.4}), vec({1.0}));
  EXPECT_DOUBLE_EQ(a.allocation[0], 1.0);
  EXPECT_EQ(a.allocation[1], 0.0);
}

TEST(Market, EvaluateExamples) {
  auto single = bicrit::testing::single_good(kLinear, kUnitCost);
  PricingSolution s = evaluate(single, vec({0.5}));
  EXPECT_NEAR(s.demand[0], 0.5, 1e-15);
  EXPECT_NEAR(s.allocation[0], 0.5, 1e-15);
  EXPECT_NEAR(s.sw, 0.25, 1e-15);
  EXPECT_NEAR(s.profit, 0.125, 1e-15);

  s = evaluate(single, vec({1.0}));
  EXPECT_EQ(s.sw, 0.0);
  EXPECT_EQ(s.profit, 0.0);

  s = evaluate(single, vec({0.75}));
  EXPECT_NEAR(s.demand[0], 0.25, 1e-15);
  EXPECT_NEAR(s.sw, 0.1875, 1e-15);
  EXPECT_NEAR(s.profit, 0.15625, 1e-15);
}

TEST(Market, ValidationCollectsEveryViolation) {
  std::vector<Good> goods{{"a", kUnitCost}, {"a", kUnitCost}};
  std::vector<BuyerType> types{{"t", {{0}, {5}}, kLinear},
                               {"u", {{0}}, InverseDemand::linear(2.0, 1.0)}};
  auto v = MarketInstance::validate(goods, types);
  ASSERT_GE(v.size(), 3u);
  EXPECT_THROW(MarketInstance::create(goods, types), InstanceError);
  bool unknown = false, peak = false, dup = false;
  for (const auto& s : v) {
    unknown = unknown || s.find("bundles[1]") != std::string::npos;
    peak = peak || s.find("uniform peak") != std::string::npos;
    dup = dup || s.find("duplicate") != std::string::npos;
  }
  EXPECT_TRUE(unknown);
  EXPECT_TRUE(peak);
  EXPECT_TRUE(dup);
}

TEST(Market, BundleRatio) {
  auto inst = MarketInstance::create(
      {{"a", kUnitCost}, {"b", kUnitCost}, {"c", kUnitCost}, {"d", kUnitCost}},
      {{"t", {{0}, {0, 1, 2, 3}}, kLinear}});
  EXPECT_EQ(inst.max_bundle_size(), 4u);
  EXPECT_EQ(inst.min_bundle_size(), 1u);
  EXPECT_DOUBLE_EQ(inst.bundle_ratio(), 4.0);
  EXPECT_FALSE(inst.is_unit_demand());
}

TEST(MarketProperty, IncomeIdentity) {
  Rng rng(31);
  for (int k = 0; k < 30; ++k) {
    auto inst = k % 2 ? bicrit::testing::random_multi_minded(rng, 3, 3, 1, 2, 0.0)
                      : bicrit::testing::random_unit_demand(rng, 3, 3, 0.0);
    Vector p(3);
    for (int t = 0; t < 3; ++t) p[t] = bicrit::testing::uniform(rng, 0.05, 0.5);
    PricingSolution s = evaluate(inst, p);
    EXPECT_NEAR(buyer_income(inst, s.demand), p.dot(s.allocation), 1e-9);
    EXPECT_NEAR(s.profit, p.dot(s.allocation) - total_cost(inst, s.allocation), 1e-12);
  }
}

TEST(MarketProperty, EnvyFree) {
  Rng rng(32);
  for (int k = 0; k < 30; ++k) {
    auto inst = bicrit::testing::random_multi_minded(rng, 3, 3, 1, 2, 0.0);
    Vector p(3);
    for (int t = 0; t < 3; ++t) p[t] = bicrit::testing::uniform(rng, 0.0, 0.6);
    PricingSolution s = evaluate(inst, p);
    EXPECT_NEAR((inst.demand_incidence() * s.split - s.demand).cwiseAbs().maxCoeff(), 0.0, 1e-9);
    EXPECT_NEAR((inst.good_incidence() * s.split - s.allocation).cwiseAbs().maxCoeff(), 0.0, 1e-9);
    for (std::size_t sp = 0; sp < inst.num_splits(); ++sp) {
      if (s.split[static_cast<Eigen::Index>(sp)] <= 1e-12) continue;
      std::size_t i = inst.split_type(sp);
      double price = 0.0;
      for (std::size_t g : inst.split_bundle(sp)) price += p[static_cast<Eigen::Index>(g)];
      EXPECT_LE(price, min_bundle_price(inst, p, i).price + kTieTolerance);
    }
  }
}

TEST(MarketProperty, MinCostMatchesFullAllocationProgramOnCheapestBundles) {
  Rng rng(33);
  for (int k = 0; k < 20; ++k) {
    auto inst = bicrit::testing::random_unit_demand(rng, 3, 3, 0.0);
    Vector p = Vector::Constant(3, 0.2);
    Vector x = best_response(inst, p);
    Allocation a = min_cost_allocation(inst, p, x);
    Allocation full = solve_constrained_welfare(inst, x);
    EXPECT_GE(total_cost(inst, a.allocation), total_cost(inst, full.allocation) - 1e-9);
  }
}

TEST(MarketProperty, CostAndAllocationProperties) {
  auto r = bicrit::testing::cost_market_lemmas(20, 6200);
  EXPECT_GT(r.cases, 0u);
  for (const auto& f : r.failures) ADD_FAILURE() << f;
}
