#include <gtest/gtest.h>

#include "bicrit/analysis.hpp"
#include "bicrit/io.hpp"
#include "bicrit/oracle.hpp"
#include "bicrit/unit_demand.hpp"
#include "bicrit/welfare_solver.hpp"
#include "support/generators.hpp"
#include "support/oracle_cases.hpp"
#include "support/suites.hpp"

using namespace bicrit;

namespace {

const InverseDemand kLinear = InverseDemand::linear(1.0, 1.0);
const CostFunction kUnitCost = CostFunction::power(1.0, 1.0);

}  // namespace

TEST(Oracle, PriceAxisIncludesPeak) {
  auto inst = bicrit::testing::single_good(kLinear, kUnitCost);
  auto axis = price_axis(inst, GridSpec{});
  EXPECT_EQ(axis.size(), 101u);
  EXPECT_EQ(axis.front(), 0.0);
  EXPECT_EQ(axis.back(), 1.0);
  GridSpec odd;
  odd.price_step = 0.3;
  EXPECT_EQ(price_axis(inst, odd), (std::vector<double>{0.0, 0.3, 0.6, 0.8999999999999999, 1.0}));
}

TEST(Oracle, MaxWelfareSingleGood) {
  auto r = oracle_max_welfare(bicrit::testing::single_good(kLinear, kUnitCost));
  EXPECT_NEAR(r.value, 0.25, 3e-3);
  EXPECT_NEAR(r.prices[0], 0.5, 1e-12);
}

TEST(Oracle, MaxWelfareSymmetricPair) {
  auto r = oracle_max_welfare(bicrit::testing::either_of_two(kLinear, kUnitCost));
  EXPECT_NEAR(r.value, 1.0 / 3.0, 5e-3);
}

TEST(Oracle, NegligibleWelfare) {
  auto r = oracle_max_welfare(bicrit::testing::single_good(kLinear, CostFunction::power(1e9, 1.0)));
  EXPECT_NEAR(r.value, 0.0, 1e-6);
}

TEST(Oracle, ProfitAtPeakIsZero) {
  auto inst = bicrit::testing::single_good(kLinear, kUnitCost);
  EXPECT_EQ(oracle_evaluate(inst, Vector::Constant(1, 1.0)).profit, 0.0);
}

TEST(Oracle, CapsEnforced) {
  std::vector<Good> goods;
  for (int t = 0; t < 4; ++t) goods.push_back({"g" + std::to_string(t), kUnitCost});
  auto inst = MarketInstance::create(goods, {{"t", {{0}, {1}, {2}, {3}}, kLinear}});
  EXPECT_THROW(oracle_max_welfare(inst), OracleCapError);
  GridSpec wide;
  wide.max_goods = 4;
  wide.price_step = 0.25;
  EXPECT_NO_THROW(oracle_max_welfare(inst, wide));
}

TEST(Oracle, TiesGoToSmallestPriceVector) {
  // Symmetric goods: mirrored price vectors score the same.
  auto inst = bicrit::testing::either_of_two(kLinear, kUnitCost);
  GridSpec g;
  g.price_step = 0.1;
  auto r = oracle_max_profit(inst, g);
  EXPECT_LE(r.prices[0], r.prices[1]);
  GridSpec one_thread = g;
  one_thread.threads = 1;
  GridSpec many = g;
  many.threads = 5;
  EXPECT_EQ(oracle_max_profit(inst, one_thread).prices, oracle_max_profit(inst, many).prices);
}

TEST(Oracle, MinCostSplitsTiedDemandEvenly) {
  auto inst = bicrit::testing::either_of_two(kLinear, kUnitCost);
  Allocation a = oracle_min_cost(inst, Vector::Constant(2, 0.4), Vector::Constant(1, 1.0));
  EXPECT_NEAR(a.allocation[0], 0.5, 1e-6);
  EXPECT_NEAR(a.allocation[1], 0.5, 1e-6);
}

TEST(Oracle, MinCostSharedGoodMatchesAllocationProgram) {
  auto inst = MarketInstance::create(
      {{"a", CostFunction::power(1.0, 1.0)}, {"b", CostFunction::power(2.0, 1.0)},
       {"c", CostFunction::power(0.5, 2.0)}},
      {{"t", {{0}, {1}}, kLinear}, {"u", {{1}, {2}}, kLinear}, {"v", {{0}, {2}}, kLinear}});
  Vector p = Vector::Constant(3, 0.2);
  Vector x = best_response(inst, p);
  double grid = total_cost(inst, oracle_min_cost(inst, p, x).allocation);
  double solver = total_cost(inst, min_cost_allocation(inst, p, x).allocation);
  double program = total_cost(inst, solve_constrained_welfare(inst, x).allocation);
  EXPECT_NEAR(grid, solver, 1e-3);
  EXPECT_NEAR(grid, program, 1e-3);
}

TEST(OracleFixtures, OracleEquivalence) {
  auto r = bicrit::testing::oracle_equivalence(BICRIT_FIXTURE_FILE);
  EXPECT_GE(r.cases, 20u);
  for (const auto& f : r.failures) ADD_FAILURE() << f;
}

TEST(OracleFixtures, NearFreeGoodProfitGap) {
  auto r = bicrit::testing::near_free_good_profit(BICRIT_FIXTURE_FILE);
  for (const auto& f : r.failures) ADD_FAILURE() << f;
}

TEST(OracleFixtures, ProfitMaximizerRespectsCrossCertificate) {
  const auto records = load_fixtures(BICRIT_FIXTURE_FILE);
  for (const auto& c : bicrit::testing::oracle_cases()) {
    if (!c.inst.is_unit_demand()) continue;
    const double alpha = c.inst.alpha();
    auto ours = price_unit_demand(c.inst, alpha);
    const double best = bicrit::testing::fixture_value(records, instance_hash(c.inst), "max_profit");
    EXPECT_GE(best, ours.solution.profit - 1e-3) << c.name;
    auto cert = certify_cross(c.inst, std::max(best, ours.solution.profit), ours.solution,
                              ours.optimum.sw, alpha);
    EXPECT_TRUE(cert.granted) << c.name;
    auto grid = oracle_max_profit(c.inst, c.grid);
    EXPECT_GE(grid.solution.sw, cert.welfare_floor - 1e-6) << c.name;
  }
}
