#include <gtest/gtest.h>

#include <cmath>

#include "bicrit/analysis.hpp"
#include "bicrit/unit_demand.hpp"
#include "support/generators.hpp"
#include "support/suites.hpp"

using namespace bicrit;

namespace {

const InverseDemand kLinear = InverseDemand::linear(1.0, 1.0);

MarketInstance single(double a) {
  return bicrit::testing::single_good(kLinear, CostFunction::power(a, 1.0));
}

}  // namespace

TEST(ThresholdPrice, Examples) {
  EXPECT_NEAR(threshold_price(0.5, 1.0), 0.25, 1e-15);
  EXPECT_NEAR(threshold_price(0.0, 1.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(threshold_price(1e-12, 1.0), std::exp(-1.0), 1e-9);
  EXPECT_EQ(threshold_price(1.0, 1.0), 0.0);
  EXPECT_NEAR(threshold_price(0.5, 2.0), 0.5, 1e-15);
}

TEST(ThresholdPrice, Domain) {
  EXPECT_THROW(threshold_price(-0.1, 1.0), std::domain_error);
  EXPECT_THROW(threshold_price(1.1, 1.0), std::domain_error);
}

TEST(PriceUnitDemand, ExpensiveGoodKeepsOptimum) {
  auto r = price_unit_demand(single(1.0), 0.0);
  EXPECT_NEAR(r.solution.prices[0], 0.5, 1e-9);
  EXPECT_NEAR(r.solution.sw, 0.25, 1e-9);
  EXPECT_NEAR(r.solution.profit, 0.125, 1e-9);
  EXPECT_NEAR(r.optimum.sw / r.solution.profit, 2.0, 1e-8);
  EXPECT_EQ(r.thresholded.good_cluster[0], Cluster::High);
}

TEST(PriceUnitDemand, CheapGoodRaisedToThreshold) {
  auto r = price_unit_demand(single(0.01), 0.0);
  const double p = std::exp(-1.0);
  const double x = 1.0 - p;
  EXPECT_NEAR(r.solution.prices[0], p, 1e-12);
  EXPECT_NEAR(r.solution.demand[0], x, 1e-12);
  EXPECT_NEAR(r.solution.profit, p * x - 0.005 * x * x, 1e-12);
  EXPECT_NEAR(r.solution.sw, x - 0.5 * x * x - 0.005 * x * x, 1e-12);
  EXPECT_NEAR(r.solution.profit, 0.230546, 1e-6);
  EXPECT_NEAR(r.solution.sw, 0.430334, 1e-6);
  EXPECT_NEAR(r.optimum.sw / r.solution.profit, 2.147, 1e-3);
  EXPECT_NEAR(r.optimum.sw / r.solution.sw, 1.150, 1e-3);
  EXPECT_LE(r.optimum.sw / r.solution.profit, zeta(0.0));
  EXPECT_EQ(r.thresholded.good_cluster[0], Cluster::Low);
}

TEST(PriceUnitDemand, AllPricesAboveThresholdGiveOptimum) {
  auto inst = MarketInstance::create(
      {{"a", CostFunction::power(2.0, 1.0)}, {"b", CostFunction::power(3.0, 1.0)}},
      {{"t", {{0}, {1}}, kLinear}, {"u", {{1}}, kLinear}});
  auto r = price_unit_demand(inst, 0.0);
  EXPECT_NEAR((r.solution.prices - r.optimum.prices).norm(), 0.0, 1e-12);
  EXPECT_NEAR(r.solution.sw, r.optimum.sw, 1e-9);
}

TEST(PriceUnitDemand, RejectsBundles) {
  auto inst = MarketInstance::create(
      {{"a", CostFunction::power(1.0, 1.0)}, {"b", CostFunction::power(1.0, 1.0)}},
      {{"t", {{0, 1}}, kLinear}});
  EXPECT_THROW(price_unit_demand(inst, 0.0), std::invalid_argument);
}

TEST(ClusterDiagnostics, SingleGoodHigh) {
  auto inst = single(1.0);
  auto r = price_unit_demand(inst, 0.0);
  auto rep = cluster_diagnostics(inst, r.thresholded, r.solution, r.optimum);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.high_goods, 1u);
  EXPECT_EQ(rep.high_types, 1u);
}

TEST(ClusterDiagnostics, SingleGoodLow) {
  auto inst = single(0.01);
  auto r = price_unit_demand(inst, 0.0);
  auto rep = cluster_diagnostics(inst, r.thresholded, r.solution, r.optimum);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.low_goods, 1u);
  EXPECT_LE(r.solution.demand[0], r.optimum.demand[0]);
}

TEST(ClusterDiagnostics, MixedMarketHasBothClusters) {
  auto inst = MarketInstance::create(
      {{"cheap", CostFunction::power(0.01, 1.0)}, {"dear", CostFunction::power(1.0, 1.0)}},
      {{"t", {{0}}, kLinear}, {"u", {{1}}, kLinear}});
  auto r = price_unit_demand(inst, 0.0);
  EXPECT_LT(r.optimum.prices[0], r.thresholded.primary_price);
  EXPECT_GT(r.optimum.prices[1], r.thresholded.primary_price);
  auto rep = cluster_diagnostics(inst, r.thresholded, r.solution, r.optimum);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.high_goods, 1u);
  EXPECT_EQ(rep.low_goods, 1u);
  EXPECT_EQ(rep.high_types, 1u);
  EXPECT_EQ(rep.low_types, 1u);
}

TEST(ClusterDiagnostics, FlagsTamperedSolution) {
  auto inst = single(1.0);
  auto r = price_unit_demand(inst, 0.0);
  PricingSolution bad = r.solution;
  bad.demand[0] *= 0.5;
  bad.allocation[0] *= 0.5;
  bad.split[0] *= 0.5;
  EXPECT_FALSE(cluster_diagnostics(inst, r.thresholded, bad, r.optimum).ok());
}

class UnitDemandGuarantee : public ::testing::TestWithParam<double> {};

TEST_P(UnitDemandGuarantee, RandomMarkets) {
  auto r = bicrit::testing::unit_demand_guarantees(GetParam(), 50, 7100 + static_cast<int>(100 * GetParam()));
  EXPECT_EQ(r.cases, 150u);
  for (const auto& f : r.failures) ADD_FAILURE() << f;
}

INSTANTIATE_TEST_SUITE_P(Alphas, UnitDemandGuarantee, ::testing::Values(0.0, 0.25, 0.5, 0.75));
