#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "bicrit/io.hpp"
#include "bicrit/welfare_solver.hpp"
#include "support/generators.hpp"

using namespace bicrit;
using bicrit::testing::Rng;

namespace {

const std::string kData = BICRIT_TEST_DATA;

const char* kMinimal = R"({
  "schema_version": "1",
  "goods": [{"id": "g", "cost": {"family": "power", "a": 1, "beta": 1}}],
  "buyer_types": [{"id": "b", "bundles": [["g"]],
                   "demand": {"family": "linear", "lambda_max": 1, "intercept": 1}}]
})";

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  auto pos = text.find(from);
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  return text;
}

bool mentions(const LoadError& e, const std::string& needle) {
  for (const auto& v : e.violations()) {
    if (v.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST(Io, LoadsMinimalInstance) {
  MarketInstance inst = parse_instance(kMinimal);
  EXPECT_EQ(inst.num_goods(), 1u);
  EXPECT_EQ(inst.num_types(), 1u);
  EXPECT_EQ(inst.type(0).demand.family(), DemandFamily::Linear);
}

TEST(Io, LoadsDataFiles) {
  for (const char* f : {"ex1.json", "tiny2good.json", "cheap1good.json", "mm2.json"}) {
    EXPECT_NO_THROW(load_instance(kData + "/" + f)) << f;
  }
  MarketInstance mm = load_instance(kData + "/mm2.json");
  EXPECT_EQ(mm.num_goods(), 3u);
  EXPECT_EQ(mm.good(2).cost.family(), CostFamily::PiecewisePower);
  EXPECT_DOUBLE_EQ(mm.bundle_ratio(), 3.0);
}

TEST(Io, UnknownGoodNamesTheBundle) {
  try {
    parse_instance(replaced(kMinimal, R"([["g"]])", R"([["zz"]])"));
    FAIL();
  } catch (const LoadError& e) {
    EXPECT_TRUE(mentions(e, "buyer_types[0].bundles[0]"));
    EXPECT_TRUE(mentions(e, "zz"));
  }
}

TEST(Io, UniformPeakViolation) {
  std::string text = R"({
    "schema_version": "1",
    "goods": [{"id": "g", "cost": {"family": "power", "a": 1, "beta": 1}}],
    "buyer_types": [
      {"id": "b", "bundles": [["g"]], "demand": {"family": "linear", "lambda_max": 1, "intercept": 1}},
      {"id": "c", "bundles": [["g"]], "demand": {"family": "linear", "lambda_max": 2, "intercept": 1}}]
  })";
  try {
    parse_instance(text);
    FAIL();
  } catch (const LoadError& e) {
    EXPECT_TRUE(mentions(e, "uniform peak"));
    EXPECT_TRUE(mentions(e, "buyer_types[1]"));
  }
}

TEST(Io, SyntaxErrorReportsLineAndColumn) {
  try {
    parse_instance("{\n  \"goods\": [,]\n}");
    FAIL();
  } catch (const LoadError& e) {
    EXPECT_TRUE(mentions(e, "line 2"));
    EXPECT_TRUE(mentions(e, "column"));
  }
}

TEST(Io, CollectsEveryViolation) {
  std::string text = replaced(kMinimal, R"("a": 1)", R"("a": -1)");
  text = replaced(text, R"("intercept": 1)", R"("intercept": "x")");
  try {
    parse_instance(text);
    FAIL();
  } catch (const LoadError& e) {
    EXPECT_GE(e.violations().size(), 2u);
    EXPECT_TRUE(mentions(e, "goods[0].cost"));
    EXPECT_TRUE(mentions(e, "buyer_types[0].demand"));
  }
}

TEST(Io, StrictRejectsUnknownKeys) {
  std::string text = replaced(kMinimal, R"("id": "g",)", R"("id": "g", "colour": "red",)");
  EXPECT_NO_THROW(parse_instance(text));
  LoadOptions strict;
  strict.strict = true;
  try {
    parse_instance(text, strict);
    FAIL();
  } catch (const LoadError& e) {
    EXPECT_TRUE(mentions(e, "goods[0].colour"));
  }
}

TEST(Io, SchemaVersionChecked) {
  EXPECT_THROW(parse_instance(replaced(kMinimal, R"("schema_version": "1")", R"("schema_version": "9")")),
               LoadError);
}

TEST(Io, RandomInstancesRoundTrip) {
  Rng rng(91);
  for (int k = 0; k < 30; ++k) {
    auto inst = k % 2 ? bicrit::testing::random_multi_minded(rng, 4, 3, 1, 2, 0.5)
                      : bicrit::testing::random_unit_demand(rng, 3, 4, 0.25);
    Json j = instance_to_json(inst);
    MarketInstance back = parse_instance(j.dump());
    EXPECT_EQ(instance_to_json(back), j);
    EXPECT_EQ(instance_hash(back), instance_hash(inst));
    for (std::size_t i = 0; i < inst.num_types(); ++i) {
      const auto& a = inst.type(i).demand;
      const auto& b = back.type(i).demand;
      for (double f : {0.0, 0.1, 0.5, 0.9}) {
        double x = f * a.support_ceiling();
        EXPECT_NEAR(eval(a, x), eval(b, x), 1e-12);
      }
    }
  }
}

TEST(Io, SaveThenLoad) {
  auto dir = std::filesystem::path(BICRIT_SCRATCH_DIR);
  std::filesystem::create_directories(dir);
  MarketInstance a = load_instance(kData + "/mm2.json");
  save_instance(a, (dir / "mm2_copy.json").string());
  MarketInstance b = load_instance((dir / "mm2_copy.json").string());
  EXPECT_EQ(instance_hash(a), instance_hash(b));
  EXPECT_NEAR(solve_welfare(a).sw, solve_welfare(b).sw, 1e-12);
}

TEST(Io, RoundingTo12SignificantDigits) {
  EXPECT_DOUBLE_EQ(round_sig(1.0 / 3.0), 0.333333333333);
  EXPECT_DOUBLE_EQ(round_sig(123456.7891234567), 123456.789123);
  EXPECT_TRUE(std::isinf(round_sig(std::numeric_limits<double>::infinity())));
  Json j = {{"a", 2.0 / 3.0}, {"b", {1.0 / 7.0, 5}}};
  EXPECT_EQ(dump(j), dump(rounded(j)));
  EXPECT_EQ(rounded(j)["b"][0].get<double>(), round_sig(1.0 / 7.0));
}

TEST(Io, HashIsStableAndSensitive) {
  MarketInstance a = parse_instance(kMinimal);
  EXPECT_EQ(instance_hash(a), instance_hash(parse_instance(kMinimal)));
  EXPECT_EQ(instance_hash(a).size(), 16u);
  MarketInstance b = parse_instance(replaced(kMinimal, R"("a": 1)", R"("a": 2)"));
  EXPECT_NE(instance_hash(a), instance_hash(b));
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
}

TEST(Io, PricesFromJson) {
  MarketInstance inst = load_instance(kData + "/tiny2good.json");
  Vector p = prices_from_json(inst, Json::parse(R"({"a": 0.25, "b": 0.5})"));
  EXPECT_DOUBLE_EQ(p[0], 0.25);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
  EXPECT_THROW(prices_from_json(inst, Json::parse(R"({"a": 0.25})")), LoadError);
  EXPECT_THROW(prices_from_json(inst, Json::parse(R"({"a": 0.25, "b": 1, "c": 2})")), LoadError);
}

TEST(Io, FixtureFileRoundTrip) {
  auto path = (std::filesystem::path(BICRIT_SCRATCH_DIR) / "records.json").string();
  std::filesystem::create_directories(BICRIT_SCRATCH_DIR);
  std::vector<FixtureRecord> recs{{"00ff", "max_welfare", 0.25}, {"00ff", "max_profit", 1.0 / 3.0}};
  save_fixtures(path, recs);
  auto back = load_fixtures(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].quantity, "max_profit");
  EXPECT_NEAR(back[1].value, 1.0 / 3.0, 1e-12);
}
