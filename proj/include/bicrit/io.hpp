#pragma once

// JSON instance files, result records and oracle fixture files.
//
// Instance layout (schema_version "1"):
//
//   {
//     "schema_version": "1",
//     "goods": [{"id": "g", "cost": {"family": "power", "a": 1, "beta": 1}}],
//     "buyer_types": [{"id": "b", "bundles": [["g"]],
//                      "demand": {"family": "linear", "lambda_max": 1, "intercept": 1}}],
//     "metadata": {}
//   }
//
// Cost families: power {a, beta}; piecewise-power {pieces: [{breakpoint, a, beta}]}.
// Demand families: linear {lambda_max, intercept}; exponential {lambda_max, scale,
// floor_ratio?}; generalized-pareto {lambda_max, alpha, scale, floor_ratio?};
// tabulated {points: [[x, price], ...], alpha}.  Every demand accepts the
// optional keys support_ceiling and declared_alpha.

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bicrit/market.hpp"
#include "bicrit/oracle.hpp"

namespace bicrit {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

struct LoadOptions {
  /// Reject keys outside the documented layout.
  bool strict = false;
};

/// Parse or validation failure; `violations()` lists every problem found,
/// each prefixed by its field path (or line and column for syntax errors).
class LoadError : public std::runtime_error {
 public:
  explicit LoadError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

MarketInstance parse_instance(const std::string& text, const LoadOptions& opts = {});
MarketInstance load_instance(const std::string& path, const LoadOptions& opts = {});

Json instance_to_json(const MarketInstance& inst);
void save_instance(const MarketInstance& inst, const std::string& path);

/// FNV-1a (64 bit, hex) of the canonical instance JSON.
std::string instance_hash(const MarketInstance& inst);
std::uint64_t fnv1a(const std::string& bytes);

/// Round to 12 significant digits; non-finite values pass through.
double round_sig(double v, int digits = 12);

/// Recursively round every floating-point number in `j`.
Json rounded(const Json& j);

/// Indented dump of rounded(j) with a trailing newline.
std::string dump(const Json& j);

/// Prices, demand, consumption and split keyed by id, plus sw and profit.
Json solution_to_json(const MarketInstance& inst, const PricingSolution& sol);

/// Parse a price vector given as {"good_id": price, ...}.
Vector prices_from_json(const MarketInstance& inst, const Json& j);

void save_fixtures(const std::string& path, const std::vector<FixtureRecord>& records);
std::vector<FixtureRecord> load_fixtures(const std::string& path);

/// Write `text` to `path`, throwing std::runtime_error on failure.
void write_file(const std::string& path, const std::string& text);
std::string read_file(const std::string& path);

}  // namespace bicrit
