#include "bicrit/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <sstream>

namespace bicrit {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s = fmt::format("invalid instance file ({} problem{})", v.size(),
                              v.size() == 1 ? "" : "s");
  for (const auto& line : v) s += "\n  - " + line;
  return s;
}

class Reader {
 public:
  Reader(std::vector<std::string>& out, bool strict) : out_(out), strict_(strict) {}

  void fail(const std::string& path, const std::string& msg) { out_.push_back(path + ": " + msg); }

  bool object(const Json& j, const std::string& path) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    return true;
  }

  void keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!strict_) return;
    for (const auto& [key, value] : j.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || key == a;
      if (!known) fail(path + "." + key, "unknown key");
    }
  }

  std::optional<double> number(const Json& j, const std::string& path, const char* key,
                               bool required = true) {
    auto it = j.find(key);
    if (it == j.end()) {
      if (required) fail(path + "." + key, "missing required number");
      return std::nullopt;
    }
    if (!it->is_number()) {
      fail(path + "." + key, "expected a number");
      return std::nullopt;
    }
    return it->get<double>();
  }

  std::optional<std::string> text(const Json& j, const std::string& path, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      fail(path + "." + key, it == j.end() ? "missing required string" : "expected a string");
      return std::nullopt;
    }
    return it->get<std::string>();
  }

 private:
  std::vector<std::string>& out_;
  bool strict_;
};

std::optional<CostFunction> read_cost(Reader& r, const Json& j, const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  auto family = r.text(j, path, "family");
  if (!family) return std::nullopt;
  try {
    switch (cost_family_from_string(*family)) {
      case CostFamily::Power: {
        r.keys(j, path, {"family", "a", "beta"});
        auto a = r.number(j, path, "a");
        auto beta = r.number(j, path, "beta");
        if (!a || !beta) return std::nullopt;
        return CostFunction::power(*a, *beta);
      }
      case CostFamily::PiecewisePower: {
        r.keys(j, path, {"family", "pieces"});
        auto it = j.find("pieces");
        if (it == j.end() || !it->is_array()) {
          r.fail(path + ".pieces", "expected an array of pieces");
          return std::nullopt;
        }
        std::vector<CostPiece> pieces;
        bool ok = true;
        for (std::size_t k = 0; k < it->size(); ++k) {
          const std::string pp = fmt::format("{}.pieces[{}]", path, k);
          const Json& pj = (*it)[k];
          if (!r.object(pj, pp)) {
            ok = false;
            continue;
          }
          r.keys(pj, pp, {"breakpoint", "a", "beta"});
          auto b = r.number(pj, pp, "breakpoint");
          auto a = r.number(pj, pp, "a");
          auto beta = r.number(pj, pp, "beta");
          if (!b || !a || !beta) {
            ok = false;
            continue;
          }
          pieces.push_back({*b, *a, *beta});
        }
        if (!ok) return std::nullopt;
        return CostFunction::piecewise_power(std::move(pieces));
      }
    }
  } catch (const std::exception& e) {
    r.fail(path, e.what());
  }
  return std::nullopt;
}

std::optional<InverseDemand> read_demand(Reader& r, const Json& j, const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  auto family = r.text(j, path, "family");
  if (!family) return std::nullopt;
  try {
    std::optional<InverseDemand> d;
    switch (demand_family_from_string(*family)) {
      case DemandFamily::Linear: {
        r.keys(j, path, {"family", "lambda_max", "intercept", "support_ceiling", "declared_alpha"});
        auto lm = r.number(j, path, "lambda_max");
        auto s = r.number(j, path, "intercept");
        if (lm && s) d = InverseDemand::linear(*lm, *s);
        break;
      }
      case DemandFamily::Exponential: {
        r.keys(j, path, {"family", "lambda_max", "scale", "floor_ratio", "support_ceiling",
                         "declared_alpha"});
        auto lm = r.number(j, path, "lambda_max");
        auto s = r.number(j, path, "scale");
        auto fr = r.number(j, path, "floor_ratio", false);
        if (lm && s) d = InverseDemand::exponential(*lm, *s, fr.value_or(kDefaultFloorRatio));
        break;
      }
      case DemandFamily::GeneralizedPareto: {
        r.keys(j, path, {"family", "lambda_max", "alpha", "scale", "floor_ratio",
                         "support_ceiling", "declared_alpha"});
        auto lm = r.number(j, path, "lambda_max");
        auto a = r.number(j, path, "alpha");
        auto s = r.number(j, path, "scale");
        auto fr = r.number(j, path, "floor_ratio", false);
        if (lm && a && s) {
          d = InverseDemand::generalized_pareto(*lm, *a, *s, fr.value_or(kDefaultFloorRatio));
        }
        break;
      }
      case DemandFamily::Tabulated: {
        r.keys(j, path, {"family", "points", "alpha", "support_ceiling", "declared_alpha"});
        auto a = r.number(j, path, "alpha");
        auto it = j.find("points");
        std::vector<TablePoint> pts;
        bool ok = true;
        if (it == j.end() || !it->is_array()) {
          r.fail(path + ".points", "expected an array of [x, price] pairs");
          ok = false;
        } else {
          for (std::size_t k = 0; k < it->size(); ++k) {
            const Json& p = (*it)[k];
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
              r.fail(fmt::format("{}.points[{}]", path, k), "expected [x, price]");
              ok = false;
              continue;
            }
            pts.push_back({p[0].get<double>(), p[1].get<double>()});
          }
        }
        if (ok && a) d = InverseDemand::tabulated(std::move(pts), *a);
        break;
      }
    }
    if (!d) return std::nullopt;
    if (auto c = r.number(j, path, "support_ceiling", false)) d = d->with_support_ceiling(*c);
    if (auto a = r.number(j, path, "declared_alpha", false)) d = d->with_declared_alpha(*a);
    return d;
  } catch (const std::exception& e) {
    r.fail(path, e.what());
  }
  return std::nullopt;
}

void line_and_column(const std::string& text, std::size_t byte, std::size_t& line,
                     std::size_t& col) {
  line = 1;
  col = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
}

}  // namespace

LoadError::LoadError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

MarketInstance parse_instance(const std::string& text, const LoadOptions& opts) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 0, col = 0;
    line_and_column(text, e.byte, line, col);
    throw LoadError({fmt::format("line {}, column {}: {}", line, col, e.what())});
  }

  std::vector<std::string> problems;
  Reader r(problems, opts.strict);
  if (!r.object(root, "$")) throw LoadError(problems);
  r.keys(root, "$", {"schema_version", "goods", "buyer_types", "metadata"});
  if (auto v = r.text(root, "$", "schema_version"); v && *v != kSchemaVersion) {
    r.fail("$.schema_version", fmt::format("unsupported version '{}' (expected '{}')", *v,
                                           kSchemaVersion));
  }

  std::vector<Good> goods;
  std::map<std::string, std::size_t> index;
  bool complete = true;
  auto git = root.find("goods");
  if (git == root.end() || !git->is_array()) {
    r.fail("goods", "expected an array");
    complete = false;
  } else {
    for (std::size_t t = 0; t < git->size(); ++t) {
      const std::string path = fmt::format("goods[{}]", t);
      const Json& gj = (*git)[t];
      if (!r.object(gj, path)) {
        complete = false;
        continue;
      }
      r.keys(gj, path, {"id", "cost"});
      auto id = r.text(gj, path, "id");
      std::optional<CostFunction> cost;
      if (gj.contains("cost")) {
        cost = read_cost(r, gj["cost"], path + ".cost");
      } else {
        r.fail(path + ".cost", "missing required object");
      }
      if (!id || !cost) {
        complete = false;
        continue;
      }
      index.emplace(*id, goods.size());
      goods.push_back({*id, *cost});
    }
  }

  std::vector<BuyerType> types;
  auto tit = root.find("buyer_types");
  if (tit == root.end() || !tit->is_array()) {
    r.fail("buyer_types", "expected an array");
    complete = false;
  } else {
    for (std::size_t i = 0; i < tit->size(); ++i) {
      const std::string path = fmt::format("buyer_types[{}]", i);
      const Json& bj = (*tit)[i];
      if (!r.object(bj, path)) {
        complete = false;
        continue;
      }
      r.keys(bj, path, {"id", "bundles", "demand"});
      auto id = r.text(bj, path, "id");
      std::vector<Bundle> bundles;
      bool ok = true;
      auto bit = bj.find("bundles");
      if (bit == bj.end() || !bit->is_array()) {
        r.fail(path + ".bundles", "expected an array of bundles");
        ok = false;
      } else {
        for (std::size_t k = 0; k < bit->size(); ++k) {
          const std::string bpath = fmt::format("{}.bundles[{}]", path, k);
          const Json& b = (*bit)[k];
          if (!b.is_array()) {
            r.fail(bpath, "expected an array of good ids");
            ok = false;
            continue;
          }
          Bundle bundle;
          for (const auto& g : b) {
            if (!g.is_string()) {
              r.fail(bpath, "good ids must be strings");
              ok = false;
              continue;
            }
            auto found = index.find(g.get<std::string>());
            if (found == index.end()) {
              r.fail(bpath, fmt::format("references unknown good '{}'", g.get<std::string>()));
              ok = false;
              continue;
            }
            bundle.push_back(found->second);
          }
          bundles.push_back(std::move(bundle));
        }
      }
      std::optional<InverseDemand> demand;
      if (bj.contains("demand")) {
        demand = read_demand(r, bj["demand"], path + ".demand");
      } else {
        r.fail(path + ".demand", "missing required object");
      }
      if (!id || !ok || !demand) {
        complete = false;
        continue;
      }
      types.push_back({*id, std::move(bundles), *demand});
    }
  }

  if (complete) {
    for (auto& b : types) {
      for (auto& bundle : b.bundles) std::sort(bundle.begin(), bundle.end());
    }
    auto more = MarketInstance::validate(goods, types);
    problems.insert(problems.end(), more.begin(), more.end());
  }
  if (!problems.empty()) throw LoadError(std::move(problems));
  return MarketInstance::create(std::move(goods), std::move(types));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

MarketInstance load_instance(const std::string& path, const LoadOptions& opts) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw LoadError({e.what()});
  }
  return parse_instance(text, opts);
}

namespace {

Json cost_to_json(const CostFunction& c) {
  Json j;
  j["family"] = std::string(to_string(c.family()));
  if (c.family() == CostFamily::Power) {
    j["a"] = c.a();
    j["beta"] = c.beta();
  } else {
    j["pieces"] = Json::array();
    for (const auto& p : c.pieces()) {
      j["pieces"].push_back({{"breakpoint", p.breakpoint}, {"a", p.a}, {"beta", p.beta}});
    }
  }
  return j;
}

Json demand_to_json(const InverseDemand& d) {
  Json j;
  j["family"] = std::string(to_string(d.family()));
  double native = 0.0;
  switch (d.family()) {
    case DemandFamily::Linear:
      j["lambda_max"] = d.lambda_max();
      j["intercept"] = d.scale();
      break;
    case DemandFamily::Exponential:
      j["lambda_max"] = d.lambda_max();
      j["scale"] = d.scale();
      j["floor_ratio"] = d.floor_ratio();
      break;
    case DemandFamily::GeneralizedPareto:
      j["lambda_max"] = d.lambda_max();
      j["alpha"] = d.shape();
      j["scale"] = d.scale();
      j["floor_ratio"] = d.floor_ratio();
      native = d.shape();
      break;
    case DemandFamily::Tabulated:
      j["points"] = Json::array();
      for (const auto& p : d.table()) j["points"].push_back(Json::array({p.x, p.price}));
      j["alpha"] = d.alpha();
      native = d.alpha();
      break;
  }
  if (d.ceiling_is_explicit()) j["support_ceiling"] = d.support_ceiling();
  if (d.alpha() != native) j["declared_alpha"] = d.alpha();
  return j;
}

}  // namespace

Json instance_to_json(const MarketInstance& inst) {
  Json root;
  root["schema_version"] = kSchemaVersion;
  root["goods"] = Json::array();
  for (const auto& g : inst.goods()) {
    root["goods"].push_back({{"id", g.id}, {"cost", cost_to_json(g.cost)}});
  }
  root["buyer_types"] = Json::array();
  for (const auto& bt : inst.types()) {
    Json bundles = Json::array();
    for (const auto& b : bt.bundles) {
      Json ids = Json::array();
      for (std::size_t g : b) ids.push_back(inst.good(g).id);
      bundles.push_back(std::move(ids));
    }
    root["buyer_types"].push_back(
        {{"id", bt.id}, {"bundles", std::move(bundles)}, {"demand", demand_to_json(bt.demand)}});
  }
  root["metadata"] = Json::object();
  return root;
}

void save_instance(const MarketInstance& inst, const std::string& path) {
  write_file(path, instance_to_json(inst).dump(2) + "\n");
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string instance_hash(const MarketInstance& inst) {
  return fmt::format("{:016x}", fnv1a(instance_to_json(inst).dump()));
}

double round_sig(double v, int digits) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // drop negative zero
}

Json rounded(const Json& j) {
  if (j.is_number_float()) return round_sig(j.get<double>());
  if (j.is_array() || j.is_object()) {
    Json out = j;
    for (auto& [key, value] : out.items()) value = rounded(value);
    return out;
  }
  return j;
}

std::string dump(const Json& j) { return rounded(j).dump(2) + "\n"; }

Json solution_to_json(const MarketInstance& inst, const PricingSolution& sol) {
  Json j;
  Json prices = Json::object(), alloc = Json::object(), demand = Json::object();
  for (std::size_t t = 0; t < inst.num_goods(); ++t) {
    const auto k = static_cast<Eigen::Index>(t);
    prices[inst.good(t).id] = sol.prices[k];
    alloc[inst.good(t).id] = sol.allocation[k];
  }
  for (std::size_t i = 0; i < inst.num_types(); ++i) {
    demand[inst.type(i).id] = sol.demand[static_cast<Eigen::Index>(i)];
  }
  Json split = Json::array();
  for (std::size_t s = 0; s < inst.num_splits(); ++s) {
    const double v = sol.split[static_cast<Eigen::Index>(s)];
    if (v <= 0.0) continue;
    Json ids = Json::array();
    for (std::size_t g : inst.split_bundle(s)) ids.push_back(inst.good(g).id);
    split.push_back(
        {{"type", inst.type(inst.split_type(s)).id}, {"bundle", std::move(ids)}, {"amount", v}});
  }
  j["prices"] = std::move(prices);
  j["demand"] = std::move(demand);
  j["allocation"] = std::move(alloc);
  j["split"] = std::move(split);
  j["sw"] = sol.sw;
  j["profit"] = sol.profit;
  return j;
}

Vector prices_from_json(const MarketInstance& inst, const Json& j) {
  std::vector<std::string> problems;
  if (!j.is_object()) throw LoadError({"prices: expected an object keyed by good id"});
  Vector p(static_cast<Eigen::Index>(inst.num_goods()));
  for (std::size_t t = 0; t < inst.num_goods(); ++t) {
    auto it = j.find(inst.good(t).id);
    if (it == j.end() || !it->is_number()) {
      problems.push_back("prices." + inst.good(t).id + ": missing or not a number");
      continue;
    }
    p[static_cast<Eigen::Index>(t)] = it->get<double>();
  }
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto& g : inst.goods()) known = known || g.id == key;
    if (!known) problems.push_back("prices." + key + ": unknown good");
  }
  if (!problems.empty()) throw LoadError(std::move(problems));
  return p;
}

void save_fixtures(const std::string& path, const std::vector<FixtureRecord>& records) {
  Json j;
  j["records"] = Json::array();
  for (const auto& r : records) {
    j["records"].push_back(
        {{"instance_hash", r.instance_hash}, {"quantity", r.quantity}, {"value", r.value}});
  }
  write_file(path, j.dump(2) + "\n");
}

std::vector<FixtureRecord> load_fixtures(const std::string& path) {
  Json j = Json::parse(read_file(path));
  std::vector<FixtureRecord> out;
  for (const auto& r : j.at("records")) {
    out.push_back({r.at("instance_hash").get<std::string>(), r.at("quantity").get<std::string>(),
                   r.at("value").get<double>()});
  }
  return out;
}

}  // namespace bicrit
