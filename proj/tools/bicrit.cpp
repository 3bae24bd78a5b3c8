// bicrit: welfare and profit pricing for envy-free markets.
//
// Subcommands: solve-welfare, price-ud, price-mm, evaluate, sweep, verify.
// Exit status: 0 ok, 1 invalid input, 2 solver failure, 3 violated bound.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "bicrit/analysis.hpp"
#include "bicrit/io.hpp"
#include "bicrit/multi_minded.hpp"
#include "bicrit/oracle.hpp"
#include "bicrit/unit_demand.hpp"
#include "bicrit/welfare_solver.hpp"

using namespace bicrit;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kSolver = 2, kViolation = 3 };

struct Options {
  std::string in;
  std::string out;
  std::optional<double> alpha;
  std::string alpha_range = "0:0.9:0.1";
  std::optional<double> c;
  double tol = SolverConfig{}.tol;
  std::size_t max_iters = SolverConfig{}.max_iters;
  std::optional<double> grid_step;
  bool strict = false;
  bool diagnostics = false;
  std::string ladder_dump;
  std::string prices;
};

Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "unbounded" : "-unbounded";
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_file(o.out, text);
  }
}

SolverConfig solver_config(const Options& o) { return {o.max_iters, o.tol}; }

double alpha_for(const Options& o, const MarketInstance& inst) {
  double a = o.alpha.value_or(inst.alpha());
  if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("--alpha must lie in [0, 1]");
  return a;
}

Json certificate_to_json(const GuaranteeCertificate& c) {
  Json j;
  j["alpha"] = c.alpha;
  j["zeta"] = number(c.zeta);
  j["welfare_factor"] = number(c.welfare_factor);
  j["mm_profit_factor"] = number(c.mm_profit_factor);
  j["mm_welfare_factor"] = number(c.mm_welfare_factor);
  j["sw_star"] = c.sw_star;
  j["achieved_welfare_ratio"] = number(c.achieved_welfare_ratio);
  j["achieved_profit_ratio"] = number(c.achieved_profit_ratio);
  j["measured_c"] = number(c.measured_c);
  j["tradeoff_revenue_at_c"] = number(c.tradeoff_revenue_at_c);
  j["verdicts"] = Json::array();
  for (const auto& v : c.verdicts) {
    j["verdicts"].push_back({{"bound", v.name},
                             {"achieved", number(v.achieved)},
                             {"factor", number(v.bound)},
                             {"verdict", v.unbounded ? "UNBOUNDED" : (v.pass ? "PASS" : "FAIL")}});
  }
  j["verdict"] = c.pass() ? "PASS" : "FAIL";
  return j;
}

Json rung_to_json(const MarketInstance& inst, const LadderSolution& r, bool full) {
  Json j;
  j["index"] = r.index;
  j["dummy_price"] = r.dummy_price;
  j["sw"] = r.solution.sw;
  j["profit"] = r.solution.profit;
  Json sat = Json::array();
  for (std::size_t t : r.saturated) sat.push_back(inst.good(t).id);
  j["saturated"] = std::move(sat);
  if (full) {
    j["population"] = r.population;
    j["solution"] = solution_to_json(inst, r.solution);
    Json dummy = Json::object();
    for (std::size_t t = 0; t < inst.num_goods(); ++t) {
      dummy[inst.good(t).id] = r.dummy[static_cast<Eigen::Index>(t)];
    }
    j["dummy_consumption"] = std::move(dummy);
  }
  return j;
}

Json header(const std::string& command, const MarketInstance& inst) {
  Json j;
  j["command"] = command;
  j["instance_hash"] = instance_hash(inst);
  return j;
}

int run_solve_welfare(const Options& o) {
  MarketInstance inst = load_instance(o.in, {o.strict});
  SolveReport rep;
  PricingSolution sol = solve_welfare(inst, solver_config(o), &rep);
  Json j = header("solve-welfare", inst);
  j["solution"] = solution_to_json(inst, sol);
  j["solver"] = {{"iterations", rep.iterations}, {"residual", rep.residual}};
  emit(o, dump(j));
  return kOk;
}

Json unit_demand_record(const MarketInstance& inst, const UnitDemandResult& r, double alpha,
                        bool diagnostics, bool* ok) {
  Json j = header("price-ud", inst);
  j["alpha"] = alpha;
  j["primary_price"] = r.thresholded.primary_price;
  Json clusters = Json::object();
  for (std::size_t t = 0; t < inst.num_goods(); ++t) {
    clusters[inst.good(t).id] = std::string(to_string(r.thresholded.good_cluster[t]));
  }
  Json type_clusters = Json::object();
  for (std::size_t i = 0; i < inst.num_types(); ++i) {
    type_clusters[inst.type(i).id] = std::string(to_string(r.thresholded.type_cluster[i]));
  }
  j["good_cluster"] = std::move(clusters);
  j["type_cluster"] = std::move(type_clusters);
  j["solution"] = solution_to_json(inst, r.solution);
  j["optimum"] = {{"sw", r.optimum.sw}, {"profit", r.optimum.profit}};
  GuaranteeCertificate cert = certify_unit_demand(r.optimum.sw, r.solution, alpha);
  j["certificate"] = certificate_to_json(cert);
  bool pass = cert.pass();
  if (diagnostics) {
    ClusterReport rep = cluster_diagnostics(inst, r.thresholded, r.solution, r.optimum);
    j["diagnostics"] = {{"violations", rep.violations}};
    pass = pass && rep.ok();
  }
  if (ok) *ok = pass;
  return j;
}

int run_price_ud(const Options& o) {
  MarketInstance inst = load_instance(o.in, {o.strict});
  const double alpha = alpha_for(o, inst);
  UnitDemandResult r = price_unit_demand(inst, alpha, solver_config(o));
  emit(o, dump(unit_demand_record(inst, r, alpha, o.diagnostics, nullptr)));
  return kOk;
}

Json multi_minded_record(const MarketInstance& inst, const MultiMindedResult& r, double alpha,
                         bool* ok) {
  Json j = header("price-mm", inst);
  j["alpha"] = alpha;
  j["bundle_ratio"] = inst.bundle_ratio();
  j["delta"] = r.lad.delta;
  j["selection_threshold"] = number(r.threshold);
  j["benchmark"] = {{"sw", r.bench.sw}, {"profit", r.bench.profit}};
  j["optimum"] = {{"sw", r.optimum.sw}, {"profit", r.optimum.profit}};
  Json rungs = Json::array();
  rungs.push_back(rung_to_json(inst, r.lad.optimum, false));
  for (const auto& rung : r.lad.rungs) rungs.push_back(rung_to_json(inst, rung, false));
  j["rungs"] = std::move(rungs);
  j["selected_index"] = r.selected.index;
  j["solution"] = solution_to_json(inst, r.selected.solution);
  GuaranteeCertificate cert =
      certify_multi_minded(r.optimum.sw, r.selected.solution, alpha, inst.bundle_ratio());
  j["certificate"] = certificate_to_json(cert);
  LadderAudit audit = audit_ladder(inst, r, alpha);
  j["audit"] = {{"violations", audit.violations}};
  if (ok) *ok = cert.pass() && audit.ok();
  return j;
}

int run_price_mm(const Options& o) {
  MarketInstance inst = load_instance(o.in, {o.strict});
  const double alpha = alpha_for(o, inst);
  MultiMindedResult r = price_multi_minded(inst, alpha, solver_config(o));
  emit(o, dump(multi_minded_record(inst, r, alpha, nullptr)));
  if (!o.ladder_dump.empty()) {
    Json d = header("price-mm", inst);
    d["rungs"] = Json::array();
    for (const auto& rung : r.lad.rungs) d["rungs"].push_back(rung_to_json(inst, rung, true));
    write_file(o.ladder_dump, dump(d));
  }
  return kOk;
}

int run_evaluate(const Options& o) {
  MarketInstance inst = load_instance(o.in, {o.strict});
  Json given;
  try {
    given = Json::parse(o.prices.starts_with("{") ? o.prices : read_file(o.prices));
  } catch (const Json::parse_error& e) {
    throw LoadError({std::string("--prices: ") + e.what()});
  }
  PricingSolution sol = evaluate(inst, prices_from_json(inst, given));
  Json j = header("evaluate", inst);
  j["solution"] = solution_to_json(inst, sol);
  emit(o, dump(j));
  return kOk;
}

std::string csv_field(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.12g}", v);
}

int run_sweep(const Options& o) {
  double lo = 0, hi = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(o.alpha_range);
  if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0) ||
      hi < lo || lo < 0 || hi > 1) {
    throw std::invalid_argument("--alpha for sweep must be lo:hi:step with 0 <= lo <= hi <= 1");
  }
  const auto rows = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::string text = "alpha,zeta,welfare_factor,tradeoff_revenue_at_c,c\n";
  for (std::size_t k = 0; k < rows; ++k) {
    const double a = round_sig(lo + static_cast<double>(k) * step);
    const double wf = welfare_factor(a);
    const double c = o.c.value_or(wf);
    double rev = std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(c)) {
      try {
        rev = tradeoff_bound(c, a).revenue_factor;
      } catch (const std::domain_error&) {
      }
    } else {
      rev = std::numeric_limits<double>::infinity();
    }
    text += fmt::format("{},{},{},{},{}\n", csv_field(a), csv_field(zeta(a)), csv_field(wf),
                        csv_field(rev), csv_field(c));
  }
  emit(o, text);
  return kOk;
}

int run_verify(const Options& o) {
  MarketInstance inst = load_instance(o.in, {o.strict});
  const double alpha = alpha_for(o, inst);
  const SolverConfig cfg = solver_config(o);
  std::vector<std::string> violations;
  Json j = header("verify", inst);
  j["alpha"] = alpha;

  PricingSolution opt = solve_welfare(inst, cfg);
  j["sw_star"] = opt.sw;

  GridSpec grid;
  grid.price_step = o.grid_step;
  if (inst.num_goods() <= grid.max_goods && inst.num_types() <= grid.max_types) {
    OracleResult ow = oracle_max_welfare(inst, grid);
    const double tol = bound_tolerance(opt.sw);
    if (ow.value > opt.sw + tol) {
      violations.push_back(fmt::format("grid welfare {:.12g} beats solver optimum {:.12g}",
                                       ow.value, opt.sw));
    }
    if (opt.sw < ow.value - 5e-3) {
      violations.push_back(fmt::format("solver optimum {:.12g} trails grid welfare {:.12g}",
                                       opt.sw, ow.value));
    }
    Allocation fast = min_cost_allocation(inst, opt.prices, opt.demand);
    Allocation slow = oracle_min_cost(inst, opt.prices, opt.demand, grid);
    const double cf = total_cost(inst, fast.allocation);
    const double cs = total_cost(inst, slow.allocation);
    if (std::abs(cf - cs) > 1e-3) {
      violations.push_back(fmt::format("min-cost allocation {:.12g} vs enumeration {:.12g}", cf,
                                       cs));
    }
    OracleResult op = oracle_max_profit(inst, grid);
    j["oracle"] = {{"max_welfare", ow.value},
                   {"max_profit", op.value},
                   {"min_cost", cs},
                   {"min_cost_solver", cf}};
  } else {
    j["oracle"] = "skipped: instance exceeds oracle caps";
  }

  bool ok = true;
  if (inst.is_unit_demand()) {
    UnitDemandResult r = price_unit_demand(inst, alpha, cfg);
    j["price_ud"] = unit_demand_record(inst, r, alpha, true, &ok);
    if (!ok) violations.push_back("thresholded pricing failed its certificate or diagnostics");
  }
  MultiMindedResult mm = price_multi_minded(inst, alpha, cfg);
  j["price_mm"] = multi_minded_record(inst, mm, alpha, &ok);
  if (!ok) violations.push_back("ladder pricing failed its certificate or audit");

  j["violations"] = violations;
  j["verdict"] = violations.empty() ? "PASS" : "FAIL";
  emit(o, dump(j));
  for (const auto& v : violations) spdlog::error("{}", v);
  return violations.empty() ? kOk : kViolation;
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("bicrit");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("BICRIT_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Welfare and profit pricing for envy-free markets"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool solver) {
    sub->add_option("--in", o.in, "instance file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "result file (default stdout)");
    sub->add_flag("--strict", o.strict, "reject unknown keys in the instance file");
    if (solver) {
      sub->add_option("--alpha", o.alpha, "regularity parameter (default: instance maximum)");
      sub->add_option("--tol", o.tol, "solver stationarity tolerance");
      sub->add_option("--max-iters", o.max_iters, "solver iteration limit");
    }
  };

  auto* solve = app.add_subcommand("solve-welfare", "welfare-optimal prices");
  common(solve, true);
  auto* ud = app.add_subcommand("price-ud", "thresholded pricing for unit-demand markets");
  common(ud, true);
  ud->add_flag("--diagnostics", o.diagnostics, "include cluster diagnostics");
  auto* mm = app.add_subcommand("price-mm", "dummy-price ladder for multi-minded markets");
  common(mm, true);
  mm->add_option("--dummy-ladder-dump", o.ladder_dump, "write every rung's solution here");
  auto* ev = app.add_subcommand("evaluate", "envy-free outcome at given prices");
  common(ev, false);
  ev->add_option("--prices", o.prices, "JSON object or file of prices keyed by good id")
      ->required();
  auto* sweep = app.add_subcommand("sweep", "CSV of guarantee factors over an alpha grid");
  sweep->add_option("--alpha", o.alpha_range, "lo:hi:step");
  sweep->add_option("--c", o.c, "welfare factor for the trade-off column (default (2-a)/(1-a))");
  sweep->add_option("--out", o.out, "CSV file (default stdout)");
  auto* verify = app.add_subcommand("verify", "oracle cross-checks and bound assertions");
  common(verify, true);
  verify->add_option("--grid-step", o.grid_step, "oracle price spacing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*solve) return run_solve_welfare(o);
    if (*ud) return run_price_ud(o);
    if (*mm) return run_price_mm(o);
    if (*ev) return run_evaluate(o);
    if (*sweep) return run_sweep(o);
    if (*verify) return run_verify(o);
  } catch (const LoadError& e) {
    spdlog::error("{}", e.what());
    return kInvalid;
  } catch (const InstanceError& e) {
    spdlog::error("{}", e.what());
    return kInvalid;
  } catch (const SolverError& e) {
    spdlog::error("{} (best residual {:.3e})", e.what(), e.residual());
    return kSolver;
  } catch (const SelectionError& e) {
    spdlog::error("{}", e.what());
    return kSolver;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kInvalid;
  }
  return kInvalid;
}
