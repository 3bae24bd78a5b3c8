#include "bicrit/analysis.hpp"

#include <algorithm>
#include <stdexcept>

namespace bicrit {

BicriteriaPair bicriteria_from_bounds(double c1, double c2) { return {c1 + c2, c2 + 1.0}; }

TradeoffPoint tradeoff_bound(double c, double alpha) {
  const double wf = welfare_factor(alpha);
  if (c <= 1.0) return {zeta(alpha), 1.0, true};
  if (c > wf * (1.0 + 1e-12)) {
    throw std::domain_error("trade-off constant exceeds the welfare guarantee (2-a)/(1-a)");
  }
  const double c1 = welfare_to_profit_bound(alpha);
  const double c2 = inverse_gap(alpha);
  return {std::min(c * c1, c * c2 / (c - 1.0)), c, false};
}

double guarantee_ratio(double numerator, double denominator) {
  if (numerator <= 0.0) return 0.0;
  if (denominator <= 0.0) return std::numeric_limits<double>::infinity();
  return numerator / denominator;
}

bool GuaranteeCertificate::pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

namespace {

// SW* <= factor * value + tol, phrased as a ratio verdict.
Verdict check(std::string name, double sw_star, double value, double factor) {
  Verdict v{std::move(name), guarantee_ratio(sw_star, value), factor, false};
  if (!std::isfinite(factor)) {
    v.unbounded = true;
    v.pass = true;
    return v;
  }
  v.pass = sw_star <= factor * value + bound_tolerance(sw_star);
  return v;
}

}  // namespace

GuaranteeCertificate certify_unit_demand(double sw_star, const PricingSolution& s, double alpha) {
  GuaranteeCertificate cert;
  cert.alpha = alpha;
  cert.sw_star = sw_star;
  cert.zeta = zeta(alpha);
  cert.welfare_factor = welfare_factor(alpha);
  cert.unbounded = alpha >= 1.0;
  cert.achieved_profit_ratio = guarantee_ratio(sw_star, s.profit);
  cert.achieved_welfare_ratio = sw_star <= 0.0 ? 1.0 : guarantee_ratio(sw_star, s.sw);
  cert.verdicts.push_back(check("profit", sw_star, s.profit, cert.zeta));
  cert.verdicts.push_back(check("welfare", sw_star, s.sw, cert.welfare_factor));

  cert.measured_c = std::max(1.0, cert.achieved_welfare_ratio);
  if (!cert.unbounded && std::isfinite(cert.measured_c) &&
      cert.measured_c <= cert.welfare_factor * (1.0 + 1e-12)) {
    cert.tradeoff_revenue_at_c = tradeoff_bound(cert.measured_c, alpha).revenue_factor;
    cert.verdicts.push_back(check("tradeoff", sw_star, s.profit, cert.tradeoff_revenue_at_c));
  } else {
    cert.tradeoff_revenue_at_c = std::numeric_limits<double>::quiet_NaN();
  }
  return cert;
}

GuaranteeCertificate certify_multi_minded(double sw_star, const PricingSolution& s, double alpha,
                                          double bundle_ratio) {
  GuaranteeCertificate cert;
  cert.alpha = alpha;
  cert.sw_star = sw_star;
  cert.zeta = zeta(alpha);
  cert.welfare_factor = welfare_factor(alpha);
  cert.mm_profit_factor = ladder_profit_factor(alpha, bundle_ratio);
  cert.mm_welfare_factor = ladder_welfare_factor(alpha);
  cert.unbounded = alpha >= 1.0;
  cert.achieved_profit_ratio = guarantee_ratio(sw_star, s.profit);
  cert.achieved_welfare_ratio = sw_star <= 0.0 ? 1.0 : guarantee_ratio(sw_star, s.sw);
  cert.measured_c = std::max(1.0, cert.achieved_welfare_ratio);
  cert.tradeoff_revenue_at_c = std::numeric_limits<double>::quiet_NaN();
  cert.verdicts.push_back(check("profit", sw_star, s.profit, cert.mm_profit_factor));
  cert.verdicts.push_back(check("welfare", sw_star, s.sw, cert.mm_welfare_factor));
  return cert;
}

CrossCertificate certify_cross(const MarketInstance& inst, double candidate_profit,
                               const PricingSolution& benchmark, double sw_star, double alpha) {
  CrossCertificate out;
  if (candidate_profit < benchmark.profit) {
    out.reason = "candidate profit is below the benchmark's; no guarantee transfers";
    return out;
  }
  const double factor = inst.is_unit_demand()
                            ? zeta(alpha)
                            : ladder_profit_factor(alpha, inst.bundle_ratio());
  out.granted = true;
  out.welfare_floor = std::isfinite(factor) ? sw_star / factor : 0.0;
  out.reason = inst.is_unit_demand() ? "unit-demand floor SW*/zeta"
                                     : "multi-minded floor SW*/ladder profit factor";
  return out;
}

}  // namespace bicrit
