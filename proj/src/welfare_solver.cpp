#include "bicrit/welfare_solver.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace bicrit {

namespace {

// Per-good cost after optimizing out an optional dummy buyer analytically:
//   C~(y) = min_{0 <= z <= L} C(y + z) - p z,   z*(y) = clamp(c^{-1}(p) - y, 0, L).
class EffectiveCosts {
 public:
  EffectiveCosts(const MarketInstance& inst, const std::optional<DummyBuyers>& dummies)
      : inst_(inst), dummies_(dummies) {
    if (dummies_) {
      for (const auto& g : inst.goods()) knee_.push_back(marginal_inverse(g.cost, dummies_->price));
    }
  }

  double dummy_amount(std::size_t t, double y) const {
    if (!dummies_) return 0.0;
    return std::clamp(knee_[t] - y, 0.0, dummies_->population);
  }

  double total(std::size_t t, double y) const {
    double z = dummy_amount(t, y);
    return bicrit::total(inst_.good(t).cost, y + z) - (dummies_ ? dummies_->price * z : 0.0);
  }

  double marginal(std::size_t t, double y) const {
    return bicrit::marginal(inst_.good(t).cost, y + dummy_amount(t, y));
  }

  double slope(std::size_t t, double y) const {
    double z = dummy_amount(t, y);
    if (dummies_ && z > 0.0 && z < dummies_->population) return 0.0;
    return marginal_slope(inst_.good(t).cost, y + z);
  }

 private:
  const MarketInstance& inst_;
  std::optional<DummyBuyers> dummies_;
  std::vector<double> knee_;
};

class WelfareProgram {
 public:
  WelfareProgram(const MarketInstance& inst, const std::optional<DummyBuyers>& dummies)
      : inst_(inst), costs_(inst, dummies) {}

  double objective(const Vector& v) const {
    Vector x = inst_.demand_incidence() * v;
    Vector y = inst_.good_incidence() * v;
    double f = 0.0;
    for (std::size_t i = 0; i < inst_.num_types(); ++i) {
      f += utility_integral(inst_.type(i).demand, x[idx(i)]);
    }
    for (std::size_t t = 0; t < inst_.num_goods(); ++t) f -= costs_.total(t, y[idx(t)]);
    return f;
  }

  Vector gradient(const Vector& v) const {
    Vector x = inst_.demand_incidence() * v;
    Vector y = inst_.good_incidence() * v;
    Vector lam(x.size());
    Vector mc(y.size());
    for (std::size_t i = 0; i < inst_.num_types(); ++i) {
      lam[idx(i)] = eval(inst_.type(i).demand, x[idx(i)]);
    }
    for (std::size_t t = 0; t < inst_.num_goods(); ++t) mc[idx(t)] = costs_.marginal(t, y[idx(t)]);
    return inst_.demand_incidence().transpose() * lam - inst_.good_incidence().transpose() * mc;
  }

  /// Negated Hessian (positive semidefinite).
  Matrix curvature(const Vector& v) const {
    Vector x = inst_.demand_incidence() * v;
    Vector y = inst_.good_incidence() * v;
    Vector dl(x.size());
    Vector dc(y.size());
    for (std::size_t i = 0; i < inst_.num_types(); ++i) {
      dl[idx(i)] = -derivative(inst_.type(i).demand, x[idx(i)]);
    }
    for (std::size_t t = 0; t < inst_.num_goods(); ++t) dc[idx(t)] = costs_.slope(t, y[idx(t)]);
    const Matrix& A = inst_.demand_incidence();
    const Matrix& G = inst_.good_incidence();
    return A.transpose() * dl.asDiagonal() * A + G.transpose() * dc.asDiagonal() * G;
  }

  const EffectiveCosts& costs() const { return costs_; }

 private:
  static Eigen::Index idx(std::size_t k) { return static_cast<Eigen::Index>(k); }
  const MarketInstance& inst_;
  EffectiveCosts costs_;
};

double projected_norm(const Vector& v, const Vector& g) {
  double r = 0.0;
  for (Eigen::Index a = 0; a < v.size(); ++a) {
    double pg = v[a] > 0.0 ? g[a] : std::max(g[a], 0.0);
    r = std::max(r, std::abs(pg));
  }
  return r;
}

struct NewtonResult {
  Vector split;
  double objective;
};

NewtonResult maximize(const MarketInstance& inst, const std::optional<DummyBuyers>& dummies,
                      const SolverConfig& cfg, SolveReport* report) {
  if (!(cfg.tol > 0)) throw std::invalid_argument("solver tol must be positive");
  if (cfg.max_iters < 1) throw std::invalid_argument("solver max_iters must be >= 1");

  WelfareProgram prog(inst, dummies);
  const auto n = static_cast<Eigen::Index>(inst.num_splits());
  const double target = cfg.tol * 1e-3 * inst.lambda_max();
  constexpr double kArmijo = 1e-4;
  constexpr double kMuMin = 1e-14;

  Vector v = Vector::Zero(n);
  double f = prog.objective(v);
  double mu = 1e-10;
  SolveReport local;
  local.objective_trace.push_back(f);

  for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
    Vector g = prog.gradient(v);
    double residual = projected_norm(v, g);
    local.iterations = iter;
    local.residual = residual;
    if (residual <= target) break;

    // Variables pinned at the bound and pushed against it.
    Vector trial_step = (v + g).cwiseMax(0.0) - v;
    double eps = std::min(1e-8, trial_step.lpNorm<Eigen::Infinity>());
    std::vector<Eigen::Index> free_set;
    std::vector<bool> active(static_cast<std::size_t>(n), false);
    for (Eigen::Index a = 0; a < n; ++a) {
      if (v[a] <= eps && g[a] < 0.0) {
        active[static_cast<std::size_t>(a)] = true;
      } else {
        free_set.push_back(a);
      }
    }

    Matrix curv = prog.curvature(v);
    const auto nf = static_cast<Eigen::Index>(free_set.size());
    Matrix M(nf, nf);
    Vector gf(nf);
    for (Eigen::Index r = 0; r < nf; ++r) {
      gf[r] = g[free_set[static_cast<std::size_t>(r)]];
      for (Eigen::Index c = 0; c < nf; ++c) {
        M(r, c) = curv(free_set[static_cast<std::size_t>(r)], free_set[static_cast<std::size_t>(c)]);
      }
    }
    const double scale = 1.0 + (nf > 0 ? M.diagonal().cwiseAbs().maxCoeff() : 0.0);

    bool accepted = false;
    while (!accepted && mu <= 1e12 * scale) {
      Vector d = Vector::Zero(n);
      if (nf > 0) {
        Matrix damped = M;
        damped.diagonal().array() += mu * scale;
        Eigen::LDLT<Matrix> ldlt(damped);
        Vector df = ldlt.solve(gf);
        if (ldlt.info() != Eigen::Success || !df.allFinite() || gf.dot(df) <= 0.0) {
          mu *= 100.0;
          continue;
        }
        for (Eigen::Index r = 0; r < nf; ++r) d[free_set[static_cast<std::size_t>(r)]] = df[r];
      }
      for (Eigen::Index a = 0; a < n; ++a) {
        if (active[static_cast<std::size_t>(a)]) d[a] = g[a];
      }
      double free_gain = 0.0;
      for (Eigen::Index a : free_set) free_gain += g[a] * d[a];

      for (double s = 1.0; s > 1e-20; s *= 0.5) {
        Vector cand = (v + s * d).cwiseMax(0.0);
        double active_gain = 0.0;
        for (Eigen::Index a = 0; a < n; ++a) {
          if (active[static_cast<std::size_t>(a)]) active_gain += g[a] * (cand[a] - v[a]);
        }
        double fc = prog.objective(cand);
        if (fc >= f + kArmijo * (s * free_gain + active_gain) && fc >= f) {
          accepted = (cand - v).lpNorm<Eigen::Infinity>() > 0.0 || fc > f;
          if (accepted) {
            v = cand;
            f = fc;
          }
          break;
        }
      }
      if (accepted) {
        mu = std::max(kMuMin, mu * 0.1);
      } else {
        mu *= 100.0;
      }
    }
    if (!accepted) {
      local.stalled = true;
      break;
    }
    local.objective_trace.push_back(f);
  }

  Vector g = prog.gradient(v);
  local.residual = projected_norm(v, g);
  const double floor = 1e-6 * (1.0 + std::abs(f));
  if (report) *report = local;
  if (local.residual > target && !(local.residual <= floor)) {
    throw SolverError("welfare solver failed to converge (residual " +
                          std::to_string(local.residual) + ")",
                      v, local.residual);
  }
  if (local.residual > target) {
    spdlog::debug("welfare solver stopped at first-order floor: residual {:.3e}", local.residual);
  }
  spdlog::trace("welfare solver: {} iterations, residual {:.3e}, objective {:.12g}",
                local.iterations, local.residual, f);
  return {v, f};
}

}  // namespace

PricingSolution solve_welfare(const MarketInstance& inst, const SolverConfig& cfg,
                              SolveReport* report) {
  NewtonResult r = maximize(inst, std::nullopt, cfg, report);
  Vector y = inst.good_incidence() * r.split;
  Vector prices(y.size());
  for (std::size_t t = 0; t < inst.num_goods(); ++t) {
    const auto k = static_cast<Eigen::Index>(t);
    prices[k] = marginal(inst.good(t).cost, y[k]);
  }
  drop_split_dust(r.split);
  return assemble_solution(inst, std::move(prices), std::move(r.split));
}

AugmentedOptimum solve_augmented_welfare(const MarketInstance& inst, const DummyBuyers& dummies,
                                         const SolverConfig& cfg, SolveReport* report) {
  if (!(dummies.price > 0)) throw std::invalid_argument("dummy price must be positive");
  if (!(dummies.population > 0)) throw std::invalid_argument("dummy population must be positive");
  NewtonResult r = maximize(inst, dummies, cfg, report);
  EffectiveCosts costs(inst, dummies);
  AugmentedOptimum out;
  out.objective = r.objective;
  out.allocation = inst.good_incidence() * r.split;
  out.dummy.resize(out.allocation.size());
  out.prices.resize(out.allocation.size());
  for (std::size_t t = 0; t < inst.num_goods(); ++t) {
    const auto k = static_cast<Eigen::Index>(t);
    const double y = out.allocation[k];
    const double knee = marginal_inverse(inst.good(t).cost, dummies.price);
    out.dummy[k] = costs.dummy_amount(t, y);
    out.prices[k] = costs.marginal(t, y);
    if (knee - y > dummies.population * (1.0 - 1e-12)) out.cap_binding = true;
  }
  drop_split_dust(r.split);
  out.split = std::move(r.split);
  out.allocation = inst.good_incidence() * out.split;
  return out;
}

Allocation solve_constrained_welfare(const MarketInstance& inst, const Vector& demand) {
  if (demand.size() != static_cast<Eigen::Index>(inst.num_types())) {
    throw std::invalid_argument("demand vector size does not match the number of buyer types");
  }
  if ((demand.array() < 0.0).any()) throw std::domain_error("demand must be non-negative");
  std::vector<std::vector<std::size_t>> all(inst.num_types());
  for (std::size_t i = 0; i < inst.num_types(); ++i) {
    for (std::size_t k = 0; k < inst.type(i).bundles.size(); ++k) all[i].push_back(k);
  }
  return allocate_min_cost(inst, demand, all);
}

Vector welfare_gradient(const MarketInstance& inst, const Vector& split,
                        const std::optional<DummyBuyers>& dummies) {
  return WelfareProgram(inst, dummies).gradient(split);
}

double projected_gradient_norm(const MarketInstance& inst, const Vector& split,
                               const std::optional<DummyBuyers>& dummies) {
  return projected_norm(split, welfare_gradient(inst, split, dummies));
}

}  // namespace bicrit
