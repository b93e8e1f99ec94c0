#include "ranslice/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace ranslice {

namespace {

constexpr double kGradientFloor = 1e-12;  // normalised; keeps dPSE/dP finite at p = 0
constexpr double kNuGrowth = 1.25;
constexpr double kNuShrink = 0.5;
constexpr double kNuCap = 1e3;

void check_requests(std::span<const SliceRequest> requests) {
  if (requests.empty()) throw DomainError("optimizer: empty request list");
  for (const auto& r : requests) {
    if (!(r.lambda_t > 0.0) || !std::isfinite(r.lambda_t)) {
      throw DomainError("optimizer: tenant " + r.tenant_id + " has lambda_t <= 0");
    }
    if (!(r.alpha >= 0.0) || !std::isfinite(r.alpha)) {
      throw DomainError("optimizer: tenant " + r.tenant_id + " has alpha < 0");
    }
  }
}

// Normalised problem data shared by the inner and outer loops.
class Problem {
 public:
  Problem(std::span<const SliceRequest> requests, const NetworkParams& params, const SolverConfig& cfg)
      : requests_(requests), model_(params, cfg.specfun), cfg_(cfg) {
    check_requests(requests);
    baseline_ = pse_no_slicing(model_, requests);
    if (!(baseline_ > 0.0)) throw DomainError("optimizer: PSE_NoSlicing is zero");
    ref_ = proportional_share(requests);
  }

  Eigen::Index size() const { return static_cast<Eigen::Index>(requests_.size()); }
  double baseline() const { return baseline_; }
  const NetworkParams& params() const { return model_.params(); }
  const Eigen::VectorXd& reference() const { return ref_; }

  double share(Eigen::Index i, double b, double p) const {
    return model_(p * params().p_tot, b * params().b_tot, lambda(i)) / baseline_;
  }

  PseGradient<double> share_gradient(Eigen::Index i, double b, double p) const {
    const double bf = std::max(b, kGradientFloor);
    const double pf = std::max(p, kGradientFloor);
    PseGradient<double> g = model_.gradient(pf * params().p_tot, bf * params().b_tot, lambda(i));
    g.d_bandwidth *= params().b_tot / baseline_;
    g.d_power *= params().p_tot / baseline_;
    if (!std::isfinite(g.d_bandwidth) || !std::isfinite(g.d_power)) {
      std::ostringstream os;
      os << "non-finite PSE gradient for tenant " << requests_[static_cast<std::size_t>(i)].tenant_id
         << " at b=" << b << " p=" << p;
      throw NonFiniteGradientError(os.str(), static_cast<long>(i));
    }
    return g;
  }

  double alpha(Eigen::Index i) const { return requests_[static_cast<std::size_t>(i)].alpha; }
  double lambda(Eigen::Index i) const { return requests_[static_cast<std::size_t>(i)].lambda_t; }
  const SliceRequest& request(Eigen::Index i) const { return requests_[static_cast<std::size_t>(i)]; }

  // Inner objective: -sum mu_i share_i + (rho/2) |x - ref|^2.
  double objective(const Eigen::VectorXd& mu, const Eigen::VectorXd& b, const Eigen::VectorXd& p) const {
    double value = 0.5 * cfg_.prox_weight * ((b - ref_).squaredNorm() + (p - ref_).squaredNorm());
    for (Eigen::Index i = 0; i < size(); ++i) {
      if (mu(i) != 0.0) value -= mu(i) * share(i, b(i), p(i));
    }
    return value;
  }

  InnerSolution solve_inner(const Eigen::VectorXd& mu) const {
    const Eigen::Index m = size();
    if (mu.size() != m) throw DomainError("solve_inner: mu has the wrong dimension");
    if ((mu.array() < 0.0).any() || !mu.allFinite()) throw DomainError("solve_inner: mu must be >= 0");

    Eigen::VectorXd b = ref_;
    Eigen::VectorXd p = ref_;
    int iterations = 0;
    if (!mu.isZero(0.0)) {
      Eigen::VectorXd gb(m), gp(m);
      double value = objective(mu, b, p);
      double step = 1.0;
      for (; iterations < cfg_.inner_max_iters; ++iterations) {
        for (Eigen::Index i = 0; i < m; ++i) {
          gb(i) = cfg_.prox_weight * (b(i) - ref_(i));
          gp(i) = cfg_.prox_weight * (p(i) - ref_(i));
          if (mu(i) != 0.0) {
            const PseGradient<double> g = share_gradient(i, b(i), p(i));
            gb(i) -= mu(i) * g.d_bandwidth;
            gp(i) -= mu(i) * g.d_power;
          }
        }
        // Backtracking on the proximal-gradient sufficient-decrease condition.
        step = std::min(step * 2.0, 1e6);
        Eigen::VectorXd nb, np;
        double next_value = value;
        bool accepted = false;
        for (int tries = 0; tries < 80; ++tries) {
          nb = project_capped_simplex(b - step * gb);
          np = project_capped_simplex(p - step * gp);
          const double moved = (nb - b).squaredNorm() + (np - p).squaredNorm();
          next_value = objective(mu, nb, np);
          const double model_value = value + gb.dot(nb - b) + gp.dot(np - p) + moved / (2.0 * step);
          if (next_value <= model_value + 1e-15 * std::abs(value)) {
            accepted = true;
            break;
          }
          step *= 0.5;
        }
        if (!accepted) break;
        const double change = std::max((nb - b).lpNorm<Eigen::Infinity>(), (np - p).lpNorm<Eigen::Infinity>());
        b = std::move(nb);
        p = std::move(np);
        value = next_value;
        if (change <= cfg_.inner_tol) {
          ++iterations;
          break;
        }
      }
    }
    InnerSolution out;
    out.bandwidth = b * params().b_tot;
    out.power = p * params().p_tot;
    out.iterations = iterations;
    return out;
  }

 private:
  std::span<const SliceRequest> requests_;
  PseModel<double> model_;
  SolverConfig cfg_;
  double baseline_ = 0;
  Eigen::VectorXd ref_;
};

Eigen::VectorXd projected_violation(const Eigen::VectorXd& mu, const Eigen::VectorXd& v) {
  Eigen::VectorXd pg = v;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (mu(i) <= 0.0 && pg(i) < 0.0) pg(i) = 0.0;
  }
  return pg;
}

void fill_report(SolveReport& report, const Problem& problem, const Eigen::VectorXd& bandwidth,
                 const Eigen::VectorXd& power) {
  const Eigen::Index m = problem.size();
  const NetworkParams& params = problem.params();
  report.allocations.clear();
  report.per_tenant_pse.assign(static_cast<std::size_t>(m), 0.0);
  report.sum_pse = 0;
  report.baseline_pse = problem.baseline();
  for (Eigen::Index i = 0; i < m; ++i) {
    Allocation a;
    a.tenant_id = problem.request(i).tenant_id;
    a.bandwidth = bandwidth(i);
    a.power = power(i);
    a.admitted = a.bandwidth > 0.0 && a.power > 0.0;
    a.achieved_pse = problem.share(i, a.bandwidth / params.b_tot, a.power / params.p_tot) * problem.baseline();
    report.per_tenant_pse[static_cast<std::size_t>(i)] = a.achieved_pse;
    report.sum_pse += a.achieved_pse;
    report.allocations.push_back(std::move(a));
  }
}

bool meets_slas(const SolveReport& report, std::span<const SliceRequest> requests, double tol) {
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (report.per_tenant_pse[i] < (requests[i].alpha - tol) * report.baseline_pse) return false;
  }
  return true;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(mu_tol > 0.0)) throw DomainError("SolverConfig.mu_tol must be > 0");
  if (!(zeta_min > 0.0)) throw DomainError("SolverConfig.zeta_min must be > 0");
  if (!(nu0 > 0.0)) throw DomainError("SolverConfig.nu0 must be > 0");
  if (max_iters < 1 || inner_max_iters < 1) throw DomainError("SolverConfig: iteration caps must be >= 1");
  if (patience < 1) throw DomainError("SolverConfig.patience must be >= 1");
  if (!(inner_tol > 0.0)) throw DomainError("SolverConfig.inner_tol must be > 0");
  if (!(prox_weight > 0.0)) throw DomainError("SolverConfig.prox_weight must be > 0");
  if (!(feasibility_tol >= 0.0) || !(stall_tol >= 0.0)) throw DomainError("SolverConfig: tolerances must be >= 0");
  specfun.validate();
}

DualState DualState::initial(Eigen::Index tenants, const SolverConfig& cfg) {
  DualState s;
  s.mu = Eigen::VectorXd::Zero(tenants);
  s.nu = cfg.nu0;
  s.zeta = cfg.nu0;
  return s;
}

double lagrangian(const Eigen::VectorXd& mu, const Eigen::VectorXd& bandwidth, const Eigen::VectorXd& power,
                  std::span<const SliceRequest> requests, const NetworkParams& params) {
  const auto m = static_cast<Eigen::Index>(requests.size());
  if (mu.size() != m || bandwidth.size() != m || power.size() != m) {
    throw DomainError("lagrangian: dimension mismatch");
  }
  const PseModel<double> model(params);
  const double baseline = pse_no_slicing(model, requests);
  double value = 1.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& r = requests[static_cast<std::size_t>(i)];
    value += mu(i) * (r.alpha - model(power(i), bandwidth(i), r.lambda_t) / baseline);
  }
  return value;
}

DualState dual_step(const DualState& state, const Eigen::VectorXd& violations, const SolverConfig& cfg) {
  if (violations.size() != state.mu.size()) throw DomainError("dual_step: dimension mismatch");
  if (!violations.allFinite()) throw DomainError("dual_step: non-finite violation");
  DualState next = state;
  next.k = state.k + 1;
  const Eigen::VectorXd pg = projected_violation(state.mu, violations);
  if (pg.lpNorm<Eigen::Infinity>() <= cfg.stall_tol) {
    next.converged = true;
    next.stall_count = 0;
    next.prev_violation = pg;
    return next;
  }

  double nu = state.nu;
  if (state.prev_violation.size() == pg.size()) {
    const double turn = pg.dot(state.prev_violation);
    if (turn < 0.0) {
      nu *= kNuShrink;
    } else if (turn > 0.0) {
      nu = std::min(nu * kNuGrowth, kNuCap * cfg.nu0);
    }
  }
  next.zeta = std::max(nu / pg.norm(), cfg.zeta_min);
  next.mu = (state.mu + next.zeta * pg).cwiseMax(0.0);
  const Eigen::VectorXd delta = next.mu - state.mu;
  next.nu = delta.norm();
  next.prev_violation = pg;
  next.converged = false;

  const double scale = 1.0 + state.mu.lpNorm<Eigen::Infinity>();
  if (delta.lpNorm<Eigen::Infinity>() <= cfg.mu_tol * scale && violations.maxCoeff() <= cfg.stall_tol) {
    next.converged = true;
    next.stall_count = 0;
    return next;
  }
  if (nu / pg.norm() <= cfg.zeta_min) {
    if (++next.stall_count >= cfg.patience) {
      std::ostringstream os;
      os << "dual ascent stalled after " << next.k << " iterations; max violation " << violations.maxCoeff();
      throw StallError(os.str());
    }
  } else {
    next.stall_count = 0;
  }
  return next;
}

InnerSolution solve_inner(const Eigen::VectorXd& mu, std::span<const SliceRequest> requests,
                          const NetworkParams& params, const SolverConfig& cfg) {
  cfg.validate();
  const Problem problem(requests, params, cfg);
  return problem.solve_inner(mu);
}

SolveReport solve_multitenant(std::span<const SliceRequest> requests, const NetworkParams& params,
                              const SolverConfig& cfg) {
  cfg.validate();
  const Problem problem(requests, params, cfg);
  const Eigen::Index m = problem.size();
  SolveReport report;
  DualState state = DualState::initial(m, cfg);

  for (int k = 0; k < cfg.max_iters; ++k) {
    const InnerSolution inner = problem.solve_inner(state.mu);
    Eigen::VectorXd violation(m);
    double dual_value = 1.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      violation(i) = problem.alpha(i) -
                     problem.share(i, inner.bandwidth(i) / params.b_tot, inner.power(i) / params.p_tot);
      dual_value += state.mu(i) * violation(i);
    }
    report.dual_history.push_back(dual_value);
    try {
      state = dual_step(state, violation, cfg);
    } catch (const StallError&) {
      report.stalled = true;
      break;
    }
    if (state.converged) break;
  }

  const InnerSolution final_inner = problem.solve_inner(state.mu);
  fill_report(report, problem, final_inner.bandwidth, final_inner.power);
  report.mu = state.mu;
  report.iterations = state.k;
  report.converged = state.converged && meets_slas(report, requests, cfg.feasibility_tol);
  return report;
}

SolveReport brute_force_opt(std::span<const SliceRequest> requests, const NetworkParams& params,
                            int grid_levels, const SolverConfig& cfg) {
  if (requests.size() > static_cast<std::size_t>(kMaxBruteForceTenants)) {
    std::ostringstream os;
    os << "brute_force_opt: refusing " << requests.size() << " tenants (cap " << kMaxBruteForceTenants << ")";
    throw DomainError(os.str());
  }
  if (grid_levels < 4) throw DomainError("brute_force_opt: grid_levels must be >= 4");
  cfg.validate();
  const Problem problem(requests, params, cfg);
  const auto m = static_cast<std::size_t>(problem.size());
  const auto g = static_cast<std::size_t>(grid_levels);
  const std::size_t side = g + 1;
  const double q = 1.0 / static_cast<double>(grid_levels);

  // shortfall[i][b][p], share[i][b][p] on the quantum grid.
  std::vector<double> shortfall(m * side * side), gain(m * side * side);
  auto at = [side](std::size_t i, std::size_t b, std::size_t p) { return (i * side + b) * side + p; };
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t b = 0; b <= g; ++b) {
      for (std::size_t p = 0; p <= g; ++p) {
        const double s = problem.share(static_cast<Eigen::Index>(i), q * static_cast<double>(b),
                                       q * static_cast<double>(p));
        const double miss = problem.alpha(static_cast<Eigen::Index>(i)) - s;
        shortfall[at(i, b, p)] = miss > cfg.feasibility_tol ? miss : 0.0;
        gain[at(i, b, p)] = s;
      }
    }
  }

  // Exact DP over tenants on used quanta (bu, pu); the key (shortfall, -sum share)
  // is additive and compared lexicographically, so this equals full enumeration.
  struct Key {
    double shortfall = std::numeric_limits<double>::infinity();
    double neg_gain = 0;
    bool operator<(const Key& o) const {
      return shortfall < o.shortfall || (shortfall == o.shortfall && neg_gain < o.neg_gain);
    }
  };
  const std::size_t states = side * side;
  std::vector<Key> best(states);
  best[0] = Key{0.0, 0.0};
  std::vector<std::uint16_t> choice_b(m * states), choice_p(m * states);
  std::vector<Key> next(states);
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(next.begin(), next.end(), Key{});
    for (std::size_t bu = 0; bu <= g; ++bu) {
      for (std::size_t pu = 0; pu <= g; ++pu) {
        const Key& base = best[bu * side + pu];
        if (!std::isfinite(base.shortfall)) continue;
        for (std::size_t b = 0; bu + b <= g; ++b) {
          for (std::size_t p = 0; pu + p <= g; ++p) {
            const Key cand{base.shortfall + shortfall[at(i, b, p)], base.neg_gain - gain[at(i, b, p)]};
            const std::size_t s = (bu + b) * side + (pu + p);
            if (cand < next[s]) {
              next[s] = cand;
              choice_b[i * states + s] = static_cast<std::uint16_t>(b);
              choice_p[i * states + s] = static_cast<std::uint16_t>(p);
            }
          }
        }
      }
    }
    best.swap(next);
  }

  std::size_t end = 0;
  for (std::size_t s = 1; s < states; ++s) {
    if (best[s] < best[end]) end = s;
  }
  const bool feasible = best[end].shortfall == 0.0;

  Eigen::VectorXd bandwidth(problem.size()), power(problem.size());
  std::size_t bu = end / side, pu = end % side;
  for (std::size_t i = m; i-- > 0;) {
    const std::size_t s = bu * side + pu;
    const std::size_t b = choice_b[i * states + s], p = choice_p[i * states + s];
    bandwidth(static_cast<Eigen::Index>(i)) = params.b_tot * q * static_cast<double>(b);
    power(static_cast<Eigen::Index>(i)) = params.p_tot * q * static_cast<double>(p);
    bu -= b;
    pu -= p;
  }

  SolveReport report;
  fill_report(report, problem, bandwidth, power);
  report.mu = Eigen::VectorXd::Zero(problem.size());
  report.iterations = 0;
  report.converged = feasible;
  return report;
}

Eigen::VectorXd proportional_share(std::span<const SliceRequest> requests) {
  const auto m = static_cast<Eigen::Index>(requests.size());
  if (m == 0) throw DomainError("proportional_share: empty request list");
  Eigen::VectorXd share(m);
  double total = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    share(i) = requests[static_cast<std::size_t>(i)].alpha;
    total += share(i);
  }
  if (total > 0.0) return share / total;
  return Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
}

Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& x) {
  Eigen::VectorXd clipped = x.cwiseMax(0.0);
  if (clipped.sum() <= 1.0) return clipped;
  // Sort-based projection onto the simplex {x >= 0, sum x = 1}.
  std::vector<double> u(x.data(), x.data() + x.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0, theta = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (x.array() - theta).cwiseMax(0.0).matrix();
}

}  // namespace ranslice
