#pragma once

// Multi-tenant slicing: each tenant i receives (b_i, p_i) so that its PSE
// reaches alpha_i * PSE_NoSlicing, subject to sum b <= B_tot, sum p <= P_tot.
//
// Multipliers are dimensionless: violations are measured as fractions of
// PSE_NoSlicing, v_i = alpha_i - pse_i / PSE_NoSlicing. Inside the solver
// allocations are normalised by the budgets, so every tenant lives in
// [0, 1]^2 and the budget set is a pair of capped simplices.

#include <span>
#include <vector>

#include <Eigen/Core>

#include "ranslice/model.hpp"

namespace ranslice {

struct SolverConfig {
  double mu_tol = 1e-6;
  double zeta_min = 1e-12;
  double nu0 = 1.0;
  int max_iters = 400;
  int patience = 25;
  int inner_max_iters = 2000;
  double inner_tol = 1e-13;
  double prox_weight = 1.0;       // pull towards the proportional split
  double feasibility_tol = 1e-6;  // fraction of PSE_NoSlicing
  double stall_tol = 1e-6;        // projected violation norm counted as zero
  SpecFunConfig specfun{};

  void validate() const;
};

struct DualState {
  Eigen::VectorXd mu;
  Eigen::VectorXd prev_violation;  // projected; empty before the first step
  double zeta = 1.0;
  double nu = 1.0;
  int k = 0;
  int stall_count = 0;
  bool converged = false;

  static DualState initial(Eigen::Index tenants, const SolverConfig& cfg);
};

struct SolveReport {
  std::vector<Allocation> allocations;
  Eigen::VectorXd mu;
  std::vector<double> per_tenant_pse;
  std::vector<double> dual_history;  // Lagrangian at each inner solution
  double sum_pse = 0;
  double baseline_pse = 0;
  int iterations = 0;
  bool converged = false;
  bool stalled = false;
};

/// 1 + sum_i mu_i (alpha_i - pse_i / PSE_NoSlicing).
double lagrangian(const Eigen::VectorXd& mu, const Eigen::VectorXd& bandwidth, const Eigen::VectorXd& power,
                  std::span<const SliceRequest> requests, const NetworkParams& params);

/// One projected subgradient step on the multipliers. Throws StallError when
/// the step has collapsed while violations persist for cfg.patience steps.
DualState dual_step(const DualState& state, const Eigen::VectorXd& violations, const SolverConfig& cfg);

/// Allocation in budget units. Columns: bandwidth (Hz), power (W).
struct InnerSolution {
  Eigen::VectorXd bandwidth;
  Eigen::VectorXd power;
  int iterations = 0;
};

/// Minimises the Lagrangian plus (prox_weight/2) |x - x_ref|^2 in normalised
/// coordinates, where x_ref is the alpha-proportional split (equal split when
/// every alpha is zero). At mu = 0 the answer is x_ref.
InnerSolution solve_inner(const Eigen::VectorXd& mu, std::span<const SliceRequest> requests,
                          const NetworkParams& params, const SolverConfig& cfg);

SolveReport solve_multitenant(std::span<const SliceRequest> requests, const NetworkParams& params,
                              const SolverConfig& cfg);

/// Exhaustive search over integer compositions of grid_levels bandwidth and
/// power quanta. Minimises total SLA shortfall first, then maximises sum PSE.
SolveReport brute_force_opt(std::span<const SliceRequest> requests, const NetworkParams& params,
                            int grid_levels, const SolverConfig& cfg = {});

inline constexpr int kMaxBruteForceTenants = 6;

/// alpha-proportional split of the budgets, normalised to [0, 1].
Eigen::VectorXd proportional_share(std::span<const SliceRequest> requests);

/// Euclidean projection onto {x >= 0, sum x <= 1}.
Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& x);

}  // namespace ranslice
