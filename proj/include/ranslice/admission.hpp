#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ranslice/model.hpp"
#include "ranslice/optimizer.hpp"

namespace ranslice {

enum class RejectReason { prefiltered, near_zero_allocation, worsens_sum_pse, infeasible };

std::string_view to_string(RejectReason reason);

struct Rejection {
  std::string tenant_id;
  RejectReason reason = RejectReason::prefiltered;
  double recorded_sum_pse = 0;  // sum PSE of the trial that was refused (worsens_sum_pse only)
};

/// Order in which candidates and deferred requests are considered.
enum class FillOrder { ascending_alpha, arrival };

struct AdmissionConfig {
  SolverConfig solver{};
  double prefilter_alpha = 0.5;  // inclusive
  double eps_alloc = 1e-4;       // fraction of each budget
  FillOrder order = FillOrder::ascending_alpha;

  void validate() const;
};

struct AdmissionResult {
  std::vector<Allocation> admitted;
  std::vector<Rejection> rejected;
  std::vector<double> evaluated_sums;  // sum PSE of every feasible configuration tried
  double sum_pse = 0;
  double baseline_pse = 0;
  double gain = 0;
  int solves = 0;
  int dual_iterations = 0;  // total over all solves
  int stalls = 0;           // solves whose dual ascent stalled
};

struct Prefiltered {
  std::vector<SliceRequest> candidates;
  std::vector<SliceRequest> deferred;
};

Prefiltered prefilter(std::span<const SliceRequest> requests, double threshold = 0.5,
                      FillOrder order = FillOrder::ascending_alpha);

/// Necessary condition for joint feasibility: no split can give the tenants
/// more than the full budgets serving the densest tenant.
bool capacity_certificate(std::span<const SliceRequest> requests, const PseModel<double>& model,
                          double tol);

AdmissionResult admit(std::span<const SliceRequest> requests, const NetworkParams& params,
                      const AdmissionConfig& cfg);

}  // namespace ranslice
