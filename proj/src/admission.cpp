#include "ranslice/admission.hpp"

#include <algorithm>
#include <optional>

namespace ranslice {

namespace {

constexpr double kStrictGain = 1e-12;  // relative; below this two sums are tied

struct Trial {
  SolveReport report;
  bool ok = false;
  std::vector<std::size_t> near_zero;  // positions in the trial set
};

}  // namespace

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::prefiltered: return "prefiltered";
    case RejectReason::near_zero_allocation: return "near_zero_allocation";
    case RejectReason::worsens_sum_pse: return "worsens_sum_pse";
    case RejectReason::infeasible: return "infeasible";
  }
  return "unknown";
}

void AdmissionConfig::validate() const {
  solver.validate();
  if (!(prefilter_alpha >= 0.0)) throw DomainError("AdmissionConfig.prefilter_alpha must be >= 0");
  if (!(eps_alloc >= 0.0 && eps_alloc < 1.0)) throw DomainError("AdmissionConfig.eps_alloc must lie in [0, 1)");
}

Prefiltered prefilter(std::span<const SliceRequest> requests, double threshold, FillOrder order) {
  Prefiltered out;
  for (const auto& r : requests) (r.alpha <= threshold ? out.candidates : out.deferred).push_back(r);
  if (order == FillOrder::ascending_alpha) {
    auto by_alpha = [](const SliceRequest& a, const SliceRequest& b) {
      return a.alpha < b.alpha || (a.alpha == b.alpha && a.tenant_id < b.tenant_id);
    };
    std::stable_sort(out.candidates.begin(), out.candidates.end(), by_alpha);
    std::stable_sort(out.deferred.begin(), out.deferred.end(), by_alpha);
  }
  return out;
}

bool capacity_certificate(std::span<const SliceRequest> requests, const PseModel<double>& model, double tol) {
  if (requests.empty()) return true;
  double alpha_sum = 0, lambda_max = 0;
  for (const auto& r : requests) {
    alpha_sum += r.alpha;
    lambda_max = std::max(lambda_max, r.lambda_t);
  }
  const NetworkParams& p = model.params();
  const double baseline = pse_no_slicing(model, requests);
  return (alpha_sum - tol * static_cast<double>(requests.size())) * baseline <=
         model(p.p_tot, p.b_tot, lambda_max);
}

AdmissionResult admit(std::span<const SliceRequest> requests, const NetworkParams& params,
                      const AdmissionConfig& cfg) {
  cfg.validate();
  if (requests.empty()) throw DomainError("admit: empty request list");
  const PseModel<double> model(params, cfg.solver.specfun);

  AdmissionResult result;
  result.baseline_pse = pse_no_slicing(model, requests);
  const double tol = cfg.solver.feasibility_tol;

  auto run = [&](const std::vector<SliceRequest>& set) {
    Trial t;
    if (!capacity_certificate(set, model, tol)) return t;
    t.report = solve_multitenant(set, params, cfg.solver);
    ++result.solves;
    result.dual_iterations += t.report.iterations;
    if (t.report.stalled) ++result.stalls;
    if (!t.report.converged) return t;
    for (std::size_t i = 0; i < set.size(); ++i) {
      const Allocation& a = t.report.allocations[i];
      if (a.bandwidth < cfg.eps_alloc * params.b_tot || a.power < cfg.eps_alloc * params.p_tot) {
        t.near_zero.push_back(i);
      }
    }
    t.ok = t.near_zero.empty();
    if (t.ok) result.evaluated_sums.push_back(t.report.sum_pse);
    return t;
  };

  const Prefiltered pre = prefilter(requests, cfg.prefilter_alpha, cfg.order);
  std::vector<SliceRequest> active = pre.candidates;
  std::optional<SolveReport> best;

  // Candidates: drop the last-ordered request until the set is jointly
  // feasible, and drop near-zero allocations, re-solving after each change.
  while (!active.empty()) {
    Trial t = run(active);
    if (t.ok) {
      best = std::move(t.report);
      break;
    }
    if (!t.near_zero.empty()) {
      for (auto it = t.near_zero.rbegin(); it != t.near_zero.rend(); ++it) {
        result.rejected.push_back({active[*it].tenant_id, RejectReason::near_zero_allocation, 0.0});
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(*it));
      }
      continue;
    }
    result.rejected.push_back({active.back().tenant_id, RejectReason::infeasible, 0.0});
    active.pop_back();
  }

  auto current_sum = [&] { return best ? best->sum_pse : 0.0; };
  std::size_t next_deferred = 0;
  for (; next_deferred < pre.deferred.size() && current_sum() < result.baseline_pse; ++next_deferred) {
    const SliceRequest& d = pre.deferred[next_deferred];
    std::vector<SliceRequest> trial_set = active;
    trial_set.push_back(d);
    Trial t = run(trial_set);
    if (!t.ok) {
      const RejectReason why = t.near_zero.empty() ? RejectReason::infeasible : RejectReason::near_zero_allocation;
      result.rejected.push_back({d.tenant_id, why, 0.0});
      continue;
    }
    if (t.report.sum_pse > current_sum() * (1.0 + kStrictGain)) {
      active = std::move(trial_set);
      best = std::move(t.report);
    } else {
      result.rejected.push_back({d.tenant_id, RejectReason::worsens_sum_pse, t.report.sum_pse});
    }
  }
  for (; next_deferred < pre.deferred.size(); ++next_deferred) {
    result.rejected.push_back({pre.deferred[next_deferred].tenant_id, RejectReason::prefiltered, 0.0});
  }

  if (best) {
    result.admitted = best->allocations;
    for (auto& a : result.admitted) a.admitted = true;
    result.sum_pse = best->sum_pse;
  }
  result.gain = result.sum_pse / result.baseline_pse;
  return result;
}

}  // namespace ranslice
