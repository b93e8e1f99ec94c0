#include "ranslice/model.hpp"

#include <limits>
#include <sstream>

namespace ranslice {

void NetworkParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << "NetworkParams." << name << " must be finite and > 0, got " << v;
      throw DomainError(os.str());
    }
  };
  positive(lambda_bs, "lambda_bs");
  positive(beta, "beta");
  positive(kappa, "kappa");
  positive(n0, "n0");
  positive(gamma_i, "gamma_i");
  positive(gamma_a, "gamma_a");
  positive(b_tot, "b_tot");
  positive(p_tot, "p_tot");
  if (!(beta > 2.0)) throw DomainError("NetworkParams.beta must be > 2");
  const double tau = tau_a();
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("NetworkParams: tau_a is not finite");
}

double cell_load_pmf(std::int64_t n, double ratio) {
  if (n < 0) throw DomainError("cell_load_pmf: n must be >= 0");
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw DomainError("cell_load_pmf: ratio must be > 0");
  const double k = static_cast<double>(n);
  const double log_p = 3.5 * std::log(3.5) + ln_gamma(k + 4.5) - ln_gamma(3.5) - ln_gamma(k + 1.0) +
                       k * std::log(ratio) - (k + 4.5) * std::log(3.5 + ratio);
  return std::exp(log_p);
}

PmfTruncation cell_load_truncation(double ratio, double tail_tol) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw DomainError("cell_load_truncation: ratio must be > 0");
  if (!(tail_tol > 0.0)) throw DomainError("cell_load_truncation: tail_tol must be > 0");
  const double q = ratio / (3.5 + ratio);
  // p(n+1)/p(n) = q (n+4.5)/(n+1), decreasing in n towards q < 1.
  for (std::int64_t n = 0;; ++n) {
    const double step = q * (static_cast<double>(n) + 4.5) / (static_cast<double>(n) + 1.0);
    if (step < 1.0) {
      const double bound = cell_load_pmf(n, ratio) / (1.0 - step);
      if (bound <= tail_tol) return {n, bound};
    }
    if (n > 100'000'000) throw ConvergenceError("cell_load_truncation: tail bound not reached", std::numeric_limits<double>::quiet_NaN());
  }
}

double pse(double power, double bandwidth, double lambda_t, const NetworkParams& params) {
  return PseModel<double>(params)(power, bandwidth, lambda_t);
}

double pse_no_slicing(const PseModel<double>& model, std::span<const SliceRequest> requests) {
  if (requests.empty()) throw DomainError("pse_no_slicing: empty request list");
  double lambda = 0.0;
  for (const auto& r : requests) lambda += r.lambda_t;
  return model(model.params().p_tot, model.params().b_tot, lambda);
}

double pse_no_slicing(const NetworkParams& params, std::span<const SliceRequest> requests) {
  return pse_no_slicing(PseModel<double>(params), requests);
}

}  // namespace ranslice
