#pragma once

// Network description and the closed-form potential spectral efficiency
// (PSE, bit/s/m^2) of a tenant whose mobile terminals form a PPP of density
// lambda_T, served with transmit power P and bandwidth B:
//
//   PSE = B log2(1+gI) lBS L / (1 + L U) * [1 - exp(-pi lBS (tauA P/B)^(2/beta) (1 + L U))]
//
// with L = load_factor(lambda_T / lBS) and U = upsilon(gI, beta).
// Everything here is linear SI; dB conversions live in config.hpp.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ranslice/errors.hpp"
#include "ranslice/specfun.hpp"

namespace ranslice {

struct NetworkParams {
  double lambda_bs = 0;  // BS density, 1/m^2
  double beta = 0;       // path-loss exponent, > 2
  double kappa = 0;      // path-loss constant (4 pi / wavelength)^2
  double n0 = 0;         // noise PSD, W/Hz
  double gamma_i = 0;    // decoding SIR threshold, linear
  double gamma_a = 0;    // detection SNR threshold, linear
  double b_tot = 0;      // Hz
  double p_tot = 0;      // W

  /// Detection constant 1 / (kappa gamma_A N0).
  double tau_a() const { return 1.0 / (kappa * gamma_a * n0); }
  void validate() const;
};

struct SliceRequest {
  std::string tenant_id;
  double lambda_t = 0;  // MT density, 1/m^2
  double alpha = 0;     // SLA as a fraction of PSE_NoSlicing
};

struct Allocation {
  std::string tenant_id;
  double bandwidth = 0;  // Hz
  double power = 0;      // W
  bool admitted = false;
  double achieved_pse = 0;
};

template <typename Scalar>
struct PseGradient {
  Scalar d_bandwidth = 0;
  Scalar d_power = 0;
};

/// BS activity factor 1 - (1 + ratio/3.5)^-3.5, in [0, 1).
template <typename Scalar>
Scalar load_factor(Scalar ratio) {
  if (!(ratio >= Scalar(0))) throw DomainError("load_factor: density ratio must be >= 0");
  if (std::isinf(ratio)) return Scalar(1);
  // -expm1(-3.5 log1p(r/3.5)) keeps precision at small ratios.
  return -std::expm1(Scalar(-3.5) * std::log1p(ratio / Scalar(3.5)));
}

/// Probability that a typical MT shares its cell with n other MTs.
double cell_load_pmf(std::int64_t n, double ratio);

/// Smallest N such that sum_{n>=N} cell_load_pmf(n, ratio) <= tail_tol,
/// certified by a geometric bound on the term ratio.
struct PmfTruncation {
  std::int64_t terms = 0;
  double tail_bound = 0;
};
PmfTruncation cell_load_truncation(double ratio, double tail_tol);

/// PSE kernel with the parameter-only factors (Upsilon, tau_A^(2/beta))
/// evaluated once. Cheap to call; safe to share across threads.
template <typename Scalar = double>
class PseModel {
 public:
  explicit PseModel(const NetworkParams& params, const SpecFunConfig& cfg = {})
      : params_(params) {
    params.validate();
    delta_ = Scalar(2) / Scalar(params.beta);
    upsilon_ = upsilon(Scalar(params.gamma_i), Scalar(params.beta), cfg);
    rate_ = std::log2(Scalar(1) + Scalar(params.gamma_i));
    lambda_bs_ = Scalar(params.lambda_bs);
    detect_scale_ = std::numbers::pi_v<Scalar> * lambda_bs_ *
                    std::pow(Scalar(params.tau_a()), delta_);
  }

  const NetworkParams& params() const { return params_; }
  Scalar upsilon_value() const { return upsilon_; }

  Scalar operator()(Scalar power, Scalar bandwidth, Scalar lambda_t) const {
    check(power, bandwidth, lambda_t);
    if (bandwidth == Scalar(0) || lambda_t == Scalar(0)) return Scalar(0);
    const Terms t = terms(power, bandwidth, lambda_t);
    return bandwidth * t.amplitude * -std::expm1(-t.exponent);
  }

  /// Analytic partial derivatives w.r.t. bandwidth and power.
  PseGradient<Scalar> gradient(Scalar power, Scalar bandwidth, Scalar lambda_t) const {
    check(power, bandwidth, lambda_t);
    PseGradient<Scalar> g;
    if (lambda_t == Scalar(0)) return g;
    if (bandwidth == Scalar(0)) {
      // Limit P/B -> inf: the bracket saturates at one.
      g.d_bandwidth = power > Scalar(0) ? amplitude(lambda_t) : Scalar(0);
      g.d_power = 0;
      return g;
    }
    const Terms t = terms(power, bandwidth, lambda_t);
    const Scalar survive = std::exp(-t.exponent);
    // x = c (P/B)^d:  dx/dP = d x / P,  dx/dB = -d x / B.
    g.d_bandwidth = t.amplitude * (-std::expm1(-t.exponent) - survive * delta_ * t.exponent);
    if (power > Scalar(0)) {
      g.d_power = t.amplitude * survive * delta_ * t.exponent * bandwidth / power;
    } else {
      g.d_power = std::numeric_limits<Scalar>::infinity();
    }
    return g;
  }

  /// Per-Hz spectral factor log2(1+gI) lBS L / (1 + L U).
  Scalar amplitude(Scalar lambda_t) const {
    const Scalar load = load_factor(lambda_t / lambda_bs_);
    return rate_ * lambda_bs_ * load / (Scalar(1) + load * upsilon_);
  }

 private:
  struct Terms {
    Scalar amplitude;
    Scalar exponent;
  };

  static void check(Scalar power, Scalar bandwidth, Scalar lambda_t) {
    if (!(power >= Scalar(0)) || !(bandwidth >= Scalar(0)) || !(lambda_t >= Scalar(0))) {
      throw DomainError("pse: power, bandwidth and lambda_t must be >= 0");
    }
  }

  Terms terms(Scalar power, Scalar bandwidth, Scalar lambda_t) const {
    const Scalar load = load_factor(lambda_t / lambda_bs_);
    const Scalar spread = Scalar(1) + load * upsilon_;
    return {rate_ * lambda_bs_ * load / spread,
            detect_scale_ * std::pow(power / bandwidth, delta_) * spread};
  }

  NetworkParams params_;
  Scalar delta_{};
  Scalar upsilon_{};
  Scalar rate_{};
  Scalar lambda_bs_{};
  Scalar detect_scale_{};
};

/// One-shot evaluation; builds a PseModel per call.
double pse(double power, double bandwidth, double lambda_t, const NetworkParams& params);

/// PSE of the pooled, non-sliced network serving every request.
double pse_no_slicing(const NetworkParams& params, std::span<const SliceRequest> requests);
double pse_no_slicing(const PseModel<double>& model, std::span<const SliceRequest> requests);

}  // namespace ranslice
