#pragma once

// Special-function kernels behind the closed-form spectral efficiency.
//
// Only the hypergeometric family 2F1(-d, 1; 1-d; -g) with d = 2/beta in (0,1)
// and g >= 0 is supported. Three evaluation routes, picked by g:
//
//   g <  0.9   direct power series, Pochhammer ratio -d/(k-d)
//   g <= 2     Pfaff:  (1+g)^-1 2F1(1, 1; 1-d; g/(1+g))
//   g >  2     1/z connection formula:
//              pi d / sin(pi d) g^d + d sum_k (-1)^k g^-(k+1) / (1+d+k)
//
// Every route converges geometrically with ratio <= 0.9, 2/3 and 1/2.

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "ranslice/errors.hpp"

namespace ranslice {

struct SpecFunConfig {
  double series_tol = 1e-15;
  int max_terms = 100000;
  int quad_points = 20000;  // oracle quadrature nodes (20-point panels)

  void validate() const {
    if (!(series_tol > 0.0 && series_tol < 1e-3)) {
      throw DomainError("SpecFunConfig: series_tol must lie in (0, 1e-3)");
    }
    if (max_terms < 100) throw DomainError("SpecFunConfig: max_terms must be >= 100");
    if (quad_points < 20) throw DomainError("SpecFunConfig: quad_points must be >= 20");
  }
};

namespace detail {

template <typename Scalar>
void check_slice_domain(Scalar beta, Scalar gamma) {
  if (!(beta > Scalar(2)) || !std::isfinite(beta)) {
    std::ostringstream os;
    os << "path-loss exponent must be finite and > 2, got " << beta;
    throw DomainError(os.str());
  }
  if (!(gamma >= Scalar(0)) || !std::isfinite(gamma)) {
    std::ostringstream os;
    os << "SIR threshold must be finite and >= 0 (linear scale), got " << gamma;
    throw DomainError(os.str());
  }
}

[[noreturn]] inline void not_converged(const char* route, int terms, double partial) {
  std::ostringstream os;
  os << "2F1 " << route << " series did not converge within " << terms << " terms";
  throw ConvergenceError(os.str(), partial);
}

// sum_{k>=1} [-d/(k-d)] (-g)^k, i.e. 2F1 - 1 without the cancellation.
template <typename Scalar>
Scalar direct_tail(Scalar delta, Scalar gamma, const SpecFunConfig& cfg) {
  Scalar sum = 0;
  Scalar power = 1;
  for (int k = 1; k <= cfg.max_terms; ++k) {
    power *= -gamma;
    const Scalar term = -delta / (Scalar(k) - delta) * power;
    sum += term;
    // Alternating series with decreasing terms: truncation error < next term.
    if (std::abs(term) <= Scalar(cfg.series_tol) * std::abs(sum)) return sum;
  }
  not_converged("direct", cfg.max_terms, static_cast<double>(Scalar(1) + sum));
}

template <typename Scalar>
Scalar pfaff(Scalar delta, Scalar gamma, const SpecFunConfig& cfg) {
  const Scalar w = gamma / (Scalar(1) + gamma);
  Scalar term = 1;
  Scalar sum = 1;
  for (int k = 0; k < cfg.max_terms; ++k) {
    const Scalar ratio = Scalar(k + 1) / (Scalar(k + 1) - delta) * w;
    term *= ratio;
    sum += term;
    // Positive terms; once the ratio is below one the tail is geometric.
    if (ratio < Scalar(1) && term / (Scalar(1) - ratio) <= Scalar(cfg.series_tol) * sum) {
      return sum / (Scalar(1) + gamma);
    }
  }
  not_converged("Pfaff", cfg.max_terms, static_cast<double>(sum / (Scalar(1) + gamma)));
}

template <typename Scalar>
Scalar inverted(Scalar delta, Scalar gamma, const SpecFunConfig& cfg) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar lead = pi * delta / std::sin(pi * delta) * std::pow(gamma, delta);
  Scalar sum = 0;
  Scalar power = Scalar(1) / gamma;
  for (int k = 0; k < cfg.max_terms; ++k) {
    const Scalar term = power / (Scalar(1) + delta + Scalar(k));
    sum += (k % 2 == 0) ? term : -term;
    if (delta * term <= Scalar(cfg.series_tol) * (lead + delta * std::abs(sum))) {
      return lead + delta * sum;
    }
    power /= gamma;
  }
  not_converged("inverted", cfg.max_terms, static_cast<double>(lead + delta * sum));
}

}  // namespace detail

/// 2F1(-2/beta, 1; 1-2/beta; -gamma). Always >= 1.
template <typename Scalar>
Scalar gauss_2f1_slice(Scalar beta, Scalar gamma, const SpecFunConfig& cfg = {}) {
  detail::check_slice_domain(beta, gamma);
  const Scalar delta = Scalar(2) / beta;
  if (gamma == Scalar(0)) return Scalar(1);
  if (gamma < Scalar(0.9)) return Scalar(1) + detail::direct_tail(delta, gamma, cfg);
  if (gamma <= Scalar(2)) return detail::pfaff(delta, gamma, cfg);
  return detail::inverted(delta, gamma, cfg);
}

/// Interference functional Upsilon(gamma_I, beta) = 2F1(...) - 1 >= 0.
template <typename Scalar>
Scalar upsilon(Scalar gamma_i, Scalar beta, const SpecFunConfig& cfg = {}) {
  detail::check_slice_domain(beta, gamma_i);
  const Scalar delta = Scalar(2) / beta;
  if (gamma_i == Scalar(0)) return Scalar(0);
  if (gamma_i < Scalar(0.9)) return detail::direct_tail(delta, gamma_i, cfg);
  return gauss_2f1_slice(beta, gamma_i, cfg) - Scalar(1);
}

template <typename Scalar>
Scalar ln_gamma(Scalar x) {
  if (!(x > Scalar(0)) || !std::isfinite(x)) {
    std::ostringstream os;
    os << "ln_gamma requires finite x > 0, got " << x;
    throw DomainError(os.str());
  }
  return boost::math::lgamma(x);
}

}  // namespace ranslice
