#pragma once

// Independent quadrature oracle for Upsilon. Test-side only: it shares no
// code path with the series kernels in specfun.hpp.
//
//   Upsilon(g, beta) = g^d * Int_{g^-d}^inf du / (1 + u^(beta/2)),  d = 2/beta
//
// The semi-infinite tail is mapped to (0, 1] with u = a t^-m,
// m = 4/(beta-2), which makes the integrand vanish linearly at t = 0.

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "ranslice/errors.hpp"
#include "ranslice/specfun.hpp"

namespace ranslice::oracle {

namespace detail {

template <typename Scalar>
Scalar composite_tail_integral(Scalar lower, Scalar beta, int panels) {
  const Scalar half_beta = beta / Scalar(2);
  const Scalar m = Scalar(4) / (beta - Scalar(2));
  auto integrand = [&](Scalar t) -> Scalar {
    if (t <= Scalar(0)) return Scalar(0);
    const Scalar v = lower * std::pow(t, -m);
    return m * v / t / (Scalar(1) + std::pow(v, half_beta));
  };
  Scalar total = 0;
  const Scalar width = Scalar(1) / Scalar(panels);
  for (int i = 0; i < panels; ++i) {
    const Scalar a = width * Scalar(i);
    const Scalar b = (i + 1 == panels) ? Scalar(1) : width * Scalar(i + 1);
    total += boost::math::quadrature::gauss<Scalar, 20>::integrate(integrand, a, b);
  }
  return total;
}

}  // namespace detail

template <typename Scalar>
Scalar upsilon_oracle(Scalar gamma_i, Scalar beta, const SpecFunConfig& cfg = {}) {
  ranslice::detail::check_slice_domain(beta, gamma_i);
  if (!(gamma_i > Scalar(0))) throw DomainError("upsilon_oracle requires gamma_I > 0");
  const Scalar delta = Scalar(2) / beta;
  const Scalar lower = std::pow(gamma_i, -delta);
  const int panels = std::max(2, cfg.quad_points / 20);
  const Scalar fine = detail::composite_tail_integral(lower, beta, panels);
  const Scalar coarse = detail::composite_tail_integral(lower, beta, panels / 2);
  if (!std::isfinite(fine) || std::abs(fine - coarse) > Scalar(1e-10) * std::abs(fine)) {
    std::ostringstream os;
    os << "upsilon_oracle: quadrature not converged at gamma=" << gamma_i << " beta=" << beta;
    throw ConvergenceError(os.str(), static_cast<double>(std::pow(gamma_i, delta) * fine));
  }
  return std::pow(gamma_i, delta) * fine;
}

}  // namespace ranslice::oracle
