#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "sphcs/types.hpp"

namespace sphcs {

/// log(k!) via lgamma. Stable for the large factorial products that appear in
/// the Wigner d sum up to n = 64, where naive factorials overflow near n = 20.
inline double log_factorial(int k) {
  if (k < 0) throw std::invalid_argument("log_factorial: negative argument");
  return std::lgamma(static_cast<double>(k) + 1.0);
}

/// Spherical Hankel function of the first kind h_n^{(1)}(x), x > 0.
/// Upward recurrence from the closed forms at n = 0, 1.
inline cplx spherical_hankel1(int n, double x) {
  if (n < 0) throw std::invalid_argument("spherical_hankel1: n must be >= 0");
  if (!(x > 0.0)) throw std::domain_error("spherical_hankel1: x must be positive");
  const cplx eix = std::exp(cplx(0.0, x));
  cplx h0 = cplx(0.0, -1.0) * eix / x;
  if (n == 0) return h0;
  cplx h1 = -(cplx(1.0 / x, 0.0) + cplx(0.0, 1.0 / (x * x))) * eix;
  for (int k = 1; k < n; ++k) {
    // h_{k+1} = (2k+1)/x h_k - h_{k-1}; stable upward for h (it grows with n)
    cplx h2 = (2.0 * k + 1.0) / x * h1 - h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

}  // namespace sphcs
