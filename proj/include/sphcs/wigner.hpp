#pragma once

#include <cmath>
#include <memory>
#include <mutex>
#include <vector>

#include "sphcs/special.hpp"
#include "sphcs/types.hpp"

namespace sphcs {

namespace detail {

inline void check_wigner_index(int n, int mu, int m) {
  if (n < 0 || std::abs(m) > n || std::abs(mu) > n)
    throw std::invalid_argument("wigner: invalid index (need |m| <= n, |mu| <= n)");
}

}  // namespace detail

/// Wigner d-function d_n^{mu m}(beta), real, any real beta.
///
/// Evaluated from the explicit sum over sigma with all factorials accumulated
/// in log space; terms are summed relative to the largest log magnitude.
inline double wigner_d(int n, int mu, int m, double beta) {
  detail::check_wigner_index(n, mu, m);
  const double c = std::cos(beta / 2.0);
  const double s = std::sin(beta / 2.0);
  const int lo = std::max(0, m - mu);
  const int hi = std::min(n + m, n - mu);
  const double log_pref = 0.5 * (log_factorial(n + m) + log_factorial(n - m) +
                                 log_factorial(n + mu) + log_factorial(n - mu));

  // Collect signed log terms, then sum scaled by the max to avoid overflow.
  std::vector<double> logs;
  std::vector<double> signs;
  logs.reserve(hi - lo + 1);
  signs.reserve(hi - lo + 1);
  const double lc = std::log(std::abs(c));
  const double ls = std::log(std::abs(s));
  for (int sigma = lo; sigma <= hi; ++sigma) {
    const int pc = 2 * n - 2 * sigma + m - mu;
    const int ps = 2 * sigma - m + mu;
    if ((c == 0.0 && pc > 0) || (s == 0.0 && ps > 0)) continue;
    double lg = log_pref - log_factorial(sigma) - log_factorial(n + m - sigma) -
                log_factorial(n - mu - sigma) - log_factorial(mu - m + sigma);
    double sign = parity(sigma);
    if (pc > 0) {
      lg += pc * lc;
      if (c < 0.0) sign *= parity(pc);
    }
    if (ps > 0) {
      lg += ps * ls;
      if (s < 0.0) sign *= parity(ps);
    }
    logs.push_back(lg);
    signs.push_back(sign);
  }
  if (logs.empty()) return 0.0;
  double lmax = logs[0];
  for (double v : logs) lmax = std::max(lmax, v);
  double acc = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) acc += signs[i] * std::exp(logs[i] - lmax);
  return parity(mu - m) * std::exp(lmax) * acc;
}

/// Wigner D-function D_n^{mu m}(alpha, beta, gamma)
///   = e^{-i mu alpha} d_n^{mu m}(beta) e^{-i m gamma}.
inline cplx wigner_D(int n, int mu, int m, double alpha, double beta, double gamma) {
  detail::check_wigner_index(n, mu, m);
  return std::exp(cplx(0.0, -(mu * alpha + m * gamma))) * wigner_d(n, mu, m, beta);
}

/// Table of half-angle values Delta_n^{m',m} = d_n^{m' m}(pi/2).
///
/// Built by the Trapani-Navaza recurrence over the non-negative quadrant and
/// extended by the sign symmetries
///   Delta_{-m',m} = (-1)^{n-m} Delta_{m',m},
///   Delta_{m',-m} = (-1)^{n+m'} Delta_{m',m}.
/// The direct sigma-sum at pi/2 cancels catastrophically past n ~ 20; the
/// recurrence keeps the orthonormality residual at 1e-13 up to n = 64.
class DeltaMatrix {
 public:
  explicit DeltaMatrix(int n) : n_(n), table_((2 * n + 1) * (2 * n + 1)) {
    // quad[l][m][k] = d_l^{m k}(pi/2) for 0 <= m, k <= l, built up in l.
    std::vector<std::vector<double>> prev(1, std::vector<double>(1, 1.0));
    for (int l = 1; l <= n; ++l) {
      std::vector<std::vector<double>> cur(l + 1, std::vector<double>(l + 1, 0.0));
      cur[l][0] = -std::sqrt((2.0 * l - 1.0) / (2.0 * l)) * prev[l - 1][0];
      for (int k = 1; k <= l; ++k)
        cur[l][k] = std::sqrt((l / 2.0) * (2.0 * l - 1.0) /
                              (static_cast<double>(l + k) * (l + k - 1.0))) *
                    prev[l - 1][k - 1];
      for (int m = l - 1; m >= 0; --m) {
        const double den = std::sqrt(static_cast<double>(l - m) * (l + m + 1.0));
        for (int k = 0; k <= l; ++k) {
          double v = (2.0 * k / den) * cur[m + 1][k];
          if (m + 2 <= l)
            v -= std::sqrt((l - m - 1.0) * (l + m + 2.0)) / den * cur[m + 2][k];
          cur[m][k] = v;
        }
      }
      prev.swap(cur);
    }
    for (int mp = 0; mp <= n; ++mp)
      for (int m = 0; m <= n; ++m) {
        const double v = prev[mp][m];
        table_[idx(mp, m)] = v;
        table_[idx(-mp, m)] = parity(n - m) * v;
        table_[idx(mp, -m)] = parity(n + mp) * v;
        table_[idx(-mp, -m)] = parity(n - m) * parity(n + mp) * v;
      }
  }

  int order() const { return n_; }

  double operator()(int mp, int m) const {
    if (std::abs(mp) > n_ || std::abs(m) > n_)
      throw std::invalid_argument("DeltaMatrix: index out of range");
    return table_[idx(mp, m)];
  }

  /// Delta_n^{m',m} with out-of-range m' treated as zero (the padded
  /// frequency convention for the extended index cube).
  double padded(int mp, int m) const {
    if (std::abs(mp) > n_) return 0.0;
    return table_[idx(mp, m)];
  }

 private:
  std::size_t idx(int mp, int m) const {
    return static_cast<std::size_t>(mp + n_) * (2 * n_ + 1) + (m + n_);
  }
  int n_;
  std::vector<double> table_;
};

/// Shared immutable cache of Delta tables; safe for concurrent read once built.
inline const DeltaMatrix& delta_matrix(int n) {
  if (n < 0) throw std::invalid_argument("delta_matrix: n must be >= 0");
  static std::mutex mtx;
  static std::vector<std::unique_ptr<DeltaMatrix>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  if (static_cast<std::size_t>(n) >= cache.size()) cache.resize(n + 1);
  if (!cache[n]) cache[n] = std::make_unique<DeltaMatrix>(n);
  return *cache[n];
}

/// Evaluates the band-limited Fourier series for d_n^{mu m}(beta):
///   i^{mu-m} sum_{m'=-n}^{n} Delta_n^{m',mu} Delta_n^{m',m} e^{-i m' beta}.
/// The result is real up to roundoff; the imaginary residue is checked against
/// `imag_tol` and discarded.
inline double wigner_d_fourier_synthesis(int n, int mu, int m, double beta,
                                         double imag_tol = 1e-10) {
  detail::check_wigner_index(n, mu, m);
  const DeltaMatrix& delta = delta_matrix(n);
  cplx acc(0.0, 0.0);
  for (int mp = -n; mp <= n; ++mp)
    acc += delta(mp, mu) * delta(mp, m) * std::exp(cplx(0.0, -mp * beta));
  acc *= ipow(mu - m);
  if (std::abs(acc.imag()) > imag_tol)
    throw std::runtime_error("wigner_d_fourier_synthesis: imaginary residue above tolerance");
  return acc.real();
}

}  // namespace sphcs
