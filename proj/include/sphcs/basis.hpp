#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <utility>

#include "sphcs/types.hpp"
#include "sphcs/wigner.hpp"

namespace sphcs {

/// Per-subspace block B^{m mu} mapping the n-indexed Wigner coefficients of
/// one (m, mu) subspace to its m'-indexed Fourier coefficients.
///
/// Rows follow m' = -n_max-1 ... n_max (the first row is the zero-padded
/// frequency and is identically zero); columns follow n = max(|m|,|mu|) ... n_max.
struct SubspaceTransform {
  int m = 0;
  int mu = 0;
  int n_min = 0;
  BandLimit band_limit;
  Eigen::MatrixXcd matrix;

  int row_of(int mp) const { return mp + band_limit.n_max + 1; }
  int col_of(int n) const { return n - n_min; }
};

inline SubspaceTransform build_subspace_transform(int m, int mu, const BandLimit& bl) {
  if (std::abs(m) > bl.n_max || std::abs(mu) > bl.n_max)
    throw std::invalid_argument("build_subspace_transform: |m|, |mu| must be <= n_max");
  SubspaceTransform t;
  t.m = m;
  t.mu = mu;
  t.band_limit = bl;
  t.n_min = std::max(std::abs(m), std::abs(mu));
  const int rows = bl.side();
  const int cols = bl.n_max + 1 - t.n_min;
  t.matrix = Eigen::MatrixXcd::Zero(rows, cols);
  const cplx phase = ipow(mu - m);
  for (int n = t.n_min; n <= bl.n_max; ++n) {
    const DeltaMatrix& del = delta_matrix(n);
    for (int mp = -n; mp <= n; ++mp)
      t.matrix(t.row_of(mp), t.col_of(n)) = phase * del(mp, mu) * del(mp, m);
  }
  return t;
}

/// Forward map a -> b. Only (m, mu) subspaces holding nonzero a contribute;
/// the block structure never mixes subspaces.
inline FourierCoefficients a_to_b(const WignerCoefficients& a, int dims = 3) {
  if (dims == 2 && !a.mu_zero_only())
    throw std::invalid_argument("a_to_b: 2D transform requires mu = 0 coefficients only");
  FourierCoefficients b(a.band_limit, dims);
  for (const auto& [idx, value] : a.entries) {
    if (value == cplx(0.0)) continue;
    const DeltaMatrix& del = delta_matrix(idx.n);
    const cplx phase = ipow(idx.mu - idx.m) * value;
    for (int mp = -idx.n; mp <= idx.n; ++mp)
      b.at(mp, idx.m, idx.mu) += phase * del(mp, idx.mu) * del(mp, idx.m);
  }
  return b;
}

struct BtoAReport {
  WignerCoefficients a;
  /// residual 2-norm of the least-squares fit per (m, mu) subspace
  std::map<std::pair<int, int>, double> residuals;
  double max_residual = 0.0;
  /// energy found in the zero-padded slices (exactly zero for b in range)
  double padded_energy = 0.0;
  /// subspaces whose residual exceeded the configured tolerance
  int flagged_subspaces = 0;
};

/// Inverse map b -> a by per-subspace QR least squares. Residuals above
/// `residual_tol` are flagged in the report, not fatal.
inline BtoAReport b_to_a(const FourierCoefficients& b, double residual_tol = 1e-8) {
  const BandLimit& bl = b.band_limit;
  BtoAReport rep;
  rep.a = WignerCoefficients(bl);
  const int pad = -bl.n_max - 1;

  for (int m = pad; m <= bl.n_max; ++m)
    for (int mu = (b.dims == 2 ? 0 : pad); mu <= (b.dims == 2 ? 0 : bl.n_max); ++mu) {
      Eigen::VectorXcd rhs(bl.side());
      double energy = 0.0;
      for (int mp = pad; mp <= bl.n_max; ++mp) {
        rhs(mp - pad) = b.at(mp, m, mu);
        energy += std::norm(rhs(mp - pad));
      }
      if (m == pad || mu == pad) {
        rep.padded_energy += energy;
        continue;
      }
      if (energy == 0.0) {
        rep.residuals[{m, mu}] = 0.0;
        continue;
      }
      const SubspaceTransform t = build_subspace_transform(m, mu, bl);
      Eigen::VectorXcd sol = t.matrix.colPivHouseholderQr().solve(rhs);
      const double resid = (t.matrix * sol - rhs).norm();
      rep.residuals[{m, mu}] = resid;
      rep.max_residual = std::max(rep.max_residual, resid);
      if (resid > residual_tol) ++rep.flagged_subspaces;
      for (int n = t.n_min; n <= bl.n_max; ++n) {
        const cplx v = sol(t.col_of(n));
        if (v != cplx(0.0)) rep.a.set({n, m, mu}, v);
      }
    }
  // energy on a padded m or mu slice also counts toward the worst residual
  rep.max_residual = std::max(rep.max_residual, std::sqrt(rep.padded_energy));
  return rep;
}

struct SparsityReport {
  std::int64_t s = 0;           // nonzeros above threshold
  std::int64_t n_subspaces = 0; // occupied (m, mu) subspaces
  /// sum over occupied subspaces of (2 n_max^{m mu} + 1), with n_max^{m mu}
  /// the largest occupied order in the subspace
  std::int64_t subspace_bound = 0;
  /// worst-case bound (2 n_max + 2) * n_subspaces
  std::int64_t worst_case_bound = 0;
};

/// Nonzero threshold is relative to the max magnitude; "nonzero to floating
/// point precision" means anything above 1e-12 of the peak.
inline SparsityReport sparsity_report(const WignerCoefficients& a, double rel_tol = 1e-12) {
  SparsityReport r;
  double peak = 0.0;
  for (const auto& [k, v] : a.entries) peak = std::max(peak, std::abs(v));
  const double thr = peak * rel_tol;
  std::map<std::pair<int, int>, int> top_n;
  for (const auto& [k, v] : a.entries) {
    if (std::abs(v) <= thr || peak == 0.0) continue;
    ++r.s;
    auto key = std::make_pair(k.m, k.mu);
    auto it = top_n.find(key);
    if (it == top_n.end())
      top_n[key] = k.n;
    else
      it->second = std::max(it->second, k.n);
  }
  r.n_subspaces = static_cast<std::int64_t>(top_n.size());
  for (const auto& [key, nmax] : top_n) r.subspace_bound += 2 * nmax + 1;
  r.worst_case_bound = r.n_subspaces * a.band_limit.side();
  return r;
}

inline SparsityReport sparsity_report(const FourierCoefficients& b, double rel_tol = 1e-12) {
  SparsityReport r;
  const BandLimit& bl = b.band_limit;
  double peak = 0.0;
  for (const cplx& v : b.values) peak = std::max(peak, std::abs(v));
  const double thr = peak * rel_tol;
  const int pad = -bl.n_max - 1;
  std::map<std::pair<int, int>, int> top_abs_mp;
  for (int m = pad; m <= bl.n_max; ++m)
    for (int mu = (b.dims == 2 ? 0 : pad); mu <= (b.dims == 2 ? 0 : bl.n_max); ++mu)
      for (int mp = pad; mp <= bl.n_max; ++mp) {
        if (peak == 0.0 || std::abs(b.at(mp, m, mu)) <= thr) continue;
        ++r.s;
        auto key = std::make_pair(m, mu);
        auto it = top_abs_mp.find(key);
        const int amp = std::abs(mp);
        if (it == top_abs_mp.end())
          top_abs_mp[key] = amp;
        else
          it->second = std::max(it->second, amp);
      }
  r.n_subspaces = static_cast<std::int64_t>(top_abs_mp.size());
  for (const auto& [key, amp] : top_abs_mp) r.subspace_bound += 2 * amp + 1;
  r.worst_case_bound = r.n_subspaces * bl.side();
  return r;
}

}  // namespace sphcs
