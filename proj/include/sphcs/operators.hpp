#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "sphcs/fft.hpp"
#include "sphcs/grid.hpp"
#include "sphcs/types.hpp"
#include "sphcs/wigner.hpp"

namespace sphcs {

inline SampleSelection full_selection(const SampleGrid& grid, const PhysicalMap& pmap) {
  SampleSelection sel;
  sel.rows.resize(grid.total_rows());
  std::iota(sel.rows.begin(), sel.rows.end(), 0);
  sel.physical_count = pmap.physical_count();
  return sel;
}

/// Sub-sampled multi-dimensional DFT measurement operator P_Omega U_F.
///
/// Columns are the frequencies of the Nyquist cube [-n_max-1, n_max]^dims in
/// the canonical (m, mu, m') flat order; rows are the selected torus grid
/// rows. With oversample = 1 and full selection the operator is unitary
/// (entries of modulus 1/sqrt(N)); with oversample > 1 it is a column subset
/// of the larger unitary DFT and has orthonormal columns.
class DftOperator {
 public:
  DftOperator(const SampleGrid& grid, SampleSelection selection)
      : grid_(grid),
        sel_(std::move(selection)),
        fft_(std::make_unique<Fft>(grid.side(), grid.dims)) {
    const BandLimit& bl = grid.band_limit;
    const int L = grid.side();
    norm_ = 1.0 / std::sqrt(static_cast<double>(grid.total_rows()));
    col_to_buf_.reserve(grid.dims == 2 ? bl.fourier_count_2d() : bl.fourier_count());
    const int pad = -bl.n_max - 1;
    auto wrap = [L](int f) { return ((f % L) + L) % L; };
    if (grid.dims == 2) {
      for (int m = pad; m <= bl.n_max; ++m)
        for (int mp = pad; mp <= bl.n_max; ++mp)
          col_to_buf_.push_back(static_cast<std::int64_t>(wrap(mp)) * L + wrap(m));
    } else {
      for (int m = pad; m <= bl.n_max; ++m)
        for (int mu = pad; mu <= bl.n_max; ++mu)
          for (int mp = pad; mp <= bl.n_max; ++mp)
            col_to_buf_.push_back(
                (static_cast<std::int64_t>(wrap(mu)) * L + wrap(mp)) * L + wrap(m));
    }
  }

  std::int64_t rows() const { return static_cast<std::int64_t>(sel_.rows.size()); }
  std::int64_t cols() const { return static_cast<std::int64_t>(col_to_buf_.size()); }
  const SampleGrid& grid() const { return grid_; }
  const SampleSelection& selection() const { return sel_; }

  /// y = P_Omega U_F z
  Eigen::VectorXcd apply(const Eigen::VectorXcd& z) const {
    if (z.size() != cols()) throw std::invalid_argument("DftOperator::apply: shape mismatch");
    auto& buf = fft_->buffer();
    std::fill(buf.begin(), buf.end(), cplx(0.0));
    for (std::int64_t c = 0; c < cols(); ++c) buf[col_to_buf_[c]] = z(c);
    fft_->forward();
    Eigen::VectorXcd y(rows());
    for (std::int64_t i = 0; i < rows(); ++i) y(i) = norm_ * buf[sel_.rows[i]];
    return y;
  }

  /// z = (P_Omega U_F)^* y
  Eigen::VectorXcd applyAdjoint(const Eigen::VectorXcd& y) const {
    if (y.size() != rows())
      throw std::invalid_argument("DftOperator::applyAdjoint: shape mismatch");
    auto& buf = fft_->buffer();
    std::fill(buf.begin(), buf.end(), cplx(0.0));
    for (std::int64_t i = 0; i < rows(); ++i) buf[sel_.rows[i]] = y(i);
    fft_->backward();
    Eigen::VectorXcd z(cols());
    for (std::int64_t c = 0; c < cols(); ++c) z(c) = norm_ * buf[col_to_buf_[c]];
    return z;
  }

  /// sqrt(N) scaling between physical Fourier coefficients b and the solver
  /// variable b' = sqrt(N) b.
  double bprime_scale() const { return 1.0 / norm_; }

 private:
  SampleGrid grid_;
  SampleSelection sel_;
  std::unique_ptr<Fft> fft_;  // scratch; one operator instance per task
  std::vector<std::int64_t> col_to_buf_;
  double norm_;
};

inline Eigen::VectorXcd fourier_to_vector(const FourierCoefficients& b) {
  return Eigen::Map<const Eigen::VectorXcd>(b.values.data(), b.values.size());
}

inline FourierCoefficients vector_to_fourier(const Eigen::VectorXcd& v, const BandLimit& bl,
                                             int dims) {
  FourierCoefficients b(bl, dims);
  if (v.size() != static_cast<std::int64_t>(b.values.size()))
    throw std::invalid_argument("vector_to_fourier: size mismatch");
  Eigen::Map<Eigen::VectorXcd>(b.values.data(), b.values.size()) = v;
  return b;
}

/// Measured complex values per selected torus row, plus the noise metadata
/// handed to the recovery program.
struct MeasurementSet {
  Eigen::VectorXcd values;
  double noise_std = 0.0;
  double eps = 0.0;  // per-sample l-infinity noise bound fed to QCBP
  std::string noise_model = "none";
};

/// Direct Wigner-series field evaluation at the selected rows. Rows landing
/// in the same physical class share one field value and one noise draw by
/// default (one microphone, one reading); `shared_noise = false` draws noise
/// independently per torus row instead.
///
/// eps is set to 3 * noise_std (covers ~99.9% of per-sample Gaussian draws).
inline MeasurementSet simulate(const WignerCoefficients& a, const SampleGrid& grid,
                               const PhysicalMap& pmap, const SampleSelection& sel,
                               double noise_std, std::uint64_t seed,
                               bool shared_noise = true) {
  if (noise_std < 0.0) throw std::invalid_argument("simulate: noise_std must be >= 0");
  // group coefficients by (m, mu) so the beta-dependent factor is cached
  std::map<std::pair<int, int>, std::vector<std::pair<int, cplx>>> groups;
  for (const auto& [idx, v] : a.entries)
    if (v != cplx(0.0)) groups[{idx.m, idx.mu}].emplace_back(idx.n, v);

  std::map<int, std::vector<cplx>> beta_cache;  // u_beta -> per-group g value
  auto group_values = [&](int u_beta) -> const std::vector<cplx>& {
    auto it = beta_cache.find(u_beta);
    if (it != beta_cache.end()) return it->second;
    const double beta = grid.angle(u_beta);
    std::vector<cplx> g;
    g.reserve(groups.size());
    for (const auto& [key, terms] : groups) {
      cplx acc(0.0);
      for (const auto& [n, v] : terms) acc += v * wigner_d(n, key.second, key.first, beta);
      g.push_back(acc);
    }
    return beta_cache.emplace(u_beta, std::move(g)).first->second;
  };

  auto field_at_row = [&](std::int64_t r) {
    const SampleGrid::Point p = grid.point(r);
    const std::vector<cplx>& g = group_values(p.u_beta);
    cplx acc(0.0);
    std::size_t i = 0;
    for (const auto& [key, terms] : groups) {
      acc += g[i++] * std::exp(cplx(0.0, -(key.first * p.gamma + key.second * p.alpha)));
    }
    return acc;
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, noise_std / std::sqrt(2.0));
  auto draw_noise = [&]() {
    return noise_std > 0.0 ? cplx(gauss(rng), gauss(rng)) : cplx(0.0);
  };

  MeasurementSet ms;
  ms.noise_std = noise_std;
  ms.eps = 3.0 * noise_std;
  ms.noise_model = noise_std > 0.0
                       ? (shared_noise ? "gaussian-shared" : "gaussian-independent")
                       : "none";
  ms.values.resize(sel.rows.size());
  if (shared_noise) {
    // one reading per physical class, drawn in class-id order
    std::map<std::int32_t, cplx> class_value;
    for (std::int64_t r : sel.rows) class_value.try_emplace(pmap.class_of(r), cplx(0.0));
    for (auto& [c, v] : class_value) v = field_at_row(pmap.representative(c)) + draw_noise();
    for (std::int64_t i = 0; i < ms.values.size(); ++i)
      ms.values(i) = class_value.at(pmap.class_of(sel.rows[i]));
  } else {
    for (std::int64_t i = 0; i < ms.values.size(); ++i)
      ms.values(i) = field_at_row(pmap.representative(pmap.class_of(sel.rows[i]))) + draw_noise();
  }
  return ms;
}

}  // namespace sphcs
