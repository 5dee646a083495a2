#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <unordered_map>
#include <vector>

#include "sphcs/types.hpp"

namespace sphcs {

/// Equiangular grid on T^3 (or T^2), L = oversample * (2 n_max + 2) points per
/// axis with angles 2 pi u / L, u = 0 ... L-1. oversample = 1 is the Nyquist
/// grid; larger values keep the Nyquist grid as a sub-lattice and preserve the
/// pole/pairing structure (L stays even).
struct SampleGrid {
  BandLimit band_limit;
  int oversample = 1;
  int dims = 3;

  SampleGrid() = default;
  SampleGrid(BandLimit bl, int q, int d) : band_limit(bl), oversample(q), dims(d) {
    if (q < 1) throw std::invalid_argument("SampleGrid: oversample must be >= 1");
    if (d != 2 && d != 3) throw std::invalid_argument("SampleGrid: dims must be 2 or 3");
  }

  int side() const { return oversample * band_limit.side(); }

  std::int64_t total_rows() const {
    std::int64_t t = 1;
    for (int i = 0; i < dims; ++i) t *= side();
    return t;
  }

  double angle(int u) const { return 2.0 * kPi * u / side(); }

  /// Row index from per-axis indices in [0, L). 3D axes are (alpha, beta,
  /// gamma); 2D axes are (beta, gamma).
  std::int64_t row(int u_alpha, int u_beta, int u_gamma) const {
    const std::int64_t L = side();
    if (dims == 2) return static_cast<std::int64_t>(u_beta) * L + u_gamma;
    return (static_cast<std::int64_t>(u_alpha) * L + u_beta) * L + u_gamma;
  }

  struct Point {
    int u_alpha = 0, u_beta = 0, u_gamma = 0;
    double alpha = 0.0, beta = 0.0, gamma = 0.0;
  };

  Point point(std::int64_t r) const {
    const int L = side();
    Point p;
    p.u_gamma = static_cast<int>(r % L);
    r /= L;
    p.u_beta = static_cast<int>(r % L);
    r /= L;
    p.u_alpha = dims == 3 ? static_cast<int>(r) : 0;
    p.alpha = angle(p.u_alpha);
    p.beta = angle(p.u_beta);
    p.gamma = angle(p.u_gamma);
    return p;
  }
};

/// Equivalence classes of torus grid rows landing on the same physical
/// SO(3)/sphere position under the double cover. Non-polar classes pair
/// (alpha, beta, gamma) with (alpha+pi, -beta, gamma-pi); the polar rows
/// (beta = 0 and beta = pi) collapse by the degenerate angle combinations.
class PhysicalMap {
 public:
  explicit PhysicalMap(const SampleGrid& grid) : grid_(grid) {
    const int L = grid.side();
    const std::int64_t total = grid.total_rows();
    class_id_.assign(total, -1);
    std::unordered_map<std::int64_t, std::int32_t> key_to_class;
    representative_.clear();
    for (std::int64_t r = 0; r < total; ++r) {
      if (class_id_[r] >= 0) continue;
      const SampleGrid::Point p = grid.point(r);
      std::int64_t key;
      if (p.u_beta == 0) {
        // beta = 0: same physical point whenever alpha + gamma is fixed
        key = grid.dims == 3 ? (p.u_alpha + p.u_gamma) % L : -2;
        key = encode(0, key);
      } else if (p.u_beta == L / 2) {
        // beta = pi: alpha + pi - gamma fixed
        key = grid.dims == 3 ? ((p.u_alpha - p.u_gamma) % L + L) % L : -2;
        key = encode(1, key);
      } else {
        // canonical member of the two-element class
        const int ua2 = grid.dims == 3 ? (p.u_alpha + L / 2) % L : 0;
        const int ub2 = L - p.u_beta;
        const int ug2 = (p.u_gamma + L / 2) % L;
        const std::int64_t partner = grid.row(ua2, ub2, ug2);
        key = encode(2, std::min(r, partner));
      }
      auto [it, inserted] = key_to_class.try_emplace(
          key, static_cast<std::int32_t>(representative_.size()));
      if (inserted) representative_.push_back(r);
      class_id_[r] = it->second;
    }
    class_size_.assign(representative_.size(), 0);
    for (std::int64_t r = 0; r < total; ++r) ++class_size_[class_id_[r]];
  }

  std::int32_t class_of(std::int64_t r) const { return class_id_[r]; }
  std::int64_t representative(std::int32_t c) const { return representative_[c]; }
  int class_size(std::int32_t c) const { return class_size_[c]; }
  std::int64_t physical_count() const { return static_cast<std::int64_t>(representative_.size()); }
  const SampleGrid& grid() const { return grid_; }

 private:
  static std::int64_t encode(int tag, std::int64_t v) { return (v << 2) | tag; }

  SampleGrid grid_;
  std::vector<std::int32_t> class_id_;
  std::vector<std::int64_t> representative_;
  std::vector<int> class_size_;
};

/// Random measurement subset: torus rows drawn uniformly without replacement.
/// The probability space is row subsets; the physical count is derived.
struct SampleSelection {
  std::vector<std::int64_t> rows;  // sorted
  std::int64_t physical_count = 0;
  std::uint64_t seed = 0;
};

inline SampleSelection select_rows(const SampleGrid& grid, const PhysicalMap& pmap,
                                   std::int64_t m_rows, std::uint64_t seed) {
  const std::int64_t total = grid.total_rows();
  if (m_rows < 1 || m_rows > total)
    throw std::invalid_argument("select_rows: M_rows out of range");
  std::mt19937_64 rng(seed);
  // partial Fisher-Yates over an index array
  std::vector<std::int64_t> idx(total);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::int64_t i = 0; i < m_rows; ++i) {
    std::uniform_int_distribution<std::int64_t> u(i, total - 1);
    std::swap(idx[i], idx[u(rng)]);
  }
  SampleSelection sel;
  sel.seed = seed;
  sel.rows.assign(idx.begin(), idx.begin() + m_rows);
  std::sort(sel.rows.begin(), sel.rows.end());
  std::vector<std::int32_t> classes;
  classes.reserve(m_rows);
  for (std::int64_t r : sel.rows) classes.push_back(pmap.class_of(r));
  std::sort(classes.begin(), classes.end());
  sel.physical_count = std::unique(classes.begin(), classes.end()) - classes.begin();
  return sel;
}

}  // namespace sphcs
