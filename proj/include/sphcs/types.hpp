#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace sphcs {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Series truncation order N. All derived basis sizes hang off this.
struct BandLimit {
  int n_max = 0;

  BandLimit() = default;
  explicit BandLimit(int n) : n_max(n) {
    if (n < 0) throw std::invalid_argument("BandLimit: n_max must be >= 0");
  }

  /// Points per torus axis at the critical (Nyquist) rate.
  int side() const { return 2 * n_max + 2; }

  /// Number of Wigner basis functions: (n_max+1)(2n_max+1)(2n_max+3)/3.
  std::int64_t wigner_count() const {
    const std::int64_t n = n_max;
    return (n + 1) * (2 * n + 1) * (2 * n + 3) / 3;
  }

  /// Fourier cube size (2n_max+2)^3.
  std::int64_t fourier_count() const {
    const std::int64_t s = side();
    return s * s * s;
  }

  /// 2D (sphere) Fourier square size (2n_max+2)^2.
  std::int64_t fourier_count_2d() const {
    const std::int64_t s = side();
    return s * s;
  }
};

/// Index triple (n, m, mu) of a Wigner basis function.
struct WignerIndex {
  int n = 0;
  int m = 0;
  int mu = 0;

  bool valid(const BandLimit& bl) const {
    return n >= 0 && n <= bl.n_max && std::abs(m) <= n && std::abs(mu) <= n;
  }

  // Canonical ordering: (m, mu) lexicographic, then n ascending.
  friend bool operator<(const WignerIndex& a, const WignerIndex& b) {
    if (a.m != b.m) return a.m < b.m;
    if (a.mu != b.mu) return a.mu < b.mu;
    return a.n < b.n;
  }
  friend bool operator==(const WignerIndex& a, const WignerIndex& b) {
    return a.n == b.n && a.m == b.m && a.mu == b.mu;
  }
};

/// Sparse coefficient set a_n^{m mu} over the band-limited Wigner basis.
struct WignerCoefficients {
  BandLimit band_limit;
  std::map<WignerIndex, cplx> entries;

  WignerCoefficients() = default;
  explicit WignerCoefficients(BandLimit bl) : band_limit(bl) {}

  void set(const WignerIndex& idx, cplx value) {
    if (!idx.valid(band_limit))
      throw std::invalid_argument("WignerCoefficients: index out of range");
    entries[idx] = value;
  }

  cplx get(const WignerIndex& idx) const {
    auto it = entries.find(idx);
    return it == entries.end() ? cplx(0.0) : it->second;
  }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& [k, v] : entries) s += std::norm(v);
    return s;
  }

  bool mu_zero_only() const {
    for (const auto& [k, v] : entries)
      if (k.mu != 0 && v != cplx(0.0)) return false;
    return true;
  }
};

/// Dense coefficients b_{m'}^{m mu} on the frequency cube. Indices m', m, mu
/// each run -n_max-1 ... n_max; the 2D specialization drops mu (mu == 0).
/// Flat layout is (m, mu, m') lexicographic (2D: (m, m')).
struct FourierCoefficients {
  BandLimit band_limit;
  int dims = 3;  // 3 for SO(3), 2 for the sphere special case
  std::vector<cplx> values;

  FourierCoefficients() = default;
  FourierCoefficients(BandLimit bl, int d) : band_limit(bl), dims(d) {
    if (d != 2 && d != 3) throw std::invalid_argument("FourierCoefficients: dims must be 2 or 3");
    values.assign(static_cast<std::size_t>(d == 3 ? bl.fourier_count() : bl.fourier_count_2d()),
                  cplx(0.0));
  }

  int side() const { return band_limit.side(); }

  bool index_ok(int f) const { return f >= -band_limit.n_max - 1 && f <= band_limit.n_max; }

  std::size_t flat(int mp, int m, int mu = 0) const {
    if (!index_ok(mp) || !index_ok(m) || !index_ok(mu))
      throw std::invalid_argument("FourierCoefficients: frequency out of range");
    const int s = side();
    const int off = band_limit.n_max + 1;
    if (dims == 2) {
      if (mu != 0) throw std::invalid_argument("FourierCoefficients: mu must be 0 in 2D");
      return static_cast<std::size_t>(m + off) * s + (mp + off);
    }
    return (static_cast<std::size_t>(m + off) * s + (mu + off)) * s + (mp + off);
  }

  cplx& at(int mp, int m, int mu = 0) { return values[flat(mp, m, mu)]; }
  const cplx& at(int mp, int m, int mu = 0) const { return values[flat(mp, m, mu)]; }

  double squared_norm() const {
    double s = 0.0;
    for (const cplx& v : values) s += std::norm(v);
    return s;
  }
};

/// i^k for integer k (possibly negative).
inline cplx ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

/// (-1)^k for integer k.
inline double parity(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

}  // namespace sphcs
