#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sphcs/special.hpp"
#include "sphcs/types.hpp"
#include "sphcs/wigner.hpp"

namespace sphcs {

// acoustic defaults: 1098 Hz probe tone, c = 343 m/s, r_ab = 0.75 m
inline constexpr double kDefaultWavenumber = 2.0 * kPi * 1098.0 / 343.0;
inline constexpr double kDefaultProbeRadius = 0.75;

/// Uniformly random s_D-sparse coefficient draw. Values are 1 by default
/// (the reference protocol); `random_phase` switches to unit-modulus values
/// with uniform phase.
inline WignerCoefficients random_sparse_coefficients(const BandLimit& bl, std::int64_t s_d,
                                                     std::uint64_t seed,
                                                     bool mu_zero_only = false,
                                                     bool random_phase = false) {
  std::vector<WignerIndex> pool;
  for (int n = 0; n <= bl.n_max; ++n)
    for (int m = -n; m <= n; ++m) {
      if (mu_zero_only) {
        pool.push_back({n, m, 0});
      } else {
        for (int mu = -n; mu <= n; ++mu) pool.push_back({n, m, mu});
      }
    }
  if (s_d < 1 || s_d > static_cast<std::int64_t>(pool.size()))
    throw std::invalid_argument("random_sparse_coefficients: s_D out of range");

  std::mt19937_64 rng(seed);
  for (std::int64_t i = 0; i < s_d; ++i) {
    std::uniform_int_distribution<std::int64_t> u(i, static_cast<std::int64_t>(pool.size()) - 1);
    std::swap(pool[i], pool[u(rng)]);
  }
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  WignerCoefficients a(bl);
  for (std::int64_t i = 0; i < s_d; ++i) {
    const double p = random_phase ? phase(rng) : 0.0;
    a.entries[pool[i]] = cplx(std::cos(p), std::sin(p));
  }
  return a;
}

/// Probe sensitivity constants C_n^mu in the probe frame.
struct ProbeResponse {
  BandLimit band_limit;
  char probe_case = 'a';
  std::map<std::pair<int, int>, cplx> constants;  // (n, mu) -> C_n^mu

  cplx get(int n, int mu) const {
    auto it = constants.find({n, mu});
    return it == constants.end() ? cplx(0.0) : it->second;
  }

  std::size_t nonzero_count() const {
    std::size_t c = 0;
    for (const auto& [k, v] : constants)
      if (v != cplx(0.0)) ++c;
    return c;
  }
};

/// Spherical-wave coefficients A_n^m of the source, unit l2 norm.
struct SpeakerModel {
  BandLimit band_limit;
  std::string label;
  double asymmetry_fraction = 0.0;  // l2^2 share of the m != 0 modes
  std::map<std::pair<int, int>, cplx> coefficients;  // (n, m) -> A_n^m

  double squared_norm() const {
    double s = 0.0;
    for (const auto& [k, v] : coefficients) s += std::norm(v);
    return s;
  }

  double measured_asymmetry() const {
    double off = 0.0;
    for (const auto& [k, v] : coefficients)
      if (k.second != 0) off += std::norm(v);
    const double total = squared_norm();
    return total == 0.0 ? 0.0 : off / total;
  }
};

/// Parametric stand-in for a measured directive source: a geometrically
/// decaying axisymmetric core plus a small set of random off-axis (m != 0)
/// entries scaled so their l2^2 share hits `asymmetry_fraction` exactly.
/// Off-axis values follow the same per-order decay, keeping the model as
/// compressible as the measured sources it mimics.
inline SpeakerModel speaker_analog(const BandLimit& bl, double asymmetry_fraction,
                                   double decay_rate, std::uint64_t seed,
                                   int off_axis_count = 6) {
  if (asymmetry_fraction < 0.0 || asymmetry_fraction >= 1.0)
    throw std::invalid_argument("speaker_analog: asymmetry_fraction must be in [0, 1)");
  if (decay_rate <= 0.0 || decay_rate > 1.0)
    throw std::invalid_argument("speaker_analog: decay_rate must be in (0, 1]");
  if (off_axis_count < 1) throw std::invalid_argument("speaker_analog: off_axis_count < 1");

  SpeakerModel model;
  model.band_limit = bl;
  model.asymmetry_fraction = asymmetry_fraction;

  double core2 = 0.0;
  for (int n = 0; n <= bl.n_max; ++n) {
    const double v = std::pow(decay_rate, n);
    model.coefficients[{n, 0}] = cplx(v, 0.0);
    core2 += v * v;
  }

  if (asymmetry_fraction > 0.0 && bl.n_max >= 1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::pair<int, int>> slots;
    for (int n = 1; n <= bl.n_max; ++n)
      for (int m = -n; m <= n; ++m)
        if (m != 0) slots.emplace_back(n, m);
    const int count = std::min<int>(off_axis_count, static_cast<int>(slots.size()));
    for (int i = 0; i < count; ++i) {
      std::uniform_int_distribution<int> d(i, static_cast<int>(slots.size()) - 1);
      std::swap(slots[i], slots[d(rng)]);
    }
    double off2 = 0.0;
    for (int i = 0; i < count; ++i) {
      const auto [n, m] = slots[i];
      const cplx v = std::pow(decay_rate, n) * cplx(gauss(rng), gauss(rng));
      model.coefficients[{n, m}] = v;
      off2 += std::norm(v);
    }
    // rescale the off-axis block so off2 / (core2 + off2) == asymmetry exactly
    const double target = core2 * asymmetry_fraction / (1.0 - asymmetry_fraction);
    const double s = std::sqrt(target / off2);
    for (auto& [k, v] : model.coefficients)
      if (k.second != 0) v *= s;
  }

  const double norm = std::sqrt(model.squared_norm());
  for (auto& [k, v] : model.coefficients) v /= norm;
  return model;
}

/// Probe constants: case 'a' is the ideal axial probe
/// C_n^0 = sqrt(2n+1)/(4 pi) h_n^(1)(k r_ab); case 'b' adds Gaussian mu = +-1
/// constants at sigma = 0.01 max_n |C_n^0|; case 'c' additionally mu = +-2 at
/// sigma = 0.001 max_n |C_n^0|. One draw per (n, mu) real and imaginary part.
inline ProbeResponse probe_response(char probe_case, const BandLimit& bl,
                                    double k = kDefaultWavenumber,
                                    double r_ab = kDefaultProbeRadius,
                                    std::uint64_t seed = 0) {
  if (probe_case != 'a' && probe_case != 'b' && probe_case != 'c')
    throw std::invalid_argument("probe_response: case must be 'a', 'b' or 'c'");
  if (k <= 0.0 || r_ab <= 0.0)
    throw std::invalid_argument("probe_response: k and r_ab must be > 0");

  ProbeResponse probe;
  probe.band_limit = bl;
  probe.probe_case = probe_case;
  double peak = 0.0;
  for (int n = 0; n <= bl.n_max; ++n) {
    const cplx c = std::sqrt((2.0 * n + 1.0) / (4.0 * kPi)) * spherical_hankel1(n, k * r_ab);
    probe.constants[{n, 0}] = c;
    peak = std::max(peak, std::abs(c));
  }
  if (probe_case == 'a') return probe;

  std::mt19937_64 rng(seed);
  auto add_band = [&](int mu_abs, double sigma) {
    std::normal_distribution<double> gauss(0.0, sigma);
    for (int mu : {mu_abs, -mu_abs})
      for (int n = mu_abs; n <= bl.n_max; ++n)
        probe.constants[{n, mu}] = cplx(gauss(rng), gauss(rng));
  };
  add_band(1, 0.01 * peak);
  if (probe_case == 'c') add_band(2, 0.001 * peak);
  return probe;
}

/// a_n^{m mu} = A_n^m C_n^mu.
inline WignerCoefficients compose(const SpeakerModel& speaker, const ProbeResponse& probe) {
  if (speaker.band_limit.n_max != probe.band_limit.n_max)
    throw std::invalid_argument("compose: band-limit mismatch");
  WignerCoefficients a(speaker.band_limit);
  for (const auto& [sk, av] : speaker.coefficients) {
    if (av == cplx(0.0)) continue;
    const auto [n, m] = sk;
    for (const auto& [pk, cv] : probe.constants) {
      if (pk.first != n || cv == cplx(0.0)) continue;
      a.entries[{n, m, pk.second}] = av * cv;
    }
  }
  return a;
}

/// Rotate SW coefficients by zyz Euler angles: per-order block product
/// A'_n^m = sum_{m'} D_n^{m m'}(alpha, beta, gamma) A_n^{m'}. Each block is
/// unitary, so the l2 norm is preserved and rotations compose as the group.
inline SpeakerModel rotate_coefficients(const SpeakerModel& model, double alpha, double beta,
                                        double gamma) {
  SpeakerModel out = model;
  out.coefficients.clear();
  for (int n = 0; n <= model.band_limit.n_max; ++n) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * n + 1);
    bool any = false;
    for (int m = -n; m <= n; ++m) {
      auto it = model.coefficients.find({n, m});
      if (it != model.coefficients.end() && it->second != cplx(0.0)) {
        v(m + n) = it->second;
        any = true;
      }
    }
    if (!any) continue;
    for (int m = -n; m <= n; ++m) {
      cplx acc(0.0);
      for (int mp = -n; mp <= n; ++mp)
        acc += wigner_D(n, m, mp, alpha, beta, gamma) * v(mp + n);
      out.coefficients[{n, m}] = acc;
    }
  }
  out.asymmetry_fraction = out.measured_asymmetry();
  return out;
}

/// Load SH coefficients from a text file: header line `n_max=<int>`, then
/// rows `n m re im`. Orders above the requested band limit are dropped; the
/// probe's radial scaling h_n^(1)(k r_ab) is divided out and the result is
/// normalized to unit l2 norm.
inline SpeakerModel load_sh_coefficients(const std::string& path, const BandLimit& bl,
                                         double k = kDefaultWavenumber,
                                         double r_ab = kDefaultProbeRadius) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_sh_coefficients: cannot open " + path);
  std::string header;
  if (!std::getline(in, header) || header.rfind("n_max=", 0) != 0)
    throw std::runtime_error("load_sh_coefficients: missing n_max= header");
  const int file_n_max = std::stoi(header.substr(6));
  if (file_n_max < 0 || file_n_max > 64)
    throw std::runtime_error("load_sh_coefficients: unsupported n_max");

  SpeakerModel model;
  model.band_limit = bl;
  model.label = path;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    int n, m;
    double re, im;
    if (!(row >> n >> m >> re >> im))
      throw std::runtime_error("load_sh_coefficients: malformed line " + std::to_string(line_no));
    if (n < 0 || n > file_n_max || std::abs(m) > n)
      throw std::runtime_error("load_sh_coefficients: bad index at line " +
                               std::to_string(line_no));
    if (n > bl.n_max) continue;  // truncate to the working band limit
    model.coefficients[{n, m}] = cplx(re, im) / spherical_hankel1(n, k * r_ab);
  }
  const double norm = std::sqrt(model.squared_norm());
  if (norm == 0.0) throw std::runtime_error("load_sh_coefficients: no usable coefficients");
  for (auto& [key, v] : model.coefficients) v /= norm;
  model.asymmetry_fraction = model.measured_asymmetry();
  return model;
}

/// Named presets: speaker asymmetry C1/C2/C3 crossed with probe case a/b/c.
struct Preset {
  std::string name;
  double asymmetry = 0.0;
  char probe_case = 'a';
};

inline Preset preset_by_name(const std::string& name) {
  if (name.size() != 3 || name[0] != 'C') throw std::invalid_argument("unknown preset " + name);
  Preset p;
  p.name = name;
  switch (name[1]) {
    case '1': p.asymmetry = 0.0045; break;
    case '2': p.asymmetry = 0.0105; break;
    case '3': p.asymmetry = 0.0222; break;
    default: throw std::invalid_argument("unknown preset " + name);
  }
  p.probe_case = name[2];
  if (p.probe_case != 'a' && p.probe_case != 'b' && p.probe_case != 'c')
    throw std::invalid_argument("unknown preset " + name);
  return p;
}

inline constexpr double kDefaultDecayRate = 0.30;

/// Composed test coefficients for a named preset.
inline WignerCoefficients preset_coefficients(const std::string& name, const BandLimit& bl,
                                              std::uint64_t seed,
                                              double decay_rate = kDefaultDecayRate) {
  const Preset p = preset_by_name(name);
  SpeakerModel speaker = speaker_analog(bl, p.asymmetry, decay_rate, seed);
  speaker.label = p.name;
  const ProbeResponse probe =
      probe_response(p.probe_case, bl, kDefaultWavenumber, kDefaultProbeRadius, seed + 1);
  return compose(speaker, probe);
}

}  // namespace sphcs
