#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <functional>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sphcs/recovery.hpp"
#include "sphcs/synthesis.hpp"

namespace sphcs {

inline constexpr const char* kLibraryVersion = "sphcs 1.0.0";

/// Nyquist measurement count quoted by the classical reference method for
/// n_max = 15 on the sphere.
inline constexpr int kClassicalNyquistMinimum = 496;

/// Radius scaling applied to r = sqrt(M) eps in the noise studies. eps = 3
/// sigma bounds single samples; the l2 noise norm concentrates at
/// sigma sqrt(M), so 0.35 keeps the true signal feasible without inflating
/// the ball (and the reconstruction error) threefold.
inline constexpr double kNoiseRadiusScale = 0.35;

struct ExperimentSpec {
  std::string id;  // sparsity | compressibility | recover | sweep-measurements |
                   // baseline-wignerD | noise-density
  std::string preset = "C1a";
  int n_max = 15;
  int oversample = 1;
  int trials = 25;
  std::uint64_t seed = 1;
  double noise_db = -40.0;  // noise variance in dB relative to peak^2
  std::int64_t rows = 400;
  double density = 1.0 / 3.0;
  double decay_rate = kDefaultDecayRate;

  void validate() const {
    static const char* known[] = {"sparsity",           "compressibility",  "recover",
                                  "sweep-measurements", "baseline-wignerD", "noise-density"};
    bool ok = false;
    for (const char* k : known) ok = ok || id == k;
    if (!ok) throw std::invalid_argument("ExperimentSpec: unknown experiment id " + id);
    if (trials < 1) throw std::invalid_argument("ExperimentSpec: trials must be >= 1");
    if (n_max < 0) throw std::invalid_argument("ExperimentSpec: n_max must be >= 0");
    if (oversample < 1) throw std::invalid_argument("ExperimentSpec: oversample must be >= 1");
    preset_by_name(preset);  // throws on unknown preset
  }
};

/// Result table: `#`-prefixed provenance metadata plus named numeric columns.
struct Table {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_meta(const std::string& key, const std::string& value) {
    meta.emplace_back(key, value);
  }

  void write_csv(std::ostream& out) const {
    out << std::setprecision(17);
    for (const auto& [k, v] : meta) out << "# " << k << "=" << v << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
    for (const auto& row : rows)
      for (std::size_t c = 0; c < row.size(); ++c)
        out << row[c] << (c + 1 < row.size() ? "," : "\n");
  }

  void write_json(std::ostream& out) const {
    out << std::setprecision(17);
    out << "{\n  \"meta\": {";
    for (std::size_t i = 0; i < meta.size(); ++i)
      out << (i ? ", " : "") << "\"" << meta[i].first << "\": \"" << meta[i].second << "\"";
    out << "},\n  \"columns\": [";
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << (c ? ", " : "") << "\"" << columns[c] << "\"";
    out << "],\n  \"rows\": [\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out << "    [";
      for (std::size_t c = 0; c < rows[r].size(); ++c) {
        out << (c ? ", " : "");
        if (std::isfinite(rows[r][c]))
          out << rows[r][c];
        else
          out << "\"" << rows[r][c] << "\"";  // inf / nan are not valid JSON numbers
      }
      out << "]" << (r + 1 < rows.size() ? "," : "") << "\n";
    }
    out << "  ]\n}\n";
  }

  std::string csv_string() const {
    std::ostringstream os;
    write_csv(os);
    return os.str();
  }

  /// FNV-1a over the formatted CSV; equal hashes mean bit-identical output.
  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (char ch : csv_string()) {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ull;
    }
    return h;
  }
};

namespace detail {

inline void stamp(Table& t, const ExperimentSpec& spec) {
  t.add_meta("experiment", spec.id);
  t.add_meta("library", kLibraryVersion);
  t.add_meta("preset", spec.preset);
  t.add_meta("n_max", std::to_string(spec.n_max));
  t.add_meta("oversample", std::to_string(spec.oversample));
  t.add_meta("trials", std::to_string(spec.trials));
  t.add_meta("seed", std::to_string(spec.seed));
  t.add_meta("noise_db", std::to_string(spec.noise_db));
  t.add_meta("decay_rate", std::to_string(spec.decay_rate));
}

/// Independent trials with per-trial RNG streams; results land in trial
/// order, so aggregation does not depend on completion order.
template <typename R>
std::vector<R> map_trials(int trials, const std::function<R(int)>& body) {
  std::vector<std::future<R>> futures;
  futures.reserve(trials);
  for (int t = 0; t < trials; ++t)
    futures.push_back(std::async(std::launch::async | std::launch::deferred, body, t));
  std::vector<R> out;
  out.reserve(trials);
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

inline double snr_from_error(double normalized_error) {
  return normalized_error == 0.0 ? std::numeric_limits<double>::infinity()
                                 : -10.0 * std::log10(normalized_error);
}

inline double peak_field_magnitude(const WignerCoefficients& a, const SampleGrid& grid,
                                   const PhysicalMap& pmap) {
  const MeasurementSet clean = simulate(a, grid, pmap, full_selection(grid, pmap), 0.0, 0);
  double p = 0.0;
  for (Eigen::Index i = 0; i < clean.values.size(); ++i)
    p = std::max(p, std::abs(clean.values(i)));
  return p;
}

inline double noise_std_from_db(double noise_db, double peak) {
  // noise variance = 10^(noise_db / 10) * peak^2
  return std::sqrt(std::pow(10.0, noise_db / 10.0)) * peak;
}

inline SolverConfig study_solver_config() {
  SolverConfig cfg;
  cfg.max_iters = 20000;
  cfg.tol_primal = 1e-7;
  cfg.tol_dual = 1e-7;
  return cfg;
}

}  // namespace detail

/// Average Fourier sparsity s_F produced by uniformly random s_D-sparse
/// SH coefficient draws (mu = 0, 2D).
inline Table run_sparsity_study(const ExperimentSpec& spec) {
  spec.validate();
  const BandLimit bl(spec.n_max);
  const std::int64_t max_sd = static_cast<std::int64_t>(spec.n_max + 1) * (spec.n_max + 1);

  Table t;
  detail::stamp(t, spec);
  t.add_meta("max_s_F", std::to_string(bl.fourier_count_2d()));
  t.columns = {"s_D", "mean_s_F", "min_s_F", "max_s_F"};

  std::vector<std::int64_t> sweep;
  for (std::int64_t s = 1; s < max_sd; s *= 2) sweep.push_back(s);
  sweep.push_back(max_sd);

  for (std::int64_t s_d : sweep) {
    const std::vector<std::int64_t> sf = detail::map_trials<std::int64_t>(
        spec.trials, [&](int trial) -> std::int64_t {
          const WignerCoefficients a = random_sparse_coefficients(
              bl, s_d, spec.seed + 1000 * trial + static_cast<std::uint64_t>(s_d), true);
          const FourierCoefficients b = a_to_b(a, 2);
          return detail::count_above(b, 1e-12);
        });
    double mean = 0.0;
    std::int64_t lo = sf[0], hi = sf[0];
    for (std::int64_t v : sf) {
      mean += static_cast<double>(v);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    t.rows.push_back({static_cast<double>(s_d), mean / spec.trials, static_cast<double>(lo),
                      static_cast<double>(hi)});
  }
  return t;
}

/// Sorted-coefficient magnitudes and best-n_c truncation error curves in the
/// Wigner basis, the Fourier basis, and Fourier-truncated-then-back-
/// transformed. Errors are in dB; exact truncations report -inf.
inline Table run_compressibility_study(const ExperimentSpec& spec) {
  spec.validate();
  const BandLimit bl(spec.n_max);
  const WignerCoefficients a = preset_coefficients(spec.preset, bl, spec.seed, spec.decay_rate);
  const int dims = a.mu_zero_only() ? 2 : 3;
  const FourierCoefficients b = a_to_b(a, dims);

  std::vector<double> wmag;
  for (const auto& [idx, v] : a.entries) wmag.push_back(std::abs(v));
  std::sort(wmag.rbegin(), wmag.rend());
  std::vector<double> fmag;
  for (const cplx& v : b.values) fmag.push_back(std::abs(v));
  std::sort(fmag.rbegin(), fmag.rend());

  const double a2 = a.squared_norm();
  const double b2 = b.squared_norm();

  // cumulative tail energies of the sorted sequences
  auto tail_energy = [](const std::vector<double>& mags) {
    std::vector<double> tail(mags.size() + 1, 0.0);
    for (std::size_t i = mags.size(); i > 0; --i)
      tail[i - 1] = tail[i] + mags[i - 1] * mags[i - 1];
    return tail;
  };
  const std::vector<double> wtail = tail_energy(wmag);
  const std::vector<double> ftail = tail_energy(fmag);

  // best-n_c Fourier truncation, back-transformed and compared in the
  // Wigner basis
  std::vector<std::size_t> order(b.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return std::abs(b.values[i]) > std::abs(b.values[j]); });

  const std::size_t n_rows = std::min<std::size_t>(b.values.size(), 1024);
  const std::size_t stride = (b.values.size() + n_rows - 1) / n_rows;

  Table t;
  detail::stamp(t, spec);
  t.add_meta("dims", std::to_string(dims));
  t.columns = {"n_c",           "wigner_mag_db", "fourier_mag_db",
               "err_wigner_db", "err_fourier_db", "err_back_db"};

  FourierCoefficients bt(bl, dims);
  std::size_t filled = 0;
  auto db = [](double ratio) {
    return ratio <= 0.0 ? -std::numeric_limits<double>::infinity() : 10.0 * std::log10(ratio);
  };
  for (std::size_t n_c = stride; n_c <= b.values.size(); n_c += stride) {
    while (filled < n_c) {
      bt.values[order[filled]] = b.values[order[filled]];
      ++filled;
    }
    const BtoAReport back = b_to_a(bt);
    const Metrics m = coefficient_metrics(a, back.a);
    const double wmag_db =
        n_c <= wmag.size() ? db(wmag[n_c - 1] * wmag[n_c - 1] / (wmag[0] * wmag[0])) / 2.0
                           : -std::numeric_limits<double>::infinity();
    t.rows.push_back({static_cast<double>(n_c), wmag_db,
                      db(fmag[n_c - 1] * fmag[n_c - 1] / (fmag[0] * fmag[0])) / 2.0,
                      n_c <= wmag.size() ? db(wtail[n_c] / a2)
                                         : -std::numeric_limits<double>::infinity(),
                      db(ftail[n_c] / b2), db(m.normalized_error)});
  }
  return t;
}

/// Single noiseless recovery demo plus the classical full-grid reference.
inline Table run_recovery(const ExperimentSpec& spec) {
  spec.validate();
  const BandLimit bl(spec.n_max);
  const SampleGrid grid(bl, spec.oversample, 2);
  const PhysicalMap pmap(grid);
  const WignerCoefficients a = preset_coefficients(spec.preset, bl, spec.seed, spec.decay_rate);

  const SampleSelection sel = select_rows(grid, pmap, spec.rows, spec.seed + 7);
  const MeasurementSet ms = simulate(a, grid, pmap, sel, 0.0, 0);
  const RecoveryReport cs = recover_field(ms, grid, sel, detail::study_solver_config(), &a);

  const MeasurementSet msf = simulate(a, grid, pmap, full_selection(grid, pmap), 0.0, 0);
  const RecoveryReport classical = classical_full_grid(msf, grid, &a);

  Table t;
  detail::stamp(t, spec);
  t.add_meta("classical_nyquist_minimum", std::to_string(kClassicalNyquistMinimum));
  t.columns = {"method", "m_rows", "m_phys", "normalized_error", "snr_db", "s_d", "s_f"};
  // method: 0 = compressive, 1 = classical full grid
  t.rows.push_back({0.0, static_cast<double>(cs.m_rows), static_cast<double>(cs.m_phys),
                    cs.normalized_error, cs.snr_db, static_cast<double>(cs.s_d),
                    static_cast<double>(cs.s_f)});
  t.rows.push_back({1.0, static_cast<double>(classical.m_rows),
                    static_cast<double>(classical.m_phys), classical.normalized_error,
                    classical.snr_db, static_cast<double>(classical.s_d),
                    static_cast<double>(classical.s_f)});
  return t;
}

/// Mean recovery error versus measurement count, noiseless basis pursuit.
inline Table run_measurement_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const BandLimit bl(spec.n_max);
  const SampleGrid grid(bl, spec.oversample, 2);
  const PhysicalMap pmap(grid);
  const WignerCoefficients a = preset_coefficients(spec.preset, bl, spec.seed, spec.decay_rate);

  Table t;
  detail::stamp(t, spec);
  t.columns = {"m_rows", "mean_m_phys", "mean_normalized_error", "snr_of_mean_db",
               "mean_snr_db"};

  std::vector<std::int64_t> sweep;
  for (std::int64_t m = 100; m < grid.total_rows(); m += 100) sweep.push_back(m);
  sweep.push_back(grid.total_rows());

  for (std::int64_t m_rows : sweep) {
    struct TrialOut {
      double phys, err, snr;
    };
    const std::vector<TrialOut> outs = detail::map_trials<TrialOut>(spec.trials, [&](int trial) {
      const SampleSelection sel =
          select_rows(grid, pmap, m_rows, spec.seed + 31 * trial + m_rows);
      const MeasurementSet ms = simulate(a, grid, pmap, sel, 0.0, 0);
      const RecoveryReport rep = recover_field(ms, grid, sel, detail::study_solver_config(), &a);
      // cap the exact-recovery sentinel so per-trial means stay finite
      return TrialOut{static_cast<double>(rep.m_phys), rep.normalized_error,
                      std::min(rep.snr_db, 300.0)};
    });
    double phys = 0.0, err = 0.0, snr = 0.0;
    for (const TrialOut& o : outs) {
      phys += o.phys;
      err += o.err;
      snr += o.snr;
    }
    phys /= spec.trials;
    err /= spec.trials;
    snr /= spec.trials;
    t.rows.push_back({static_cast<double>(m_rows), phys, err, detail::snr_from_error(err), snr});
  }
  return t;
}

/// Paired comparison on identical physical samples: sub-sampled DFT recovery
/// versus the on-grid Wigner-D matrix with sqrt(sin beta) preconditioning.
inline Table run_baseline_wignerD(const ExperimentSpec& spec) {
  spec.validate();
  const BandLimit bl(spec.n_max);
  const SampleGrid grid(bl, spec.oversample, 2);
  const PhysicalMap pmap(grid);
  const WignerCoefficients a = preset_coefficients(spec.preset, bl, spec.seed, spec.decay_rate);
  const double peak = detail::peak_field_magnitude(a, grid, pmap);
  const double noise_std = detail::noise_std_from_db(spec.noise_db, peak);

  Table t;
  detail::stamp(t, spec);
  t.add_meta("noise_std", std::to_string(noise_std));
  t.columns = {"m_rows", "mean_m_phys", "mean_snr_fourier_db", "mean_snr_wignerD_db",
               "fourier_win_rate"};

  const std::int64_t n2 = grid.total_rows();
  std::vector<std::int64_t> sweep;
  for (double f : {0.2, 0.3, 0.4, 0.5, 0.6})
    sweep.push_back(std::max<std::int64_t>(1, static_cast<std::int64_t>(f * n2)));

  for (std::int64_t m_rows : sweep) {
    struct TrialOut {
      double phys, snr_f, snr_w;
    };
    const std::vector<TrialOut> outs = detail::map_trials<TrialOut>(spec.trials, [&](int trial) {
      // identical selection seed feeds both arms
      const SampleSelection sel =
          select_rows(grid, pmap, m_rows, spec.seed + 97 * trial + m_rows);
      const MeasurementSet ms = simulate(a, grid, pmap, sel, noise_std, spec.seed + 500 + trial);
      const SolverConfig cfg = detail::study_solver_config();
      const RecoveryReport f = recover_field(ms, grid, sel, cfg, &a, kNoiseRadiusScale);
      const RecoveryReport w =
          wigner_baseline_recover(ms, grid, pmap, sel, cfg, &a, kNoiseRadiusScale);
      return TrialOut{static_cast<double>(f.m_phys), std::min(f.snr_db, 300.0),
                      std::min(w.snr_db, 300.0)};
    });
    double phys = 0.0, sf = 0.0, sw = 0.0, wins = 0.0;
    for (const TrialOut& o : outs) {
      phys += o.phys;
      sf += o.snr_f;
      sw += o.snr_w;
      wins += o.snr_f >= o.snr_w ? 1.0 : 0.0;
    }
    t.rows.push_back({static_cast<double>(m_rows), phys / spec.trials, sf / spec.trials,
                      sw / spec.trials, wins / spec.trials});
  }
  return t;
}

/// Noise study across grid densities q:
///   arm 1: classical full-grid inversion on the q-times Nyquist grid;
///   arm 2: compressive recovery at a fixed row count;
///   arm 3: compressive recovery at a fixed sample density, paired with the
///          classical full grid at the same q.
inline Table run_noise_density_study(const ExperimentSpec& spec) {
  spec.validate();
  const BandLimit bl(spec.n_max);
  const WignerCoefficients a = preset_coefficients(spec.preset, bl, spec.seed, spec.decay_rate);

  // peak field magnitude is a property of the field; measure it once on the
  // Nyquist grid
  const SampleGrid g1(bl, 1, 2);
  const PhysicalMap pm1(g1);
  const double peak = detail::peak_field_magnitude(a, g1, pm1);
  const double noise_std = detail::noise_std_from_db(spec.noise_db, peak);

  Table t;
  detail::stamp(t, spec);
  t.add_meta("noise_std", std::to_string(noise_std));
  t.add_meta("fixed_rows", std::to_string(spec.rows));
  t.add_meta("density", std::to_string(spec.density));
  t.columns = {"q", "arm1_classical_snr_db", "arm2_cs_fixed_rows_snr_db",
               "arm3_cs_density_snr_db", "arm3_classical_snr_db"};

  const int max_q = 5;
  const int max_q_cs = 3;  // CS arms stop once grids get large
  for (int q = 1; q <= max_q; ++q) {
    const SampleGrid grid(bl, q, 2);
    const PhysicalMap pmap(grid);

    struct TrialOut {
      double arm1, arm2, arm3_cs, arm3_cl;
    };
    const std::vector<TrialOut> outs = detail::map_trials<TrialOut>(spec.trials, [&](int trial) {
      TrialOut o{};
      const std::uint64_t s = spec.seed + 1000 * trial + q;
      const MeasurementSet msf =
          simulate(a, grid, pmap, full_selection(grid, pmap), noise_std, s);
      o.arm1 = std::min(classical_full_grid(msf, grid, &a).snr_db, 300.0);
      o.arm3_cl = o.arm1;
      if (q <= max_q_cs) {
        const SolverConfig cfg = detail::study_solver_config();
        {
          const SampleSelection sel = select_rows(grid, pmap, spec.rows, s + 11);
          const MeasurementSet ms = simulate(a, grid, pmap, sel, noise_std, s + 13);
          o.arm2 = std::min(
              recover_field(ms, grid, sel, cfg, &a, kNoiseRadiusScale).snr_db, 300.0);
        }
        {
          const std::int64_t m =
              std::max<std::int64_t>(1, static_cast<std::int64_t>(spec.density * grid.total_rows()));
          const SampleSelection sel = select_rows(grid, pmap, m, s + 17);
          const MeasurementSet ms = simulate(a, grid, pmap, sel, noise_std, s + 19);
          o.arm3_cs = std::min(
              recover_field(ms, grid, sel, cfg, &a, kNoiseRadiusScale).snr_db, 300.0);
        }
      } else {
        o.arm2 = std::numeric_limits<double>::quiet_NaN();
        o.arm3_cs = std::numeric_limits<double>::quiet_NaN();
      }
      return o;
    });
    double a1 = 0.0, a2 = 0.0, a3 = 0.0, a3c = 0.0;
    for (const TrialOut& o : outs) {
      a1 += o.arm1;
      a2 += o.arm2;
      a3 += o.arm3_cs;
      a3c += o.arm3_cl;
    }
    t.rows.push_back({static_cast<double>(q), a1 / spec.trials, a2 / spec.trials,
                      a3 / spec.trials, a3c / spec.trials});
  }
  return t;
}

/// Dispatch by experiment id.
inline Table run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.id == "sparsity") return run_sparsity_study(spec);
  if (spec.id == "compressibility") return run_compressibility_study(spec);
  if (spec.id == "recover") return run_recovery(spec);
  if (spec.id == "sweep-measurements") return run_measurement_sweep(spec);
  if (spec.id == "baseline-wignerD") return run_baseline_wignerD(spec);
  return run_noise_density_study(spec);
}

}  // namespace sphcs
