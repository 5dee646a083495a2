#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "sphcs/experiments.hpp"
#include "sphcs/io.hpp"
#include "sphcs/recovery.hpp"
#include "sphcs/synthesis.hpp"
#include "sphcs/wigner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitArgs = 1;
constexpr int kExitSolver = 2;

struct Options {
  int n_max = 15;
  int oversample = 1;
  std::int64_t rows = 400;
  double density = 1.0 / 3.0;
  int trials = 25;
  std::uint64_t seed = 1;
  double noise_db = -40.0;
  std::string preset = "C1a";
  std::string out;
  std::string format = "csv";
};

void add_common_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--nmax", opt.n_max, "Band limit n_max");
  cmd->add_option("--oversample", opt.oversample, "Grid oversampling factor q");
  cmd->add_option("--rows", opt.rows, "Number of selected measurement rows");
  cmd->add_option("--density", opt.density, "Selected fraction of the full grid");
  cmd->add_option("--trials", opt.trials, "Number of Monte Carlo trials");
  cmd->add_option("--seed", opt.seed, "Base RNG seed");
  cmd->add_option("--noise-db", opt.noise_db,
                  "Noise variance in dB relative to peak^2 (<= -300 means noiseless)");
  cmd->add_option("--preset", opt.preset, "Field preset, C{1,2,3}{a,b,c}");
  cmd->add_option("--out", opt.out, "Output file (stdout when omitted)");
  cmd->add_option("--format", opt.format, "Table format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

/// Stream to --out or stdout.
int with_output(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(std::cout);
    return kExitOk;
  }
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot open " << path << " for writing\n";
    return kExitArgs;
  }
  body(out);
  return kExitOk;
}

int cmd_tables(const Options& opt) {
  // cached recursion tables Delta_n = d_n(pi/2), the backbone of the
  // Fourier-domain Wigner evaluation
  return with_output(opt.out, [&](std::ostream& out) {
    out << std::setprecision(17);
    out << "# table=wigner_delta\n# n_max=" << opt.n_max << "\n";
    out << "n,mp,m,delta\n";
    for (int n = 0; n <= opt.n_max; ++n) {
      const sphcs::DeltaMatrix& d = sphcs::delta_matrix(n);
      for (int mp = -n; mp <= n; ++mp)
        for (int m = -n; m <= n; ++m)
          out << n << "," << mp << "," << m << "," << d(mp, m) << "\n";
    }
  });
}

int cmd_synth(const Options& opt) {
  const sphcs::BandLimit bl(opt.n_max);
  const sphcs::WignerCoefficients a =
      sphcs::preset_coefficients(opt.preset, bl, opt.seed);
  if (opt.out.empty()) {
    std::cout << std::setprecision(17);
    std::cout << "n_max=" << bl.n_max << "\n";
    for (const auto& [idx, v] : a.entries)
      std::cout << idx.n << " " << idx.m << " " << idx.mu << " " << v.real() << " "
                << v.imag() << "\n";
    return kExitOk;
  }
  sphcs::save_wigner(opt.out, a);
  return kExitOk;
}

int cmd_measure(const Options& opt) {
  const sphcs::BandLimit bl(opt.n_max);
  const sphcs::WignerCoefficients a =
      sphcs::preset_coefficients(opt.preset, bl, opt.seed);
  const int dims = a.mu_zero_only() ? 2 : 3;
  const sphcs::SampleGrid grid(bl, opt.oversample, dims);
  const sphcs::PhysicalMap pmap(grid);

  double noise_std = 0.0;
  if (opt.noise_db > -300.0) {
    const double peak = sphcs::detail::peak_field_magnitude(a, grid, pmap);
    noise_std = sphcs::detail::noise_std_from_db(opt.noise_db, peak);
  }
  const sphcs::SampleSelection sel =
      sphcs::select_rows(grid, pmap, opt.rows, opt.seed + 7);
  const sphcs::MeasurementSet ms =
      sphcs::simulate(a, grid, pmap, sel, noise_std, opt.seed + 13);
  if (opt.out.empty()) {
    std::cerr << "error: measure requires --out\n";
    return kExitArgs;
  }
  sphcs::save_measurements(opt.out, grid, sel, ms);
  std::cerr << "wrote " << sel.rows.size() << " rows (" << sel.physical_count
            << " physical) to " << opt.out << "\n";
  return kExitOk;
}

int cmd_recover(const Options& opt, const std::string& input) {
  const sphcs::MeasurementFile f = sphcs::load_measurements(input);
  sphcs::SolverConfig cfg = sphcs::detail::study_solver_config();
  const double radius_scale =
      f.measurements.noise_std > 0.0 ? sphcs::kNoiseRadiusScale : 1.0;
  const sphcs::RecoveryReport rep =
      sphcs::recover_field(f.measurements, f.grid, f.selection, cfg, nullptr, radius_scale);

  std::cerr << "status=" << sphcs::to_string(rep.status) << " m_rows=" << rep.m_rows
            << " m_phys=" << rep.m_phys << " s_d=" << rep.s_d << " s_f=" << rep.s_f
            << " runtime_s=" << rep.runtime_seconds << "\n";
  if (!opt.out.empty()) sphcs::save_wigner(opt.out, rep.coefficients);
  return rep.status == sphcs::SolverStatus::kInfeasibleRadius ? kExitSolver : kExitOk;
}

int cmd_experiment(const Options& opt, const std::string& id) {
  sphcs::ExperimentSpec spec;
  spec.id = id;
  spec.preset = opt.preset;
  spec.n_max = opt.n_max;
  spec.oversample = opt.oversample;
  spec.trials = opt.trials;
  spec.seed = opt.seed;
  spec.noise_db = opt.noise_db;
  spec.rows = opt.rows;
  spec.density = opt.density;
  const sphcs::Table table = sphcs::run_experiment(spec);
  return with_output(opt.out, [&](std::ostream& out) {
    if (opt.format == "json")
      table.write_json(out);
    else
      table.write_csv(out);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressive spherical near-field coefficient recovery"};
  app.require_subcommand(1);
  Options opt;

  CLI::App* tables = app.add_subcommand("tables", "Dump the cached Wigner Delta tables");
  CLI::App* synth = app.add_subcommand("synth", "Synthesize preset SH coefficients");
  CLI::App* measure = app.add_subcommand("measure", "Sample a preset field on the torus grid");
  CLI::App* recover = app.add_subcommand("recover", "Recover coefficients from measurements");
  CLI::App* experiment = app.add_subcommand("experiment", "Run a numbered study");
  std::string recover_in, experiment_id;
  recover->add_option("input", recover_in, "Measurement file")->required();
  experiment->add_option("id", experiment_id,
                         "sparsity | compressibility | recover | sweep-measurements | "
                         "baseline-wignerD | noise-density")
      ->required();
  for (CLI::App* cmd : {tables, synth, measure, recover, experiment})
    add_common_flags(cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitArgs;
  }

  try {
    if (tables->parsed()) return cmd_tables(opt);
    if (synth->parsed()) return cmd_synth(opt);
    if (measure->parsed()) return cmd_measure(opt);
    if (recover->parsed()) return cmd_recover(opt, recover_in);
    return cmd_experiment(opt, experiment_id);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgs;
  }
}
