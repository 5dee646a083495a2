#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "sphcs/grid.hpp"
#include "sphcs/operators.hpp"
#include "sphcs/types.hpp"

namespace sphcs {

// 17 significant decimal digits round-trip an IEEE double bit-exactly.
inline constexpr int kIoPrecision = 17;

namespace detail {

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << std::setprecision(kIoPrecision);
  return out;
}

inline int parse_header_int(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(key + "=", 0) != 0)
    throw std::runtime_error("missing " + key + "= header");
  return std::stoi(line.substr(key.size() + 1));
}

}  // namespace detail

/// Wigner coefficient file: `n_max=<int>` header, rows `n m mu re im`.
inline void save_wigner(const std::string& path, const WignerCoefficients& a) {
  std::ofstream out = detail::open_output(path);
  out << "n_max=" << a.band_limit.n_max << "\n";
  for (const auto& [idx, v] : a.entries)
    out << idx.n << " " << idx.m << " " << idx.mu << " " << v.real() << " " << v.imag() << "\n";
}

inline WignerCoefficients load_wigner(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  WignerCoefficients a{BandLimit(detail::parse_header_int(in, "n_max"))};
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    WignerIndex idx;
    double re, im;
    if (!(row >> idx.n >> idx.m >> idx.mu >> re >> im))
      throw std::runtime_error(path + ": malformed line " + std::to_string(line_no));
    a.set(idx, cplx(re, im));
  }
  return a;
}

/// Fourier coefficient file: `n_max=`, `dims=` headers, rows `mp m mu re im`.
inline void save_fourier(const std::string& path, const FourierCoefficients& b) {
  std::ofstream out = detail::open_output(path);
  out << "n_max=" << b.band_limit.n_max << "\n";
  out << "dims=" << b.dims << "\n";
  const int n = b.band_limit.n_max;
  for (int m = -n - 1; m <= n; ++m)
    for (int mu = -n - 1; mu <= n; ++mu) {
      if (b.dims == 2 && mu != 0) continue;
      for (int mp = -n - 1; mp <= n; ++mp) {
        const cplx v = b.at(mp, m, mu);
        if (v == cplx(0.0)) continue;
        out << mp << " " << m << " " << mu << " " << v.real() << " " << v.imag() << "\n";
      }
    }
}

inline FourierCoefficients load_fourier(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  const int n_max = detail::parse_header_int(in, "n_max");
  const int dims = detail::parse_header_int(in, "dims");
  FourierCoefficients b(BandLimit(n_max), dims);
  std::string line;
  int line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    int mp, m, mu;
    double re, im;
    if (!(row >> mp >> m >> mu >> re >> im))
      throw std::runtime_error(path + ": malformed line " + std::to_string(line_no));
    b.at(mp, m, mu) = cplx(re, im);
  }
  return b;
}

/// Measurement file: grid/noise metadata headers, rows `row_index re im`.
inline void save_measurements(const std::string& path, const SampleGrid& grid,
                              const SampleSelection& sel, const MeasurementSet& ms) {
  if (ms.values.size() != static_cast<std::int64_t>(sel.rows.size()))
    throw std::invalid_argument("save_measurements: selection/measurement size mismatch");
  std::ofstream out = detail::open_output(path);
  out << "n_max=" << grid.band_limit.n_max << "\n";
  out << "oversample=" << grid.oversample << "\n";
  out << "dims=" << grid.dims << "\n";
  out << "seed=" << sel.seed << "\n";
  out << "noise_std=" << ms.noise_std << "\n";
  out << "eps=" << ms.eps << "\n";
  out << "noise_model=" << ms.noise_model << "\n";
  for (std::size_t i = 0; i < sel.rows.size(); ++i)
    out << sel.rows[i] << " " << ms.values(i).real() << " " << ms.values(i).imag() << "\n";
}

struct MeasurementFile {
  SampleGrid grid;
  SampleSelection selection;
  MeasurementSet measurements;
};

inline MeasurementFile load_measurements(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  const int n_max = detail::parse_header_int(in, "n_max");
  const int oversample = detail::parse_header_int(in, "oversample");
  const int dims = detail::parse_header_int(in, "dims");

  auto parse_string = [&](const std::string& key) {
    std::string line;
    if (!std::getline(in, line) || line.rfind(key + "=", 0) != 0)
      throw std::runtime_error("missing " + key + "= header");
    return line.substr(key.size() + 1);
  };
  MeasurementFile f;
  f.grid = SampleGrid(BandLimit(n_max), oversample, dims);
  f.selection.seed = std::stoull(parse_string("seed"));
  f.measurements.noise_std = std::stod(parse_string("noise_std"));
  f.measurements.eps = std::stod(parse_string("eps"));
  f.measurements.noise_model = parse_string("noise_model");

  std::vector<cplx> vals;
  std::string line;
  int line_no = 7;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::int64_t r;
    double re, im;
    if (!(row >> r >> re >> im))
      throw std::runtime_error(path + ": malformed line " + std::to_string(line_no));
    if (r < 0 || r >= f.grid.total_rows())
      throw std::runtime_error(path + ": row index out of range at line " +
                               std::to_string(line_no));
    f.selection.rows.push_back(r);
    vals.push_back(cplx(re, im));
  }
  f.measurements.values = Eigen::Map<const Eigen::VectorXcd>(vals.data(), vals.size());
  const PhysicalMap pmap(f.grid);
  std::vector<std::int32_t> classes;
  for (std::int64_t r : f.selection.rows) classes.push_back(pmap.class_of(r));
  std::sort(classes.begin(), classes.end());
  f.selection.physical_count =
      std::unique(classes.begin(), classes.end()) - classes.begin();
  return f;
}

/// Selection export: rows `j k l alpha beta gamma class_id` with (j, k, l)
/// the per-axis grid indices (j = 0 in 2D).
inline void save_selection(const std::string& path, const SampleGrid& grid,
                           const PhysicalMap& pmap, const SampleSelection& sel) {
  std::ofstream out = detail::open_output(path);
  out << "n_max=" << grid.band_limit.n_max << "\n";
  out << "oversample=" << grid.oversample << "\n";
  out << "dims=" << grid.dims << "\n";
  out << "seed=" << sel.seed << "\n";
  for (std::int64_t r : sel.rows) {
    const SampleGrid::Point p = grid.point(r);
    out << p.u_alpha << " " << p.u_beta << " " << p.u_gamma << " " << p.alpha << " " << p.beta
        << " " << p.gamma << " " << pmap.class_of(r) << "\n";
  }
}

}  // namespace sphcs
