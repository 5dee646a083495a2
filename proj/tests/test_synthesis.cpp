#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Geometry>
#include <cstdio>
#include <fstream>

#include "sphcs/synthesis.hpp"

using namespace sphcs;

TEST_CASE("random sparse draw basics") {
  const BandLimit bl(15);

  const WignerCoefficients one = random_sparse_coefficients(bl, 1, 5);
  CHECK(one.entries.size() == 1);
  CHECK(one.entries.begin()->second == cplx(1.0));

  // mu = 0 admissible index count is (n_max + 1)^2 = 256
  CHECK_NOTHROW(random_sparse_coefficients(bl, 256, 0, true));
  CHECK_THROWS_AS(random_sparse_coefficients(bl, 257, 0, true), std::invalid_argument);
  CHECK_THROWS_AS(random_sparse_coefficients(bl, 0, 0), std::invalid_argument);

  const WignerCoefficients a = random_sparse_coefficients(bl, 40, 7, true);
  CHECK(a.entries.size() == 40);  // map keys are distinct by construction
  CHECK(a.mu_zero_only());
  for (const auto& [idx, v] : a.entries) {
    CHECK(idx.valid(bl));
    CHECK(v == cplx(1.0));
  }

  const WignerCoefficients b = random_sparse_coefficients(bl, 40, 7, true);
  CHECK(a.entries == b.entries);  // deterministic per seed

  const WignerCoefficients p = random_sparse_coefficients(bl, 40, 7, true, true);
  for (const auto& [idx, v] : p.entries) CHECK(std::abs(v) == Catch::Approx(1.0));
}

TEST_CASE("speaker analog asymmetry and norm") {
  const BandLimit bl(15);

  const SpeakerModel axial = speaker_analog(bl, 0.0, 0.55, 1);
  for (const auto& [k, v] : axial.coefficients) CHECK(k.second == 0);
  CHECK(axial.squared_norm() == Catch::Approx(1.0).margin(1e-12));

  for (double asym : {0.0045, 0.0105, 0.0222}) {
    const SpeakerModel m = speaker_analog(bl, asym, 0.55, 2);
    CHECK(std::abs(m.measured_asymmetry() - asym) <= 1e-12);
    CHECK(std::abs(m.squared_norm() - 1.0) <= 1e-12);
  }

  CHECK_THROWS_AS(speaker_analog(bl, 1.0, 0.55, 0), std::invalid_argument);
  CHECK_THROWS_AS(speaker_analog(bl, 0.1, 0.0, 0), std::invalid_argument);
}

TEST_CASE("speaker analog axial decay spans at least 60 dB") {
  const BandLimit bl(15);
  const SpeakerModel m = speaker_analog(bl, 0.0045, kDefaultDecayRate, 3);
  const double top = std::abs(m.coefficients.at({0, 0}));
  const double bottom = std::abs(m.coefficients.at({bl.n_max, 0}));
  CHECK(20.0 * std::log10(top / bottom) >= 60.0);
}

TEST_CASE("probe response cases and counts") {
  const BandLimit bl(15);
  const ProbeResponse pa = probe_response('a', bl);
  CHECK(pa.nonzero_count() == 16);  // n_max + 1 axial constants
  for (const auto& [k, v] : pa.constants) CHECK(k.second == 0);

  // closed-form check of the axial constant at n = 0
  const double x = kDefaultWavenumber * kDefaultProbeRadius;
  const cplx h0 = -cplx(0.0, 1.0) * std::exp(cplx(0.0, x)) / x;
  CHECK(std::abs(pa.get(0, 0) - std::sqrt(1.0 / (4.0 * kPi)) * h0) <= 1e-12);

  const ProbeResponse pb = probe_response('b', bl, kDefaultWavenumber, kDefaultProbeRadius, 4);
  CHECK(pb.nonzero_count() == 16 + 2 * 15);  // subspace count roughly triples
  const ProbeResponse pc = probe_response('c', bl, kDefaultWavenumber, kDefaultProbeRadius, 4);
  CHECK(pc.nonzero_count() == 16 + 2 * 15 + 2 * 14);  // roughly x5

  // perturbations sit 40 dB down from the axial peak
  double peak = 0.0;
  for (const auto& [k, v] : pa.constants) peak = std::max(peak, std::abs(v));
  for (const auto& [k, v] : pb.constants)
    if (k.second != 0) CHECK(std::abs(v) <= 0.1 * peak);

  CHECK_THROWS_AS(probe_response('d', bl), std::invalid_argument);
  CHECK_THROWS_AS(probe_response('a', bl, -1.0), std::invalid_argument);
}

TEST_CASE("compose follows the product support rule") {
  const BandLimit bl(7);
  const SpeakerModel speaker = speaker_analog(bl, 0.0105, 0.55, 8);
  const ProbeResponse pa = probe_response('a', bl);
  const ProbeResponse pb = probe_response('b', bl, kDefaultWavenumber, kDefaultProbeRadius, 9);

  const WignerCoefficients ca = compose(speaker, pa);
  CHECK(ca.mu_zero_only());
  for (const auto& [idx, v] : ca.entries) {
    CHECK(v == speaker.coefficients.at({idx.n, idx.m}) * pa.get(idx.n, 0));
    CHECK(v != cplx(0.0));
  }

  const WignerCoefficients cb = compose(speaker, pb);
  // swapping the probe case changes only the mu != 0 blocks
  for (const auto& [idx, v] : ca.entries) CHECK(cb.get(idx) == v);
  for (const auto& [idx, v] : cb.entries) {
    if (idx.mu == 0) CHECK(ca.get(idx) == v);
    // support never extends past the factors
    CHECK(speaker.coefficients.count({idx.n, idx.m}) == 1);
    CHECK(pb.get(idx.n, idx.mu) != cplx(0.0));
  }

  SpeakerModel other = speaker_analog(BandLimit(5), 0.0, 0.55, 1);
  CHECK_THROWS_AS(compose(other, pa), std::invalid_argument);
}

TEST_CASE("rotation preserves norm and composes as the group") {
  const BandLimit bl(3);
  SpeakerModel m;
  m.band_limit = bl;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n <= bl.n_max; ++n)
    for (int mm = -n; mm <= n; ++mm) m.coefficients[{n, mm}] = cplx(u(rng), u(rng));
  const double norm0 = std::sqrt(m.squared_norm());

  const SpeakerModel ident = rotate_coefficients(m, 0.0, 0.0, 0.0);
  for (const auto& [k, v] : m.coefficients)
    CHECK(std::abs(ident.coefficients.at(k) - v) <= 1e-12);

  const double a1 = 0.7, b1 = 1.9, g1 = -0.4;
  const double a2 = -2.1, b2 = 0.6, g2 = 2.8;
  const SpeakerModel r1 = rotate_coefficients(m, a1, b1, g1);
  CHECK(std::abs(std::sqrt(r1.squared_norm()) - norm0) <= 1e-12);
  const SpeakerModel r21 = rotate_coefficients(r1, a2, b2, g2);

  // composed zyz angles from the 3x3 rotation product
  using Eigen::AngleAxisd;
  using Eigen::Vector3d;
  const Eigen::Matrix3d rot1 = (AngleAxisd(a1, Vector3d::UnitZ()) *
                                AngleAxisd(b1, Vector3d::UnitY()) *
                                AngleAxisd(g1, Vector3d::UnitZ()))
                                   .toRotationMatrix();
  const Eigen::Matrix3d rot2 = (AngleAxisd(a2, Vector3d::UnitZ()) *
                                AngleAxisd(b2, Vector3d::UnitY()) *
                                AngleAxisd(g2, Vector3d::UnitZ()))
                                   .toRotationMatrix();
  const Vector3d euler = (rot2 * rot1).eulerAngles(2, 1, 2);
  const SpeakerModel rc = rotate_coefficients(m, euler(0), euler(1), euler(2));
  for (const auto& [k, v] : r21.coefficients)
    CHECK(std::abs(rc.coefficients.at(k) - v) <= 1e-10);
}

TEST_CASE("rotation blocks are unitary up to n = 8") {
  for (int n = 0; n <= 8; ++n) {
    const double alpha = 0.3 + 0.1 * n, beta = 1.1, gamma = -0.8;
    Eigen::MatrixXcd d(2 * n + 1, 2 * n + 1);
    for (int m = -n; m <= n; ++m)
      for (int mp = -n; mp <= n; ++mp)
        d(m + n, mp + n) = wigner_D(n, m, mp, alpha, beta, gamma);
    const Eigen::MatrixXcd g = d * d.adjoint() - Eigen::MatrixXcd::Identity(2 * n + 1, 2 * n + 1);
    CHECK(g.cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("SH coefficient file loading") {
  const BandLimit bl(3);
  const std::string path = "test_sh_coeffs.txt";
  {
    std::ofstream out(path);
    out << "n_max=5\n";
    out << "0 0 1.0 0.0\n";
    out << "# comment row\n";
    out << "2 -1 0.25 -0.5\n";
    out << "5 3 9.0 9.0\n";  // above the working band limit, dropped
  }

  const SpeakerModel m = load_sh_coefficients(path, bl);
  CHECK(m.coefficients.size() == 2);
  CHECK(std::abs(m.squared_norm() - 1.0) <= 1e-12);
  // the radial scaling is divided out before normalization
  const double x = kDefaultWavenumber * kDefaultProbeRadius;
  const cplx ratio = (m.coefficients.at({2, -1}) * spherical_hankel1(2, x)) /
                     (m.coefficients.at({0, 0}) * spherical_hankel1(0, x));
  CHECK(std::abs(ratio - cplx(0.25, -0.5)) <= 1e-12);

  {
    std::ofstream out(path);
    out << "0 0 1.0 0.0\n";  // missing header
  }
  CHECK_THROWS_AS(load_sh_coefficients(path, bl), std::runtime_error);
  {
    std::ofstream out(path);
    out << "n_max=3\n" << "0 0 bogus 0.0\n";
  }
  CHECK_THROWS_AS(load_sh_coefficients(path, bl), std::runtime_error);
  {
    std::ofstream out(path);
    out << "n_max=3\n" << "2 3 1.0 0.0\n";  // |m| > n
  }
  CHECK_THROWS_AS(load_sh_coefficients(path, bl), std::runtime_error);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_sh_coefficients(path, bl), std::runtime_error);
}

TEST_CASE("presets") {
  CHECK(preset_by_name("C1a").asymmetry == Catch::Approx(0.0045));
  CHECK(preset_by_name("C2b").asymmetry == Catch::Approx(0.0105));
  CHECK(preset_by_name("C3c").asymmetry == Catch::Approx(0.0222));
  CHECK(preset_by_name("C3c").probe_case == 'c');
  CHECK_THROWS_AS(preset_by_name("C4a"), std::invalid_argument);
  CHECK_THROWS_AS(preset_by_name("C1d"), std::invalid_argument);
  CHECK_THROWS_AS(preset_by_name("foo"), std::invalid_argument);

  const BandLimit bl(15);
  const WignerCoefficients c1a = preset_coefficients("C1a", bl, 11);
  CHECK(c1a.mu_zero_only());
  const WignerCoefficients c1b = preset_coefficients("C1b", bl, 11);
  CHECK_FALSE(c1b.mu_zero_only());
  for (const auto& [idx, v] : c1a.entries)
    CHECK(std::abs(c1b.get(idx) - v) <= 1e-15);
}
