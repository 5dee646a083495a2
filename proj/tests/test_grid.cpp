#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sphcs/basis.hpp"
#include "sphcs/grid.hpp"
#include "sphcs/wigner.hpp"

using namespace sphcs;

namespace {

cplx field_at(const WignerCoefficients& a, double alpha, double beta, double gamma) {
  cplx acc(0.0);
  for (const auto& [idx, v] : a.entries)
    acc += v * wigner_D(idx.n, idx.mu, idx.m, alpha, beta, gamma);
  return acc;
}

}  // namespace

TEST_CASE("grid sizes") {
  const BandLimit bl(15);
  CHECK(SampleGrid(bl, 1, 3).total_rows() == 32768);
  CHECK(SampleGrid(bl, 1, 2).total_rows() == 1024);
  CHECK(SampleGrid(bl, 2, 2).side() == 2 * SampleGrid(bl, 1, 2).side());
  CHECK_THROWS_AS(SampleGrid(bl, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(SampleGrid(bl, 1, 4), std::invalid_argument);

  const SampleGrid g(bl, 1, 2);
  CHECK(g.angle(0) == 0.0);
  CHECK(g.angle(g.side() / 2) == Catch::Approx(kPi));
}

TEST_CASE("physical classes: polar size L, non-polar size 2") {
  for (int dims : {2, 3}) {
    for (int n : {1, 2, 4}) {
      const SampleGrid g(BandLimit(n), 1, dims);
      const PhysicalMap pm(g);
      const int L = g.side();
      for (std::int64_t r = 0; r < g.total_rows(); ++r) {
        const auto p = g.point(r);
        const int sz = pm.class_size(pm.class_of(r));
        if (p.u_beta == 0 || p.u_beta == L / 2)
          CHECK(sz == L);
        else
          CHECK(sz == 2);
      }
    }
  }
}

TEST_CASE("2D Nyquist grid at n_max 15 has 482 physical points") {
  const SampleGrid g(BandLimit(15), 1, 2);
  const PhysicalMap pm(g);
  // 30 non-polar beta rows of 32 pair into 480 classes, plus the two poles
  CHECK(pm.physical_count() == 482);
}

TEST_CASE("field value is constant on each physical class (3D)") {
  const BandLimit bl(3);
  const SampleGrid g(bl, 1, 3);
  const PhysicalMap pm(g);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> un(0, bl.n_max);
  std::uniform_real_distribution<double> uv(-1.0, 1.0);
  WignerCoefficients a(bl);
  for (int i = 0; i < 6; ++i) {
    const int n = un(rng);
    std::uniform_int_distribution<int> um(-n, n);
    a.entries[{n, um(rng), um(rng)}] = cplx(uv(rng), uv(rng));
  }
  std::vector<cplx> per_class(pm.physical_count(), cplx(0.0));
  std::vector<bool> seen(pm.physical_count(), false);
  for (std::int64_t r = 0; r < g.total_rows(); ++r) {
    const auto p = g.point(r);
    const cplx w = field_at(a, p.alpha, p.beta, p.gamma);
    const auto c = pm.class_of(r);
    if (!seen[c]) {
      per_class[c] = w;
      seen[c] = true;
    } else {
      CHECK(std::abs(w - per_class[c]) <= 1e-9);
    }
  }
}

TEST_CASE("field value is constant on each physical class (2D, mu = 0)") {
  const BandLimit bl(4);
  const SampleGrid g(bl, 1, 2);
  const PhysicalMap pm(g);
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> un(0, bl.n_max);
  std::uniform_real_distribution<double> uv(-1.0, 1.0);
  WignerCoefficients a(bl);
  for (int i = 0; i < 6; ++i) {
    const int n = un(rng);
    std::uniform_int_distribution<int> um(-n, n);
    a.entries[{n, um(rng), 0}] = cplx(uv(rng), uv(rng));
  }
  std::vector<cplx> per_class(pm.physical_count(), cplx(0.0));
  std::vector<bool> seen(pm.physical_count(), false);
  for (std::int64_t r = 0; r < g.total_rows(); ++r) {
    const auto p = g.point(r);
    const cplx w = field_at(a, 0.0, p.beta, p.gamma);
    const auto c = pm.class_of(r);
    if (!seen[c]) {
      per_class[c] = w;
      seen[c] = true;
    } else {
      CHECK(std::abs(w - per_class[c]) <= 1e-9);
    }
  }
}

TEST_CASE("oversampled grid keeps the class structure") {
  const SampleGrid g(BandLimit(2), 2, 2);
  const PhysicalMap pm(g);
  const int L = g.side();
  for (std::int64_t r = 0; r < g.total_rows(); ++r) {
    const auto p = g.point(r);
    const int sz = pm.class_size(pm.class_of(r));
    CHECK(sz == ((p.u_beta == 0 || p.u_beta == L / 2) ? L : 2));
  }
}

TEST_CASE("select_rows basics") {
  const SampleGrid g(BandLimit(15), 1, 2);
  const PhysicalMap pm(g);

  const SampleSelection all = select_rows(g, pm, g.total_rows(), 1);
  CHECK(all.physical_count == pm.physical_count());

  const SampleSelection s1 = select_rows(g, pm, 400, 42);
  const SampleSelection s2 = select_rows(g, pm, 400, 42);
  CHECK(s1.rows == s2.rows);
  CHECK(s1.physical_count >= 270);
  CHECK(s1.physical_count <= 330);

  CHECK_THROWS_AS(select_rows(g, pm, g.total_rows() + 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(select_rows(g, pm, 0, 0), std::invalid_argument);
}

TEST_CASE("selection inclusion frequency is uniform") {
  const SampleGrid g(BandLimit(1), 1, 2);  // 16 rows
  const PhysicalMap pm(g);
  const int draws = 10000;
  const std::int64_t m = 5;
  std::vector<int> hits(g.total_rows(), 0);
  for (int d = 0; d < draws; ++d) {
    const SampleSelection s = select_rows(g, pm, m, 1000 + d);
    for (auto r : s.rows) ++hits[r];
  }
  const double p = static_cast<double>(m) / g.total_rows();
  const double sigma = std::sqrt(p * (1.0 - p) / draws);
  for (auto h : hits) {
    const double freq = static_cast<double>(h) / draws;
    CHECK(std::abs(freq - p) <= 5.0 * sigma);
  }
}
