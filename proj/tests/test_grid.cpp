#include "boltzlab/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace boltzlab;

TEST_CASE("grid spacing and validation") {
  CHECK(make_grid(2, 64, 8).dv == 0.25);
  CHECK(make_grid(3, 16, 6).dv == 0.75);
  CHECK_THROWS_AS(make_grid(2, 63, 8), std::invalid_argument);
  CHECK_THROWS(make_grid(4, 16, 8));
  CHECK_THROWS(make_grid(2, 16, -1));
  const GridSpec g = make_grid(2, 8, 2);
  CHECK(g.nodes.front() == -2.0);
  CHECK(g.nodes.back() == doctest::Approx(1.5));
  CHECK(g.size() == 64);
  int ijk[2] = {3, 5};
  const std::size_t i = g.flatten(ijk);
  int back[2];
  g.unflatten(i, back);
  CHECK(back[0] == 3);
  CHECK(back[1] == 5);
}

TEST_CASE("interpolation") {
  const GridSpec g = make_grid(2, 16, 4);
  const Field lin = sample(g, [](const double *v) { return 1.0 + 2.0 * v[0] - 0.5 * v[1]; });
  SUBCASE("node collocation") {
    double v[2];
    g.coords(37, v);
    CHECK(interpolate(lin, v) == lin[37]);
  }
  SUBCASE("affine data at a cell midpoint") {
    const double p[2] = {0.25, -1.75};
    CHECK(interpolate(lin, p) == doctest::Approx(1.0 + 0.5 + 0.875).epsilon(1e-14));
  }
  SUBCASE("zero outside the box") {
    const double p[2] = {4.5, 0.0};
    CHECK(interpolate(lin, p) == 0.0);
  }
}

TEST_CASE("unitary DFT") {
  const GridSpec g = make_grid(2, 64, 8);
  SUBCASE("impulse has a flat spectrum") {
    Field d(g);
    d[1234] = 1.0;
    const Spectrum F = dft(d);
    const double m0 = std::abs(F[0]);
    for (const auto &z : F) CHECK(std::abs(z) == doctest::Approx(m0).epsilon(1e-12));
  }
  SUBCASE("Parseval and inverse") {
    Field f = sample(g, [](const double *v) { return std::sin(v[0]) * std::exp(-v[1] * v[1]) + 0.1 * v[0]; });
    double a = 0, b = 0;
    for (double x : f.values) a += x * x;
    a *= g.cell_volume();
    const Spectrum F = dft(f);
    for (const auto &z : F) b += std::norm(z);
    CHECK(std::abs(a - b) / a < 1e-12);
    const Field back = inverse_dft(F, g);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == doctest::Approx(f[i]).epsilon(1e-12));
  }
  SUBCASE("Gaussian against its closed-form transform") {
    // f = exp(-|v|^2/2); continuous transform (2 pi) e^{-|xi|^2/2}. With the unitary convention
    // |F_k| = dv^N / (dv^N M^N)^{1/2} * |sum f e^{-i xi v}| ~ (2 pi) e^{-|xi|^2/2} / (2R)^{N/2}.
    const Field f = sample(g, [](const double *v) { return std::exp(-0.5 * (v[0] * v[0] + v[1] * v[1])); });
    const Spectrum F = dft(f);
    int ijk[2];
    double worst = 0;
    for (std::size_t i = 0; i < F.size(); ++i) {
      g.unflatten(i, ijk);
      double xi2 = 0;
      for (int d = 0; d < 2; ++d) {
        const double xi = std::numbers::pi * g.wavenumbers[ijk[d]] / g.R;
        xi2 += xi * xi;
      }
      const double exact = 2 * std::numbers::pi * std::exp(-0.5 * xi2) / (2 * g.R);
      worst = std::max(worst, std::abs(std::abs(F[i]) - exact));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("shift and snapshots") {
  const GridSpec g = make_grid(2, 8, 2);
  Field f = sample(g, [](const double *v) { return v[0] + 10 * v[1] + 100; });
  const Field s = shift(f, {1, -2});
  int ijk[2] = {3, 3}, src[2] = {2, 5};
  CHECK(s[g.flatten(ijk)] == f[g.flatten(src)]);
  int edge[2] = {0, 3};
  CHECK(s[g.flatten(edge)] == 0.0);

  f[5] = 1.0 / 3.0;
  f[6] = 1e-300;
  std::stringstream ss;
  write_snapshot(ss, f, 0.125);
  double t = 0;
  const Field r = read_snapshot(ss, &t);
  CHECK(t == 0.125);
  CHECK(r.grid == g);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(r[i] == f[i]);
}

TEST_CASE("field checks") {
  const GridSpec g = make_grid(2, 8, 2);
  Field f(g, 1.0);
  f.nonneg = true;
  CHECK_NOTHROW(f.check());
  f[3] = -1.0;
  CHECK_THROWS(f.check());
  f[3] = std::nan("");
  f.nonneg = false;
  CHECK_THROWS(f.check());
  CHECK_THROWS_AS(require_same_grid(Field(g), Field(make_grid(2, 16, 2)), "test"), GridMismatch);
}
