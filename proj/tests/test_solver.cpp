#include "boltzlab/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace boltzlab;

namespace {

double max_abs_diff(const Field &a, const Field &b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(const Field &a) { return max_abs_diff(a, Field(a.grid)); }

Field disk(const GridSpec &g, double radius) {
  Field f = sample(g, [&](const double *v) { return v[0] * v[0] + v[1] * v[1] <= radius * radius ? 1.0 : 0.0; });
  const double m = moments(f).mass;
  for (double &x : f.values) x /= m;
  f.nonneg = true;
  return f;
}

// Similarity solution for the constant kernel, N = 2, written out independently:
// K(t) = 1 - e^{-t/8} / 2, f = exp(-|v|^2 / 2K) / (2 pi K) [1 + (1 - K)/K (|v|^2 / 2K - 1)]
Field bkw_2d(const GridSpec &g, double t) {
  const double K = 1.0 - 0.5 * std::exp(-t / 8.0);
  return sample(g, [&](const double *v) {
    const double r2 = v[0] * v[0] + v[1] * v[1];
    return std::exp(-r2 / (2 * K)) / (2 * std::numbers::pi * K) * (1 + (1 - K) / K * (r2 / (2 * K) - 1));
  });
}

SchemeOptions raw_scheme() {
  SchemeOptions o = default_scheme(2);
  o.conservative = false;
  o.equilibrium_fix = false;
  return o;
}

const GridSpec G = make_grid(2, 64, 8);

}  // namespace

TEST_CASE("exponential update is exact pure decay") {
  const Field f = maxwellian(G, 1.0, {0.3, 0.0}, 0.7);
  const Field L(G, 1.7);
  const Field out = exponential_update(f, L, Field(G), 0.05);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(out[i] == f[i] * std::exp(-1.7 * 0.05));
}

TEST_CASE("RK4 order on linear decay") {
  const Field f(make_grid(2, 8, 2), 1.0);
  auto err = [&](double dt) {
    const Field out = rk4_update(f, dt, [](const Field &x) {
      Field r = x;
      for (double &v : r.values) v = -v;
      return r;
    });
    return std::abs(out[0] - std::exp(-dt));
  };
  const double e1 = err(0.1), e2 = err(0.05);
  CHECK(e1 <= 1e-7);
  CHECK(e1 / e2 == doctest::Approx(32.0).epsilon(0.05));
}

TEST_CASE("Maxwellian drifts only by the quadrature error") {
  const CollisionKernel K = hard_sphere(2);
  const Field M = maxwellian(G, 1.0, {0.0, 0.0}, 1.0);
  const double dt = 0.05;
  for (bool fix : {false, true}) {
    SchemeOptions o = default_scheme(2);
    o.equilibrium_fix = fix;
    o.conservative = fix;
    SolverState a = init_state(M, 0.0, K, o);
    step_exponential(a, dt, K, o);
    CHECK(max_abs_diff(a.f, M) / max_abs(M) <= 1e-2 * dt);
    SolverState b = init_state(M, 0.0, K, o);
    step_rk4(b, dt, K, o);
    CHECK(max_abs_diff(b.f, M) / max_abs(M) <= 1e-2 * dt);
  }
}

TEST_CASE("BKW similarity solution") {
  const CollisionKernel K = constant_kernel(2);
  const SchemeOptions o = raw_scheme();
  const Field exact = bkw_2d(G, 1.0);
  SUBCASE("exponential scheme") {
    SolverState s = init_state(bkw_2d(G, 0.0), 0.0, K, o);
    advance(s, 1.0, 0.01, K, o);
    CHECK(max_abs_diff(s.f, exact) <= 1e-3);
  }
  SUBCASE("RK4") {
    SolverState s = init_state(bkw_2d(G, 0.0), 0.0, K, o);
    advance(s, 1.0, 0.01, K, o, Integrator::rk4);
    CHECK(max_abs_diff(s.f, exact) <= 1e-3);
  }
}

TEST_CASE("Duhamel split") {
  const CollisionKernel K = hard_sphere(2);
  const SchemeOptions o = default_scheme(2);
  const Field f = disk(G, 2.0);
  SUBCASE("empty interval") {
    const DuhamelSplit d = duhamel_split(f, 1.0, 1.0, 0.05, K, o);
    CHECK(d.transported.values == f.values);
    CHECK(max_abs(d.smoothpart) == 0.0);
  }
  SUBCASE("the gain part is smoother than the datum") {
    const DuhamelSplit d = duhamel_split(f, 0.0, 0.5, 0.05, K, o);
    CHECK(fourier_decay_exponent(d.smoothpart).exponent >= fourier_decay_exponent(f).exponent + 0.4);
    double id = 0;
    for (std::size_t i = 0; i < f.size(); ++i) id = std::max(id, std::abs(d.f_end[i] - d.transported[i] - d.smoothpart[i]));
    CHECK(id <= 1e-12 * max_abs(d.f_end));
  }
}

TEST_CASE("node times") {
  auto eq = [](const std::vector<double> &a, const std::vector<double> &b) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
  };
  eq(node_times(1, 9, 3, 0.5), {5, 7, 8});
  eq(node_times(0, 8, 2, 0.9), {7.2, 7.92});
  eq(node_times(2, 6, 1, 0.25), {3});
  CHECK_THROWS(node_times(1, 9, 3, 1.0));
  CHECK_THROWS(node_times(9, 1, 3, 0.5));
}

TEST_CASE("decomposition with a single node is one restarted Duhamel segment") {
  const GridSpec g = make_grid(2, 32, 8);
  const CollisionKernel K = hard_sphere(2);
  const SchemeOptions o = default_scheme(2);
  const Field f0 = disk(g, 2.0);
  const DecompositionPlan plan = make_plan(3.0, 1.0, 1, 0.5);
  const Decomposition d = decomposition_tree(f0, K, plan, o, 0.1);
  const double t0 = plan.nodes[1];
  const DuhamelSplit base = duhamel_split(f0, 0.0, t0, 0.1, K, o);
  const DuhamelSplit last = duhamel_split(base.smoothpart, t0, 3.0, 0.1, K, o);
  CHECK(max_abs_diff(d.fS, last.f_end) <= 1e-12 * max_abs(d.fS));
  for (std::size_t i = 0; i < d.f.size(); ++i) CHECK(d.fR[i] == d.f[i] - d.fS[i]);
  // the base flow stops at t0 = 1.75 on its way, a different step partition
  SolverState s = init_state(f0, 0.0, K, o);
  advance(s, 3.0, 0.1, K, o);
  CHECK(max_abs_diff(d.f, s.f) <= 1e-4 * max_abs(s.f));
  CHECK(d.fS_nonneg);
}

TEST_CASE("plan flags mu below the stability bound") {
  const DecompositionPlan ok = make_plan(6, 1, 3, 0.8, 1.0, 1.0);
  CHECK(ok.mu_bound == doctest::Approx(0.5));
  CHECK(ok.mu_ok);
  CHECK_FALSE(make_plan(6, 1, 3, 0.3, 1.0, 1.0).mu_ok);
}

TEST_CASE("stability estimate") {
  const GridSpec g = make_grid(2, 32, 8);
  const SchemeOptions o = default_scheme(2);
  const Field f0 = disk(g, 2.0);
  CHECK(estimate_stability(f0, f0, hard_sphere(2), 1.0, 0.0, o, 0.1).degenerate);

  Field g0 = f0;
  for (double &x : g0.values) x *= 1.01;
  const StabilityEstimate e = estimate_stability(f0, g0, hard_sphere(2), 1.0, 0.0, o, 0.1);
  CHECK_FALSE(e.degenerate);
  for (std::size_t i = 0; i < e.t.size(); ++i) CHECK(e.gap[i] <= e.gap[0] * std::exp(e.C_stab * e.t[i]) * (1 + 1e-12));

  // constant kernel: ||Q(f) - Q(g)||_1 <= 2 ||f + g||_1 ||f - g||_1
  const SchemeOptions raw = raw_scheme();
  const StabilityEstimate c =
      estimate_stability(bkw_2d(g, 0.0), bkw_2d(g, 0.5), constant_kernel(2), 1.0, 0.0, raw, 0.1);
  CHECK(c.C_diff <= 2.0);
}

TEST_CASE("decay fits") {
  std::vector<double> t, y, p;
  for (int i = 0; i <= 20; ++i) {
    t.push_back(1.0 + 0.25 * i);
    y.push_back(3.0 * std::exp(-2.0 * t.back()));
    p.push_back(std::pow(t.back(), -4.0));
  }
  const ExpFit e = fit_exponential_decay(t, y);
  CHECK(e.lambda == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(e.C == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(e.r2 == doctest::Approx(1.0).epsilon(1e-10));
  const DecayModel m = compare_decay_models(t, p);
  CHECK(m.exponential.r2 < m.power.r2 - 0.01);
  CHECK(m.preferred == "power");
  CHECK(m.power.exponent == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("differential inequality fit") {
  SUBCASE("synthetic equality") {
    // X^2 = t + e^{-t}, Y^2 = 1 + e^{-t}: d/dt X^2 = 2 - 1 * Y^2, theta = 1
    std::vector<double> t, X, Y;
    for (int i = 0; i <= 400; ++i) {
      t.push_back(0.01 * i + 0.5);
      X.push_back(std::sqrt(t.back() + std::exp(-t.back())));
      Y.push_back(std::sqrt(1.0 + std::exp(-t.back())));
    }
    const DiffIneqFit f = fit_diffineq(t, X, Y, 2.0, {1.0});
    CHECK(f.C_plus == doctest::Approx(2.0).epsilon(0.01));
    CHECK(f.K_minus == doctest::Approx(1.0).epsilon(0.01));
    CHECK(f.max_violation <= 1e-6);
    CHECK(f.feasible);
  }
  SUBCASE("equilibrium series") {
    std::vector<double> t, X(30, 0.3), Y(30, 0.5);
    for (int i = 0; i < 30; ++i) t.push_back(0.1 * i);
    const DiffIneqFit f = fit_diffineq(t, X, Y, 2.0);
    CHECK(f.feasible);
    CHECK(f.C_plus <= 1e-12);
    CHECK(f.K_minus <= 1e-12);
  }
  SUBCASE("hard-sphere run from an indicator") {
    const GridSpec g = make_grid(2, 32, 8);
    const CollisionKernel K = hard_sphere(2);
    const SchemeOptions o = default_scheme(2);
    SolverState s = init_state(disk(g, 2.0), 0.0, K, o);
    std::vector<double> t{0.0}, X{lp_norm(s.f, 2, 0)}, Y{lp_norm(s.f, 2, 0.5)};
    advance(s, 3.0, 0.05, K, o, Integrator::exponential, [&](const SolverState &st) {
      t.push_back(st.t);
      X.push_back(lp_norm(st.f, 2, 0));
      Y.push_back(lp_norm(st.f, 2, 0.5));
    });
    CHECK(fit_diffineq(t, X, Y, 2.0).feasible);
  }
}

TEST_CASE("relaxation to the Maxwellian and the lower bound") {
  const GridSpec g = make_grid(2, 32, 8);
  const CollisionKernel K = hard_sphere(2);
  const SchemeOptions o = default_scheme(2);
  const Field f0 = disk(g, 2.0);
  const Field M = maxwellian_for(f0);
  SolverState s = init_state(f0, 0.0, K, o);
  std::vector<double> t, d;
  Field at1;
  advance(s, 6.0, 0.05, K, o, Integrator::exponential, [&](const SolverState &st) {
    if (std::abs(st.t - 1.0) < 1e-9) at1 = st.f;
    if (st.t < 1.0 - 1e-9) return;
    t.push_back(st.t);
    double acc = 0;
    for (std::size_t i = 0; i < st.f.size(); ++i) acc += std::abs(st.f[i] - M[i]);
    d.push_back(acc * g.cell_volume());
  });
  const ExpFit e = fit_exponential_decay(t, d);
  CHECK(e.lambda > 0);
  CHECK(e.r2 >= 0.9);

  // lower bound fitted on the even nodes of |v| <= R/2 at t = 1, checked on all of them
  const double A0 = 0.75;
  double K0 = 1e300, v[2];
  int ij[2];
  for (std::size_t i = 0; i < at1.size(); ++i) {
    g.coords(i, v);
    g.unflatten(i, ij);
    if ((ij[0] + ij[1]) % 2 || std::hypot(v[0], v[1]) > g.R / 2) continue;
    K0 = std::min(K0, at1[i] * std::exp(A0 * (v[0] * v[0] + v[1] * v[1])));
  }
  CHECK(lower_bound_margin(at1, 0.5 * K0, A0, 2.0) > 0.0);
}
