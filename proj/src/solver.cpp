#include "boltzlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace boltzlab {

namespace {

double phi1(double x) {
  if (std::abs(x) < 1e-5) return 1.0 - x / 2.0 + x * x / 6.0;
  return -std::expm1(-x) / x;
}

double phi1_prime(double x) {
  if (std::abs(x) < 1e-4) return -0.5 + x / 3.0 - x * x / 8.0;
  return (std::exp(-x) * (x + 1.0) - 1.0) / (x * x);
}

// (1, v, |v|^2) at every node
std::vector<std::vector<double>> collision_invariants(const GridSpec &g) {
  const int nm = g.N + 2;
  std::vector<std::vector<double>> psi(nm, std::vector<double>(g.size()));
  double v[3];
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.coords(i, v);
    psi[0][i] = 1.0;
    double v2 = 0.0;
    for (int d = 0; d < g.N; ++d) {
      psi[1 + d][i] = v[d];
      v2 += v[d] * v[d];
    }
    psi[g.N + 1][i] = v2;
  }
  return psi;
}

std::vector<double> invariant_moments(const Field &f, const std::vector<std::vector<double>> &psi) {
  std::vector<double> m(psi.size(), 0.0);
  for (std::size_t j = 0; j < psi.size(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += psi[j][i] * f[i];
    m[j] = acc * f.grid.cell_volume();
  }
  return m;
}

bool solve_small(std::vector<double> A, std::vector<double> &b, int n) {
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(A[r * n + c]) > std::abs(A[piv * n + c])) piv = r;
    if (!(std::abs(A[piv * n + c]) > 0)) return false;
    if (piv != c) {
      for (int k = 0; k < n; ++k) std::swap(A[c * n + k], A[piv * n + k]);
      std::swap(b[c], b[piv]);
    }
    for (int r = c + 1; r < n; ++r) {
      const double m = A[r * n + c] / A[c * n + c];
      for (int k = c; k < n; ++k) A[r * n + k] -= m * A[c * n + k];
      b[r] -= m * b[c];
    }
  }
  for (int c = n - 1; c >= 0; --c) {
    for (int k = c + 1; k < n; ++k) b[c] -= A[c * n + k] * b[k];
    b[c] /= A[c * n + c];
  }
  return true;
}

void check_finite(const Field &f, const SolverState &s, const char *what) {
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!std::isfinite(f[i])) {
      std::ostringstream os;
      os << what << ": non-finite value at node " << i << " (t=" << s.t << ", step " << s.steps << ")";
      throw NumericalError(os.str());
    }
}

struct LinFit {
  double slope = 0, intercept = 0, r2 = 0;
};

LinFit linear_fit(const std::vector<double> &x, const std::vector<double> &y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 && sxx > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

double l1_weighted(const Field &f, double k) { return lp_norm(f, 1.0, k); }

}  // namespace

SchemeOptions default_scheme(int N) {
  SchemeOptions s;
  s.op = default_options(N);
  return s;
}

SolverState init_state(const Field &f0, double t, const CollisionKernel &K, const SchemeOptions &opts) {
  f0.check();
  SolverState s;
  s.t = t;
  s.f = f0;
  s.f.nonneg = true;
  s.reference = invariant_moments(f0, collision_invariants(f0.grid));
  if (opts.equilibrium_fix) {
    const Moments m = moments(f0);
    if (m.mass > 0 && m.temperature(f0.grid.N) > 0) {
      const Field M = maxwellian_for(f0);
      const Field gain = q_plus(M, M, K, opts.op);
      const Field L = loss_rate(M, K, opts.op.loss_mode);
      s.eq_defect = Field(f0.grid);
      for (std::size_t i = 0; i < M.size(); ++i)
        s.eq_defect[i] = M[i] > 1e-200 ? gain[i] / M[i] - L[i] : 0.0;
    }
  }
  restart_segment(s);
  return s;
}

void restart_segment(SolverState &s) {
  s.transported = s.f;
  s.smoothpart = Field(s.f.grid);
  s.smoothpart.nonneg = true;
  s.loss_integral = Field(s.f.grid);
  s.segment_start = s.t;
}

Field exponential_update(const Field &f, const Field &L, const Field &gain, double dt) {
  require_same_grid(f, L, "exponential_update");
  require_same_grid(f, gain, "exponential_update");
  Field out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = dt * L[i];
    out[i] = f[i] * std::exp(-x) + dt * phi1(x) * gain[i];
  }
  out.nonneg = f.nonneg && gain.nonneg;
  return out;
}

Field rk4_update(const Field &f, double dt, const std::function<Field(const Field &)> &rhs) {
  auto axpy = [](const Field &a, double c, const Field &b) {
    Field o = a;
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += c * b[i];
    o.nonneg = false;
    return o;
  };
  const Field k1 = rhs(f);
  const Field k2 = rhs(axpy(f, 0.5 * dt, k1));
  const Field k3 = rhs(axpy(f, 0.5 * dt, k2));
  const Field k4 = rhs(axpy(f, dt, k3));
  Field out = f;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  out.nonneg = false;
  return out;
}

void step_exponential(SolverState &s, double dt, const CollisionKernel &K, const SchemeOptions &opts) {
  if (!(dt > 0)) throw std::invalid_argument("step_exponential: dt must be positive");
  const GridSpec &g = s.f.grid;
  const Field &f = s.f;
  Field L = loss_rate(f, K, opts.op.loss_mode);
  if (!s.eq_defect.values.empty())
    for (std::size_t i = 0; i < L.size(); ++i) L[i] += s.eq_defect[i];
  const Field gain = q_plus(f, f, K, opts.op);
  check_finite(gain, s, "gain term");

  const std::size_t n = f.size();
  Field next(g);
  auto evaluate = [&](const Field &Lc) {
    for (std::size_t i = 0; i < n; ++i) {
      const double x = dt * Lc[i];
      next[i] = f[i] * std::exp(-x) + dt * phi1(x) * gain[i];
    }
  };

  Field Lc = L;
  if (opts.conservative) {
    const auto psi = collision_invariants(g);
    const int nm = static_cast<int>(psi.size());
    const double cell = g.cell_volume();
    std::vector<double> lambda(nm, 0.0);
    const double scale = std::max(std::abs(s.reference[0]), 1e-300);
    for (int it = 0; it < 12; ++it) {
      for (std::size_t i = 0; i < n; ++i) {
        double c = L[i];
        for (int j = 0; j < nm; ++j) c += lambda[j] * psi[j][i];
        Lc[i] = c;
      }
      evaluate(Lc);
      std::vector<double> r = invariant_moments(next, psi);
      double worst = 0.0;
      for (int j = 0; j < nm; ++j) {
        r[j] -= s.reference[j];
        worst = std::max(worst, std::abs(r[j]));
      }
      if (worst <= 1e-15 * scale) break;
      // d next / d Lc
      std::vector<double> J(nm * nm, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double x = dt * Lc[i];
        const double dn = -dt * f[i] * std::exp(-x) + dt * dt * phi1_prime(x) * gain[i];
        if (dn == 0.0) continue;
        for (int a = 0; a < nm; ++a) {
          const double pa = psi[a][i] * dn;
          for (int b = a; b < nm; ++b) J[a * nm + b] += pa * psi[b][i];
        }
      }
      for (int a = 0; a < nm; ++a)
        for (int b = 0; b < a; ++b) J[a * nm + b] = J[b * nm + a];
      for (double &x : J) x *= cell;
      for (double &x : r) x = -x;
      if (!solve_small(J, r, nm)) break;
      for (int j = 0; j < nm; ++j) lambda[j] += r[j];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double c = L[i];
      for (int j = 0; j < nm; ++j) c += lambda[j] * psi[j][i];
      Lc[i] = c;
    }
  }
  evaluate(Lc);
  check_finite(next, s, "exponential step");

  for (std::size_t i = 0; i < n; ++i) {
    const double x = dt * Lc[i];
    const double G = std::exp(-x);
    s.transported[i] *= G;
    s.smoothpart[i] = s.smoothpart[i] * G + dt * phi1(x) * gain[i];
    s.loss_integral[i] += dt * Lc[i];
  }
  next.nonneg = true;
  s.f = std::move(next);
  s.loss = std::move(Lc);
  s.t += dt;
  ++s.steps;
}

void step_rk4(SolverState &s, double dt, const CollisionKernel &K, const SchemeOptions &opts) {
  if (!(dt > 0)) throw std::invalid_argument("step_rk4: dt must be positive");
  Field next = rk4_update(s.f, dt, [&](const Field &x) { return q_full(x, K, opts.op); });
  check_finite(next, s, "rk4 step");
  s.f = std::move(next);
  s.loss = loss_rate(s.f, K, opts.op.loss_mode);
  s.t += dt;
  ++s.steps;
  // RK4 has no Duhamel structure: each step starts a new segment
  restart_segment(s);
}

AdvanceInfo advance(SolverState &s, double t_end, double dt, const CollisionKernel &K, const SchemeOptions &opts,
                    Integrator integ, const std::function<void(const SolverState &)> &on_step) {
  if (!(dt > 0)) throw std::invalid_argument("advance: dt must be positive");
  AdvanceInfo info;
  info.min_dt = dt;
  while (t_end - s.t > 1e-12 * std::max(1.0, std::abs(t_end))) {
    double h = std::min(dt, t_end - s.t);
    if (t_end - (s.t + h) < 1e-9 * dt) h = t_end - s.t;
    // CFL guard on the support of f
    Field L = loss_rate(s.f, K, opts.op.loss_mode);
    if (!s.eq_defect.values.empty())
      for (std::size_t i = 0; i < L.size(); ++i) L[i] += s.eq_defect[i];
    const double fmax = *std::max_element(s.f.values.begin(), s.f.values.end());
    double lmax = 0.0;
    for (std::size_t i = 0; i < L.size(); ++i)
      if (s.f[i] >= opts.cfl_support * fmax) lmax = std::max(lmax, std::abs(L[i]));
    while (h * lmax > opts.cfl) {
      h *= 0.5;
      ++info.halvings;
    }
    info.min_dt = std::min(info.min_dt, h);
    const bool last = (t_end - (s.t + h)) < 1e-9 * dt;
    if (integ == Integrator::exponential)
      step_exponential(s, h, K, opts);
    else
      step_rk4(s, h, K, opts);
    if (last) s.t = t_end;
    ++info.steps;
    if (on_step) on_step(s);
  }
  return info;
}

DuhamelSplit duhamel_split(const Field &fa, double a, double b, double dt, const CollisionKernel &K,
                           const SchemeOptions &opts) {
  if (b < a) throw std::invalid_argument("duhamel_split: b < a");
  SolverState s = init_state(fa, a, K, opts);
  if (b > a) advance(s, b, dt, K, opts);
  return {s.transported, s.smoothpart, s.f, s.loss_integral};
}

std::vector<double> node_times(double tau_p, double t, int n, double mu) {
  if (!(tau_p >= 0 && tau_p < t)) throw std::invalid_argument("node_times: need 0 <= tau' < t");
  if (n < 1) throw std::invalid_argument("node_times: n must be >= 1");
  if (!(mu > 0 && mu < 1)) throw std::invalid_argument("node_times: mu must lie in (0, 1)");
  std::vector<double> out;
  double prev = tau_p;
  for (int i = 0; i < n; ++i) {
    prev = prev + mu * (t - prev);
    out.push_back(prev);
  }
  return out;
}

DecompositionPlan make_plan(double t, double tau, int n, double mu, double C_stab, double K_prime) {
  DecompositionPlan p;
  p.t = t;
  p.tau = tau;
  p.n = n;
  p.mu = mu;
  if (!(tau > 0 && tau <= t)) throw std::invalid_argument("decomposition plan: need 0 < tau <= t");
  p.nodes.push_back(tau / 2);
  for (double x : node_times(tau / 2, t, n, mu)) p.nodes.push_back(x);
  p.nodes.push_back(t);
  p.C_stab = C_stab;
  p.K_prime = K_prime;
  p.mu_bound = (C_stab + K_prime) > 0 ? C_stab / (C_stab + K_prime) : 0.0;
  p.mu_ok = mu > p.mu_bound;
  return p;
}

std::vector<Decomposition> decomposition_series(const Field &f0, const CollisionKernel &K,
                                                const std::vector<double> &final_times, double tau, int n,
                                                double mu, const SchemeOptions &opts, double dt) {
  std::vector<DecompositionPlan> plans;
  std::vector<double> checkpoints;
  for (double T : final_times) {
    plans.push_back(make_plan(T, tau, n, mu));
    checkpoints.push_back(plans.back().nodes[1]);
    checkpoints.push_back(T);
  }
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

  // base flow: record f and the Duhamel smooth part over [0, c] at every checkpoint
  std::map<double, Field> f_at, smooth_at, transported_at;
  SolverState base = init_state(f0, 0.0, K, opts);
  for (double c : checkpoints) {
    advance(base, c, dt, K, opts);
    f_at[c] = base.f;
    smooth_at[c] = base.smoothpart;
    transported_at[c] = base.transported;
  }

  std::vector<Decomposition> out;
  for (const auto &plan : plans) {
    Decomposition d;
    d.t = plan.t;
    d.f = f_at.at(plan.t);
    // node 0 closes the base segment [0, t_0]
    const double t0 = plan.nodes[1];
    Field datum = smooth_at.at(t0);
    d.nodes.push_back({0, t0, lp_norm(transported_at.at(t0), 1.0, 0.0), moments(datum).mass});
    Field state_f = datum;
    for (int i = 1; i <= plan.n; ++i) {
      const double start = plan.nodes[i];
      const double stop = plan.nodes[i + 1];
      SolverState s = init_state(datum, start, K, opts);
      advance(s, stop, dt, K, opts);
      if (i < plan.n) {
        d.nodes.push_back({i, stop, lp_norm(s.transported, 1.0, 0.0), moments(s.smoothpart).mass});
        datum = s.smoothpart;
      } else {
        state_f = s.f;
      }
    }
    d.fS = state_f;
    d.fR = Field(d.f.grid);
    for (std::size_t i = 0; i < d.f.size(); ++i) {
      d.fR[i] = d.f[i] - d.fS[i];
      if (d.fS[i] < 0) d.fS_nonneg = false;
    }
    d.fR_l1 = lp_norm(d.fR, 1.0, 0.0);
    d.fS_h1 = sobolev_norm(d.fS, 1.0, 0.0);
    d.f_h1 = sobolev_norm(d.f, 1.0, 0.0);
    out.push_back(std::move(d));
  }
  return out;
}

Decomposition decomposition_tree(const Field &f0, const CollisionKernel &K, const DecompositionPlan &plan,
                                 const SchemeOptions &opts, double dt) {
  return decomposition_series(f0, K, {plan.t}, plan.tau, plan.n, plan.mu, opts, dt).front();
}

StabilityEstimate estimate_stability(const Field &f0, const Field &g0, const CollisionKernel &K, double T, double k,
                                     const SchemeOptions &opts, double dt) {
  if (!(T > 0)) throw std::invalid_argument("estimate_stability: T must be positive");
  StabilityEstimate est;
  auto gap = [&](const Field &a, const Field &b) {
    Field d = a;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= b[i];
    return l1_weighted(d, k);
  };
  const double g_init = gap(f0, g0);
  if (g_init <= 1e-14 * std::max(1.0, l1_weighted(f0, k))) {
    est.degenerate = true;
    return est;
  }
  SolverState a = init_state(f0, 0.0, K, opts), b = init_state(g0, 0.0, K, opts);
  std::vector<double> sums;
  auto record = [&] {
    est.t.push_back(a.t);
    est.gap.push_back(gap(a.f, b.f));
    Field s = a.f;
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += b.f[i];
    sums.push_back(l1_weighted(s, k + K.gamma()));
  };
  record();
  while (a.t < T - 1e-12) {
    const double h = std::min(dt, T - a.t);
    advance(a, a.t + h, dt, K, opts);
    advance(b, a.t, dt, K, opts);
    record();
  }
  for (std::size_t i = 1; i < est.t.size(); ++i) {
    const double sl = (std::log(est.gap[i]) - std::log(est.gap[i - 1])) / (est.t[i] - est.t[i - 1]);
    est.slopes.push_back(sl);
    est.C_stab = std::max(est.C_stab, sl);
    est.C_diff = std::max(est.C_diff, sl / (0.5 * (sums[i] + sums[i - 1])));
  }
  return est;
}

ExpFit fit_exponential_decay(const std::vector<double> &t, const std::vector<double> &y) {
  if (t.size() != y.size() || t.size() < 2) throw std::invalid_argument("fit_exponential_decay: need >= 2 samples");
  std::vector<double> ly;
  for (double v : y) {
    if (!(v > 0)) throw std::domain_error("fit_exponential_decay: nonpositive value in the fit window");
    ly.push_back(std::log(v));
  }
  const LinFit f = linear_fit(t, ly);
  return {-f.slope, std::exp(f.intercept), f.r2};
}

PowerFit fit_power_decay(const std::vector<double> &t, const std::vector<double> &y) {
  if (t.size() != y.size() || t.size() < 2) throw std::invalid_argument("fit_power_decay: need >= 2 samples");
  std::vector<double> lt, ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(y[i] > 0) || !(t[i] > 0)) throw std::domain_error("fit_power_decay: nonpositive value in the fit window");
    lt.push_back(std::log(t[i]));
    ly.push_back(std::log(y[i]));
  }
  const LinFit f = linear_fit(lt, ly);
  return {-f.slope, std::exp(f.intercept), f.r2};
}

DecayModel compare_decay_models(const std::vector<double> &t, const std::vector<double> &y) {
  DecayModel m;
  m.exponential = fit_exponential_decay(t, y);
  m.power = fit_power_decay(t, y);
  m.preferred = m.exponential.r2 >= m.power.r2 ? "exponential" : "power";
  return m;
}

double estimate_decay_constant(const Field &f0, const CollisionKernel &K, double T, const SchemeOptions &opts,
                               double dt) {
  SolverState s = init_state(f0, 0.0, K, opts);
  std::vector<double> t{0.0}, y{lp_norm(s.transported, 1.0, 0.0)};
  advance(s, T, dt, K, opts, Integrator::exponential, [&](const SolverState &st) {
    t.push_back(st.t);
    y.push_back(lp_norm(st.transported, 1.0, 0.0));
  });
  return fit_exponential_decay(t, y).lambda;
}

double DiffIneqFit::bound(double p) const {
  if (!(K_minus > 0)) return std::numeric_limits<double>::infinity();
  if (C_plus <= 0) return 0.0;
  return std::pow(C_plus / K_minus, 1.0 / (p * theta));
}

DiffIneqFit fit_diffineq(const std::vector<double> &t, const std::vector<double> &X, const std::vector<double> &Y,
                         double p, std::vector<double> theta_grid) {
  const std::size_t n = t.size();
  if (n < 10 || X.size() != n || Y.size() != n) throw std::invalid_argument("fit_diffineq: need >= 10 samples");
  if (theta_grid.empty())
    for (int i = 1; i <= 19; ++i) theta_grid.push_back(0.05 * i);
  // three-point derivative of X^p at interior samples
  std::vector<double> D, Xi, Yp;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
    const double a = std::pow(X[i - 1], p), b = std::pow(X[i], p), c = std::pow(X[i + 1], p);
    D.push_back(-h1 / (h0 * (h0 + h1)) * a + (h1 - h0) / (h0 * h1) * b + h0 / (h1 * (h0 + h1)) * c);
    Xi.push_back(X[i]);
    Yp.push_back(std::pow(Y[i], p));
  }
  const std::size_t m = D.size();
  double dscale = 0.0;
  for (double d : D) dscale = std::max(dscale, std::abs(d));

  DiffIneqFit best;
  bool have = false;
  for (double theta : theta_grid) {
    std::vector<double> A(m);
    for (std::size_t i = 0; i < m; ++i) A[i] = std::pow(Xi[i], p * (1.0 - theta));
    double saa = 0, sab = 0, sbb = 0, sad = 0, sbd = 0;
    for (std::size_t i = 0; i < m; ++i) {
      saa += A[i] * A[i];
      sab += A[i] * Yp[i];
      sbb += Yp[i] * Yp[i];
      sad += A[i] * D[i];
      sbd += Yp[i] * D[i];
    }
    // D ~ C A - K Yp with C, K >= 0
    auto resid = [&](double C, double Kc) {
      double r = 0.0;
      for (std::size_t i = 0; i < m; ++i) r += std::pow(D[i] - C * A[i] + Kc * Yp[i], 2);
      return r;
    };
    std::vector<std::pair<double, double>> cands{{0.0, 0.0}};
    const double det = saa * sbb - sab * sab;
    if (det > 1e-300 * saa * sbb) {
      const double C = (sad * sbb - sbd * sab) / det;
      const double Kc = -(saa * sbd - sab * sad) / det;
      if (C >= 0 && Kc >= 0) cands.emplace_back(C, Kc);
    }
    if (saa > 0) cands.emplace_back(std::max(0.0, sad / saa), 0.0);
    if (sbb > 0) cands.emplace_back(0.0, std::max(0.0, -sbd / sbb));
    double bc = 0, bk = 0, br = std::numeric_limits<double>::infinity();
    for (auto [C, Kc] : cands) {
      const double r = resid(C, Kc);
      if (r < br * (1 - 1e-12)) {
        br = r;
        bc = C;
        bk = Kc;
      }
    }
    // lift C+ until the inequality holds at every sample
    double lifted = bc;
    for (std::size_t i = 0; i < m; ++i)
      if (A[i] > 0) lifted = std::max(lifted, (D[i] + bk * Yp[i]) / A[i]);
    if (dscale == 0.0) lifted = bc = bk = 0.0;
    DiffIneqFit fit;
    fit.theta = theta;
    fit.C_plus = lifted;
    fit.K_minus = bk;
    fit.residual = dscale > 0 ? std::sqrt(br / m) / dscale : 0.0;
    double viol = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      viol = std::max(viol, D[i] - (fit.C_plus * A[i] - fit.K_minus * Yp[i]));
      scale = std::max({scale, std::abs(D[i]), fit.C_plus * A[i], fit.K_minus * Yp[i]});
    }
    fit.max_violation = scale > 0 ? std::max(0.0, viol) / scale : 0.0;
    const bool equilibrium = dscale <= 1e-14;
    fit.feasible = (fit.K_minus > 0 || equilibrium) && fit.max_violation <= 1e-3;
    const bool better = !have || fit.residual < best.residual * (1 - 1e-9) ||
                        (std::abs(fit.residual - best.residual) <= 1e-9 * best.residual && fit.C_plus < best.C_plus);
    if (better) {
      best = fit;
      have = true;
    }
  }
  return best;
}

}  // namespace boltzlab
