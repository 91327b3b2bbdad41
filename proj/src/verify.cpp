#include "boltzlab/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <cstdio>
#include <sstream>

namespace boltzlab {

using json = nlohmann::ordered_json;

bool VerifyReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check &c) { return c.pass; });
}

std::string VerifyReport::json() const {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["pass"] = pass();
  auto arr = nlohmann::ordered_json::array();
  for (const Check &c : checks) {
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto &[k, v] : c.measured) m[k] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
    arr.push_back({{"name", c.name}, {"claim", c.claim}, {"measured", m}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  }
  j["checks"] = arr;
  return j.dump(2) + "\n";
}

std::string VerifyReport::text() const {
  std::ostringstream os;
  for (const Check &c : checks) {
    os << (c.pass ? "PASS " : "FAIL ") << suite << "/" << c.name << ":";
    for (const auto &[k, v] : c.measured) os << " " << k << "=" << format_double(v);
    os << "  [" << c.tolerance << "]\n";
  }
  os << (pass() ? "PASS " : "FAIL ") << suite << " (" << checks.size() << " checks)\n";
  return os.str();
}

std::vector<std::string> verify_suites() {
  return {"operators", "conservation", "lp", "smoothing", "decomposition", "equilibrium", "appendix"};
}

double disk_edge(const GridSpec &g, double radius) {
  double rin = 0.0, rout = std::numeric_limits<double>::infinity();
  double v[3];
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.coords(i, v);
    double r2 = 0;
    for (int d = 0; d < g.N; ++d) r2 += v[d] * v[d];
    const double r = std::sqrt(r2);
    if (r2 <= radius * radius)
      rin = std::max(rin, r);
    else
      rout = std::min(rout, r);
  }
  return 0.5 * (rin + rout);
}

namespace {

using Measured = std::vector<std::pair<std::string, double>>;

Check check(std::string name, std::string claim, Measured m, std::string tol, bool pass) {
  return {std::move(name), std::move(claim), std::move(m), std::move(tol), pass};
}

double max_abs(const Field &f) {
  double m = 0;
  for (double x : f.values) m = std::max(m, std::abs(x));
  return m;
}

double l2_diff_rel(const Field &a, const Field &b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

Field add(const Field &a, const Field &b, double cb = 1.0) {
  Field o = a;
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += cb * b[i];
  return o;
}

std::size_t origin_index(const GridSpec &g) {
  int ijk[3] = {g.M / 2, g.M / 2, g.M / 2};
  return g.flatten(ijk);
}

/// Sum of a few Gaussian bumps, nonnegative and negligible at the box edge.
Field random_smooth(const GridSpec &g, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int bumps = 1 + static_cast<int>(3 * U(rng));
  std::vector<std::vector<double>> centers;
  std::vector<double> widths, amps;
  for (int b = 0; b < bumps; ++b) {
    std::vector<double> c(g.N);
    for (double &x : c) x = (2 * U(rng) - 1) * g.R / 3;
    centers.push_back(c);
    widths.push_back(0.5 + U(rng));
    amps.push_back(0.2 + U(rng));
  }
  Field f = sample(g, [&](const double *v) {
    double s = 0;
    for (int b = 0; b < bumps; ++b) {
      double r2 = 0;
      for (int d = 0; d < g.N; ++d) r2 += (v[d] - centers[b][d]) * (v[d] - centers[b][d]);
      s += amps[b] * std::exp(-r2 / (2 * widths[b] * widths[b]));
    }
    return s;
  });
  f.nonneg = true;
  return f;
}

Field random_nonneg(const GridSpec &g, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Field f(g);
  for (double &x : f.values) x = U(rng);
  f.nonneg = true;
  return f;
}

Field compact_bump(const GridSpec &g, const std::vector<double> &c, double a) {
  Field f = sample(g, [&](const double *v) {
    double r2 = 0;
    for (int d = 0; d < g.N; ++d) r2 += (v[d] - c[d]) * (v[d] - c[d]);
    const double x = 1.0 - r2 / (a * a);
    return x > 0 ? x * x * x * x : 0.0;
  });
  f.nonneg = true;
  return f;
}

double sphere_area(int N) { return N == 2 ? 2 * std::numbers::pi : 4 * std::numbers::pi; }

/// Relative mass and energy defects of the raw operator on f.
std::pair<double, double> raw_defects(const Field &f, const CollisionKernel &K, const OperatorOptions &op) {
  const Field qp = q_plus(f, f, K, op);
  const Field qm = q_minus(f, f, K, op);
  const GridSpec &g = f.grid;
  double m = 0, e = 0, mp = 0, ep = 0, v[3];
  for (std::size_t i = 0; i < f.size(); ++i) {
    g.coords(i, v);
    double r2 = 0;
    for (int d = 0; d < g.N; ++d) r2 += v[d] * v[d];
    m += qp[i] - qm[i];
    e += (qp[i] - qm[i]) * r2;
    mp += std::abs(qp[i]);
    ep += std::abs(qp[i]) * r2;
  }
  return {std::abs(m) / mp, std::abs(e) / ep};
}

struct Trajectory {
  std::vector<double> t, mass, energy, entropy, l2, l2w, dist;
  double worst_entropy_increase = -std::numeric_limits<double>::infinity();
};

Trajectory run_trajectory(const Field &f0, double T, double dt, const CollisionKernel &K, const SchemeOptions &opts) {
  Trajectory tr;
  const Field M = maxwellian_for(f0);
  auto record = [&](double t, const Field &f) {
    const Moments m = moments(f);
    tr.t.push_back(t);
    tr.mass.push_back(m.mass);
    tr.energy.push_back(m.energy);
    const double H = entropy(f);
    if (!tr.entropy.empty()) tr.worst_entropy_increase = std::max(tr.worst_entropy_increase, H - tr.entropy.back());
    tr.entropy.push_back(H);
    tr.l2.push_back(lp_norm(f, 2.0, 0.0));
    tr.l2w.push_back(lp_norm(f, 2.0, K.gamma() / 2.0));
    double acc = 0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += std::abs(f[i] - M[i]);
    tr.dist.push_back(acc * f.grid.cell_volume());
  };
  SolverState s = init_state(f0, 0.0, K, opts);
  record(0.0, s.f);
  advance(s, T, dt, K, opts, Integrator::exponential, [&](const SolverState &st) { record(st.t, st.f); });
  return tr;
}

RunConfig with_grid(const RunConfig &c, int M) {
  RunConfig o = c;
  o.M = M;
  return o;
}


/// Nodes within window of the sphere |v| = edge.
std::vector<std::size_t> edge_nodes(const GridSpec &g, double edge, double window) {
  std::vector<std::size_t> out;
  double v[3];
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.coords(i, v);
    double r2 = 0;
    for (int d = 0; d < g.N; ++d) r2 += v[d] * v[d];
    if (std::abs(std::sqrt(r2) - edge) <= window) out.push_back(i);
  }
  return out;
}

double ring_mean(const Field &f, const std::vector<std::size_t> &idx) {
  double s = 0;
  for (std::size_t i : idx) s += f[i];
  return s / static_cast<double>(idx.size());
}

/// Value at |v| = edge of a quadratic least-squares fit in |v| - edge over the ring (f smooth there).
double edge_value(const Field &f, double edge, double window) {
  const GridSpec &g = f.grid;
  double S[5] = {0, 0, 0, 0, 0}, T[3] = {0, 0, 0}, v[3];
  for (std::size_t i : edge_nodes(g, edge, window)) {
    g.coords(i, v);
    double r2 = 0;
    for (int d = 0; d < g.N; ++d) r2 += v[d] * v[d];
    const double x = std::sqrt(r2) - edge;
    double pw = 1;
    for (int k = 0; k < 5; ++k) {
      S[k] += pw;
      if (k < 3) T[k] += pw * f[i];
      pw *= x;
    }
  }
  double A[3][4] = {{S[0], S[1], S[2], T[0]}, {S[1], S[2], S[3], T[1]}, {S[2], S[3], S[4], T[2]}};
  for (int col = 0; col < 3; ++col)
    for (int row = col + 1; row < 3; ++row) {
      const double m = A[row][col] / A[col][col];
      for (int k = col; k < 4; ++k) A[row][k] -= m * A[col][k];
    }
  double x[3];
  for (int row = 2; row >= 0; --row) {
    double acc = A[row][3];
    for (int k = row + 1; k < 3; ++k) acc -= A[row][k] * x[k];
    x[row] = acc / A[row][row];
  }
  return x[0];
}

// ---------------------------------------------------------------- operators

void suite_operators(const RunConfig &c, std::vector<Check> &out) {
  const GridSpec g = run_grid(c);
  const CollisionKernel hs = hard_sphere(c.N);
  const SchemeOptions sch = run_scheme(c);
  const OperatorOptions &op = sch.op;
  std::mt19937_64 rng(c.seed);

  {
    double wsum = 0, msum = 0;
    std::vector<double> first(c.N, 0.0);
    for (std::size_t j = 0; j < op.quad.count(); ++j) {
      wsum += op.quad.weights[j];
      for (int d = 0; d < c.N; ++d) first[d] += op.quad.weights[j] * op.quad.node(j)[d];
    }
    for (double x : first) msum = std::max(msum, std::abs(x));
    const double err = std::abs(wsum - sphere_area(c.N));
    out.push_back(check("sigma_quadrature", "sigma nodes integrate 1 and sigma exactly on the unit sphere",
                        {{"weight_sum_error", err}, {"first_moment", msum}}, "<= 1e-12",
                        err <= 1e-12 && msum <= 1e-12));
  }

  const Field M = maxwellian(g, 1.0, std::vector<double>(c.N, 0.0), 1.0);
  {
    auto ratio = [&](const GridSpec &gg) {
      const Field MM = maxwellian(gg, 1.0, std::vector<double>(c.N, 0.0), 1.0);
      const Field qp = q_plus(MM, MM, hs, op);
      const Field qf = add(qp, q_minus(MM, MM, hs, op), -1.0);
      return max_abs(qf) / max_abs(qp);
    };
    const double r = ratio(g);
    out.push_back(check("equilibrium_identity", "Q(M, M) = 0 for the Maxwellian", {{"ratio", r}}, "<= 1e-2",
                        r <= 1e-2));
    if (c.N == 2) {
      const double r2 = ratio(make_grid(c.N, 2 * c.M, c.R));
      out.push_back(check("equilibrium_identity_refined", "Q(M, M) = 0, quadrature error shrinks with the grid",
                          {{"ratio", r2}, {"M", 2.0 * c.M}}, "<= 5e-3", r2 <= 5e-3));
    }
  }

  {
    const Field L = loss_rate(M, hs, op.loss_mode);
    const double exact = c.N == 2 ? std::sqrt(std::numbers::pi / 2) : 2 * std::sqrt(2 / std::numbers::pi);
    const double val = L[origin_index(g)];
    out.push_back(check("loss_rate_mean_speed", "loss rate of the Maxwellian at 0 is the mean speed",
                        {{"value", val}, {"exact", exact}}, "abs error <= 1e-3", std::abs(val - exact) <= 1e-3));
    const Field disk = disk_indicator(g, 2.0);
    const Field a = loss_rate(disk, hs, LossMode::direct), b = loss_rate(disk, hs, LossMode::fft);
    const double d = max_abs(add(a, b, -1.0)) / max_abs(a);
    out.push_back(check("loss_modes_agree", "direct and FFT loss convolutions agree", {{"rel_diff", d}},
                        "<= 1e-10", d <= 1e-10));
  }

  {
    const GridSpec small = make_grid(c.N, c.N == 2 ? 16 : 8, c.R);
    const Field g1 = random_nonneg(small, rng), g2 = random_nonneg(small, rng), f = random_nonneg(small, rng);
    const OperatorOptions sop = run_scheme(with_grid(c, small.M)).op;
    const Field q1 = q_plus(g1, f, hs, sop), q2 = q_plus(g2, f, hs, sop);
    const double a = 0.37;
    Field mix = g2;
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] += a * g1[i];
    const Field qm = q_plus(mix, f, hs, sop);
    double err = 0;
    for (std::size_t i = 0; i < qm.size(); ++i) err = std::max(err, std::abs(qm[i] - a * q1[i] - q2[i]));
    err /= max_abs(qm);
    const double mn = std::min(*std::min_element(q1.values.begin(), q1.values.end()),
                               *std::min_element(q2.values.begin(), q2.values.end()));
    out.push_back(check("gain_positivity", "Q+(g, f) >= 0 for nonnegative g, f", {{"min", mn}}, ">= 0", mn >= 0));
    out.push_back(check("bilinearity", "Q+ is bilinear", {{"rel_error", err}}, "<= 1e-12", err <= 1e-12));

    KineticPart capped = hs.phi;
    capped.family = KineticPart::Family::capped;
    const CollisionKernel small_kernel = make_kernel(c.N, capped, hs.b);
    const Field qs = q_plus(g1, f, small_kernel, sop);
    double worst = 0;
    for (std::size_t i = 0; i < qs.size(); ++i) worst = std::max(worst, qs[i] - q1[i]);
    out.push_back(check("kernel_monotonicity", "Q+ is monotone in the kernel (min(|z|,1) <= |z|)",
                        {{"max_excess", worst}}, "<= 0", worst <= 0));
  }

  {
    std::vector<double> centre(c.N, 0.0);
    const Field f = compact_bump(g, centre, 1.5);
    std::vector<int> h(c.N, 0);
    h[0] = 3;
    if (c.N > 1) h[1] = -2;
    const Field a = shift(q_full(f, hs, op), h);
    const Field b = q_full(shift(f, h), hs, op);
    const double err = max_abs(add(a, b, -1.0)) / max_abs(a);
    out.push_back(check("galilean_shift", "Q commutes with velocity translations", {{"rel_error", err}}, "<= 1e-10",
                        err <= 1e-10));
  }

  {
    const CollisionKernel K = run_kernel(c);
    const Field data = disk_indicator(g, 2.0);
    const MollifiedSplit sp8 = split_kernel(K, 8, 8);
    Field sum(g);
    for (const char *piece : {"SS", "RS", "SR", "RR"}) sum = add(sum, q_plus(data, data, kernel_piece(K, sp8, piece), op));
    const Field full = q_plus(data, data, K, op);
    const double err = l2_diff_rel(sum, full);
    out.push_back(check("split_consistency", "Q+_S + Q+_RS + Q+_SR + Q+_RR = Q+", {{"rel_l2", err}}, "<= 1e-10",
                        err <= 1e-10));
    std::vector<double> tails;
    for (int m : {8, 16, 32}) {
      const MollifiedSplit sp = split_kernel(K, m, 8);
      const Field t = add(q_plus(data, data, kernel_piece(K, sp, "SR"), op),
                          q_plus(data, data, kernel_piece(K, sp, "RR"), op));
      tails.push_back(lp_norm(t, 2.0, 0.0));
    }
    const bool mono = tails[1] < tails[0] && tails[2] < tails[1];
    out.push_back(check("angular_remainder_decreases", "remainder pieces vanish as the angular split is refined",
                        {{"m8", tails[0]}, {"m16", tails[1]}, {"m32", tails[2]}}, "strictly decreasing in m", mono));
  }

  if (c.N == 2) {
    const Field bump = maxwellian(g, 1.0, {1.0, 0.0}, 0.5);
    const double e1 = l2_diff_rel(carleman_q_plus(bump, bump, hs), q_plus(bump, bump, hs, op));
    const double e2 = l2_diff_rel(carleman_q_plus(M, M, hs), q_minus(M, M, hs, op));
    out.push_back(check("carleman_cross_check", "Carleman representation reproduces Q+",
                        {{"bump_rel_l2", e1}, {"maxwellian_rel_l2", e2}}, "<= 0.02", e1 <= 0.02 && e2 <= 0.02));
  }

  {
    const double a = gain_exponent(2, 2, ExponentRule::corollary), b = gain_exponent(2, 3, ExponentRule::corollary),
                 t = gain_exponent(2, 2, ExponentRule::theorem);
    out.push_back(check("gain_exponents", "integrability gain exponents of the gain operator",
                        {{"p2_N2_corollary", a}, {"p2_N3_corollary", b}, {"p2_N2_theorem", t}}, "exactly 4, 6, 1.5",
                        a == 4.0 && b == 6.0 && t == 1.5));
  }
}

// ---------------------------------------------------------------- conservation

void suite_conservation(const RunConfig &c, std::vector<Check> &out) {
  const GridSpec g = run_grid(c);
  const CollisionKernel K = run_kernel(c);
  const SchemeOptions opts = run_scheme(c);
  const Field disk = disk_indicator(g, c.init.radius);

  {
    const auto [m1, e1] = raw_defects(disk, K, opts.op);
    const GridSpec g2 = make_grid(c.N, 2 * c.M, c.R);
    const auto [m2, e2] = raw_defects(disk_indicator(g2, c.init.radius), K, run_scheme(with_grid(c, 2 * c.M)).op);
    out.push_back(check("quadrature_defect_order", "collision invariants are conserved in the grid limit",
                        {{"mass_defect", m1}, {"energy_defect", e1}, {"mass_defect_2M", m2}, {"energy_defect_2M", e2}},
                        "both shrink >= 2x when M doubles", m1 >= 2 * m2 && e1 >= 2 * e2));
  }

  const Trajectory tr = run_trajectory(disk, 5.0, c.dt, K, opts);
  double dm = 0, de = 0;
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    dm = std::max(dm, std::abs(tr.mass[i] - tr.mass[0]));
    de = std::max(de, std::abs(tr.energy[i] - tr.energy[0]));
  }
  out.push_back(check("drift", "mass and energy are conserved along the flow", {{"mass_drift", dm}, {"energy_drift", de}},
                      "mass <= 1e-4, energy <= 1e-3 over [0, 5]", dm <= 1e-4 && de <= 1e-3));

  auto htheorem = [&](const std::string &name, const Trajectory &t) {
    out.push_back(check("h_theorem_" + name, "entropy is nonincreasing",
                        {{"max_increase", t.worst_entropy_increase}, {"steps", double(t.t.size() - 1)}},
                        "<= 1e-8 per step", t.worst_entropy_increase <= 1e-8));
  };
  htheorem("disk", tr);
  htheorem("maxwellian", run_trajectory(maxwellian(g, 1.0, std::vector<double>(c.N, 0.0), 1.0), 5.0, c.dt, K, opts));
  htheorem("double_bump", run_trajectory(double_bump(g, c.init.separation, c.init.width), 5.0, c.dt, K, opts));
}

// ---------------------------------------------------------------- lp

void suite_lp(const RunConfig &c, std::vector<Check> &out) {
  const GridSpec g = run_grid(c);
  const CollisionKernel K = run_kernel(c);
  const SchemeOptions opts = run_scheme(c);
  const Trajectory tr = run_trajectory(disk_indicator(g, c.init.radius), 10.0, c.dt, K, opts);
  const DiffIneqFit fit = fit_diffineq(tr.t, tr.l2, tr.l2w, 2.0);
  const double sup = *std::max_element(tr.l2.begin(), tr.l2.end());
  const double bound = 1.05 * std::max(tr.l2.front(), fit.bound(2.0));
  out.push_back(check("diffineq_fit", "d/dt ||f||_2^2 <= C+ ||f||^{2(1-theta)} - K- ||f||_{L^2_{gamma/2}}^2",
                      {{"C_plus", fit.C_plus}, {"K_minus", fit.K_minus}, {"theta", fit.theta},
                       {"max_violation", fit.max_violation}},
                      "feasible, violation <= 1e-3 of the term scale", fit.feasible));
  out.push_back(check("uniform_l2_bound", "||f||_2 stays below max(||f0||_2, (C+/K-)^{1/(2 theta)})",
                      {{"sup_l2", sup}, {"l2_initial", tr.l2.front()}, {"fit_level", fit.bound(2.0)}},
                      "sup <= 1.05 x bound on [0, 10]", sup <= bound));
}

// ---------------------------------------------------------------- smoothing

void suite_smoothing(const RunConfig &c, std::vector<Check> &out) {
  const GridSpec g = run_grid(c);
  const CollisionKernel K = run_kernel(c);
  const SchemeOptions opts = run_scheme(c);
  const Field disk = disk_indicator(g, c.init.radius);
  const double s_disk = fourier_decay_exponent(disk).exponent;
  if (c.N == 2)
    out.push_back(check("indicator_decay", "indicator of a disk has Fourier decay |xi|^{-3/2}",
                        {{"exponent", s_disk}}, "1.5 +- 0.1", std::abs(s_disk - 1.5) <= 0.1));
  {
    const MollifiedSplit sp = split_kernel(K, 8, 8);
    const Field q = q_plus(disk, disk, kernel_piece(K, sp, "SS"), opts.op);
    const double s_q = fourier_decay_exponent(q).exponent;
    out.push_back(check("gain_smoothing", "Q+ with the smooth kernel gains (N-1)/2 derivatives",
                        {{"exponent_gain", s_q}, {"exponent_indicator", s_disk}, {"gain", s_q - s_disk}}, ">= 0.4",
                        s_q - s_disk >= 0.4));
  }

  // one Duhamel segment over [0, 2]: jump decay, loss history, identity
  const double edge = disk_edge(g, c.init.radius);
  const double window = 1.2 * g.dv;
  const double J0 = radial_jump(disk, edge, window);
  const std::vector<std::size_t> ring = edge_nodes(g, edge, window);
  const Field direct0 = loss_rate(disk, K, LossMode::direct);
  double hist_indep = ring_mean(direct0, ring), hist_prev = hist_indep, hist_indep_int = 0, t_prev = 0;
  double worst_jump = 0, worst_hist = 0, worst_identity = 0;
  Measured jumps;
  SolverState s = init_state(disk, 0.0, K, opts);
  advance(s, 2.0, c.dt, K, opts, Integrator::exponential, [&](const SolverState &st) {
    const double cur = ring_mean(loss_rate(st.f, K, LossMode::direct), ring);
    hist_indep_int += 0.5 * (st.t - t_prev) * (hist_prev + cur);
    hist_prev = cur;
    t_prev = st.t;
    double id = 0;
    for (std::size_t i = 0; i < st.f.size(); ++i)
      id = std::max(id, std::abs(st.f[i] - st.transported[i] - st.smoothpart[i]));
    worst_identity = std::max(worst_identity, id / max_abs(st.f));
    if (std::abs(st.t * 2 - std::round(st.t * 2)) > 1e-9) return;  // report every 0.5
    Field damp(g);
    for (std::size_t i = 0; i < damp.size(); ++i) damp[i] = std::exp(-st.loss_integral[i]);
    const double predicted = edge_value(damp, edge, window);
    const double measured = radial_jump(st.f, edge, window) / J0;
    const double rel = std::abs(measured / predicted - 1.0);
    worst_jump = std::max(worst_jump, rel);
    char label[32];
    std::snprintf(label, sizeof label, "rel_error_t%.1f", st.t);
    jumps.push_back({label, rel});
    const double solver_int = ring_mean(st.loss_integral, ring);
    worst_hist = std::max(worst_hist, std::abs(solver_int / hist_indep_int - 1.0));
  });
  jumps.push_back({"initial_jump", J0});
  jumps.push_back({"edge", edge});
  out.push_back(check("jump_decay", "the edge jump is damped by exp(-int_0^t L f(s, v_edge) ds)", jumps,
                      "relative error <= 0.05 at t = 0.5, 1, 1.5, 2", worst_jump <= 0.05));
  out.push_back(check("loss_history", "the integrated loss rate matches a trapezoid rule on A * f at the edge",
                      {{"rel_diff", worst_hist}}, "<= 0.05", worst_hist <= 0.05));
  out.push_back(check("duhamel_identity", "f = f0 G(0, t) + integral of Q+ G along the segment",
                      {{"max_rel_error", worst_identity}}, "<= 1e-12", worst_identity <= 1e-12));
  {
    const double s_sp = fourier_decay_exponent(s.smoothpart).exponent;
    out.push_back(check("duhamel_smoothing", "the Duhamel gain part is smoother than the datum",
                        {{"exponent_smoothpart", s_sp}, {"exponent_indicator", s_disk}, {"gain", s_sp - s_disk}},
                        ">= 0.4", s_sp - s_disk >= 0.4));
  }
}

// ---------------------------------------------------------------- decomposition

void suite_decomposition(const RunConfig &c, std::vector<Check> &out) {
  const DecomposeSummary rep = decompose(c);
  double h1_lo = std::numeric_limits<double>::infinity(), h1_hi = 0;
  bool nonneg = true;
  for (const Decomposition &d : rep.series) {
    h1_lo = std::min(h1_lo, d.fS_h1);
    h1_hi = std::max(h1_hi, d.fS_h1);
    nonneg = nonneg && d.fS_nonneg;
  }
  const Field f0 = initial_datum(c);
  const double f0_h1 = sobolev_norm(f0, 1.0, 0.0), eq_h1 = sobolev_norm(maxwellian_for(f0), 1.0, 0.0);
  const ExpFit &fit = rep.fR_fit;
  out.push_back(check("remainder_decay", "f = fS + fR with ||fR||_{L1} decaying exponentially",
                      {{"lambda", fit.lambda}, {"r2", fit.r2}, {"mu", rep.plan.mu}, {"depth", double(rep.plan.n)}},
                      "lambda > 0 and R^2 >= 0.95", fit.lambda > 0 && fit.r2 >= 0.95));
  // fS tends to the equilibrium, so its H^1 level is the natural uniform bound
  out.push_back(check("smooth_part_bounded", "fS is bounded in H^1 uniformly in t",
                      {{"min_h1", h1_lo}, {"max_h1", h1_hi}, {"equilibrium_h1", eq_h1}, {"initial_h1", f0_h1}},
                      "max over the window <= 1.05 x H^1 norm of the equilibrium", h1_hi <= 1.05 * eq_h1));
  out.push_back(check("smooth_part_nonneg", "fS >= 0", {{"nonneg", nonneg ? 1.0 : 0.0}}, "exact", nonneg));
  out.push_back(check("mu_condition", "mu exceeds C_stab / (C_stab + K')",
                      {{"mu", rep.plan.mu}, {"mu_bound", rep.plan.mu_bound}, {"warning", rep.warning ? 1.0 : 0.0}},
                      "informational", true));
}

// ---------------------------------------------------------------- equilibrium

void suite_equilibrium(const RunConfig &c, std::vector<Check> &out) {
  const GridSpec g = run_grid(c);
  const CollisionKernel K = run_kernel(c);
  const SchemeOptions opts = run_scheme(c);
  const Field f0 = initial_datum(c);
  const Field M = maxwellian_for(f0);
  const double HM = entropy(M);

  std::vector<Field> held;  // snapshots at t = 2..6 for the lower bound
  Field train;
  Trajectory tr;
  {
    SolverState s = init_state(f0, 0.0, K, opts);
    auto rec = [&](const SolverState &st) {
      tr.t.push_back(st.t);
      double acc = 0;
      for (std::size_t i = 0; i < st.f.size(); ++i) acc += std::abs(st.f[i] - M[i]);
      tr.dist.push_back(acc * g.cell_volume());
      tr.entropy.push_back(entropy(st.f));
      if (std::abs(st.t - std::round(st.t)) < 1e-9) {
        if (std::round(st.t) == 1.0) train = st.f;
        if (std::round(st.t) >= 2.0) held.push_back(st.f);
      }
    };
    rec(s);
    advance(s, 6.0, c.dt, K, opts, Integrator::exponential, rec);
  }

  bool mono = true;
  std::vector<double> ft, fy;
  for (std::size_t i = 1; i < tr.t.size(); ++i) {
    if (tr.t[i - 1] >= 0.5 && tr.dist[i] > tr.dist[i - 1]) mono = false;
    if (tr.t[i] >= 1.0 - 1e-9) {
      ft.push_back(tr.t[i]);
      fy.push_back(tr.dist[i]);
    }
  }
  const DecayModel dm = compare_decay_models(ft, fy);
  out.push_back(check("relaxation_monotone", "||f_t - M||_{L1} decreases", {{"final_distance", tr.dist.back()}},
                      "nonincreasing for t >= 0.5", mono));
  out.push_back(check("relaxation_rate",
                      "||f_t - M||_{L1} = O(t^-inf); the measured decay is exponential, stronger than claimed",
                      {{"lambda", dm.exponential.lambda}, {"r2", dm.exponential.r2},
                       {"power_exponent", dm.power.exponent}, {"power_r2", dm.power.r2}},
                      "exponential fit on [1, 6]: lambda > 0, R^2 >= 0.9",
                      dm.exponential.lambda > 0 && dm.exponential.r2 >= 0.9));

  double gibbs = std::numeric_limits<double>::infinity();
  for (double H : tr.entropy) gibbs = std::min(gibbs, H - HM);
  out.push_back(check("gibbs_minimum", "the Maxwellian minimizes H at fixed mass, momentum and energy",
                      {{"min_H_minus_HM", gibbs}, {"final_H_minus_HM", tr.entropy.back() - HM}}, ">= -1e-8",
                      gibbs >= -1e-8));

  {
    // Gaussian lower bound fitted at t = 1, checked on t = 2..6
    const double T = moments(f0).temperature(c.N);
    const double A0 = 1.5 / (2 * T);
    double K0 = std::numeric_limits<double>::infinity();
    double v[3];
    for (std::size_t i = 0; i < train.size(); ++i) {
      g.coords(i, v);
      double r2 = 0;
      for (int d = 0; d < c.N; ++d) r2 += v[d] * v[d];
      if (r2 > 0.25 * c.R * c.R) continue;
      K0 = std::min(K0, train[i] * std::exp(A0 * r2));
    }
    K0 *= 0.5;
    double margin = std::numeric_limits<double>::infinity();
    for (const Field &f : held) margin = std::min(margin, lower_bound_margin(f, K0, A0, 2.0));
    out.push_back(check("gaussian_lower_bound", "f(t, v) >= K0 exp(-A0 |v|^2) for t >= t0",
                        {{"K0", K0}, {"A0", A0}, {"margin", margin}}, "margin >= 0 on held-out times 2..6",
                        margin >= 0 && K0 > 0));
  }

  if (c.N == 2 || c.N == 3) {
    // constant kernel, raw scheme, against the similarity solution
    RunConfig b = c;
    b.kernel = KernelDescriptor{};
    b.kernel.gamma = 0.0;
    b.kernel.validation = true;
    b.conservative = false;
    b.equilibrium_fix = false;
    const CollisionKernel Kb = run_kernel(b);
    const SchemeOptions ob = run_scheme(b);
    auto error_at = [&](double dt) {
      SolverState s = init_state(bkw_field(g, 0.0), 0.0, Kb, ob);
      advance(s, 1.0, dt, Kb, ob);
      const Field exact = bkw_field(g, 1.0);
      return max_abs(add(s.f, exact, -1.0));
    };
    const double e1 = error_at(0.01), e2 = error_at(0.005);
    out.push_back(check("bkw_oracle", "the scheme reproduces the BKW similarity solution",
                        {{"linf_error", e1}}, "<= 1e-3 at t = 1, dt = 0.01", e1 <= 1e-3));
    out.push_back(check("bkw_time_order", "the BKW error halves when dt halves",
                        {{"linf_error_dt", e1}, {"linf_error_dt_half", e2}, {"ratio", e1 / e2}}, "ratio >= 2",
                        e1 >= 2 * e2));
  }
}

// ---------------------------------------------------------------- appendix

void suite_appendix(const RunConfig &c, std::vector<Check> &out) {
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const GridSpec g = make_grid(c.N, c.N == 2 ? 32 : 16, c.R);
  int young_pass = 0, young_sharp = 0, trans_pass = 0, trans_sharp = 0;
  double young_worst = 0, trans_worst = 0;
  const int cases = 100;
  for (int k = 0; k < cases; ++k) {
    double p, q;
    do {
      p = 1.0 + 3.0 * U(rng);
      q = 1.0 + 3.0 * U(rng);
    } while (1.0 / p + 1.0 / q < 1.0 + 1e-3);
    const double r = 1.0 / (1.0 / p + 1.0 / q - 1.0);
    const double eta = -2.0 + 4.0 * U(rng);
    const Field f = random_smooth(g, rng), h = random_smooth(g, rng);
    const InequalityReport y = weighted_young_check(f, h, p, q, r, eta);
    young_pass += y.pass;
    young_sharp += y.pass_sharp;
    young_worst = std::max(young_worst, y.ratio());
  }
  for (int k = 0; k < cases; ++k) {
    std::vector<int> h(c.N);
    for (int &x : h) x = static_cast<int>(std::floor(-8 + 17 * U(rng)));
    const double p = 1.0 + 3.0 * U(rng);
    const double k1 = -2.0 + 4.0 * U(rng), k2 = -2.0 + 4.0 * U(rng);
    const InequalityReport t = translation_weight_check(random_smooth(g, rng), h, p, k1, k2);
    trans_pass += t.pass;
    trans_sharp += t.pass_sharp;
    trans_worst = std::max(trans_worst, t.ratio());
  }
  out.push_back(check("weighted_young", "||f * g||_{L^r_eta} <= ||f||_{L^p_|eta|} ||g||_{L^q_eta}",
                      {{"passed", double(young_pass)}, {"cases", double(cases)}, {"passed_sharp", double(young_sharp)},
                       {"max_ratio", young_worst}},
                      "all cases within 1e-6 relative slack", young_pass == cases));
  out.push_back(check("translation_weight", "||tau_h f||_{L^p_k} <= <h>^|k| ||f||_{L^p_k}",
                      {{"passed", double(trans_pass)}, {"cases", double(cases)}, {"max_ratio", trans_worst}},
                      "all cases within 1e-6 relative slack", trans_pass == cases));
  out.push_back(check("translation_weight_sharp",
                      "||tau_h f||_{L^p_k} <= c(h)^|k| ||f||_{L^p_k}, c(h) = sup <v + h> / <v> = (|h| + sqrt(|h|^2 + 4)) / 2",
                      {{"passed", double(trans_sharp)}, {"cases", double(cases)}}, "all cases within 1e-6 relative slack",
                      trans_sharp == cases));
}

}  // namespace

VerifyReport cmd_verify(const std::string &suite, const RunConfig &c) {
  VerifyReport rep;
  rep.suite = suite;
  if (suite == "operators") suite_operators(c, rep.checks);
  else if (suite == "conservation") suite_conservation(c, rep.checks);
  else if (suite == "lp") suite_lp(c, rep.checks);
  else if (suite == "smoothing") suite_smoothing(c, rep.checks);
  else if (suite == "decomposition") suite_decomposition(c, rep.checks);
  else if (suite == "equilibrium") suite_equilibrium(c, rep.checks);
  else if (suite == "appendix") suite_appendix(c, rep.checks);
  else throw std::invalid_argument("unknown suite '" + suite + "'");
  return rep;
}

}  // namespace boltzlab
