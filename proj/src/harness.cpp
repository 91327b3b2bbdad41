#include "boltzlab/harness.hpp"

#include "boltzlab/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace boltzlab {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

double BKW::K(double t) const { return 1.0 - (1.0 - K0) * std::exp(-rate * t); }

double BKW::value(double r2, double t) const {
  const double k = K(t);
  const double gauss = std::pow(2.0 * std::numbers::pi * k, -0.5 * N) * std::exp(-r2 / (2.0 * k));
  // the bracket vanishes at r = 0 when t = 0, N = 3; keep round-off from going negative
  return std::max(0.0, gauss * (1.0 + (1.0 - k) / k * (r2 / (2.0 * k) - 0.5 * N)));
}

double BKW::fourth_moment(double t) const {
  // E|v|^4 = N(N+2)K^2 and E|v|^6 = N(N+2)(N+4)K^3 under the Gaussian of variance K
  const double k = K(t), n = N;
  const double m4 = n * (n + 2) * k * k, m6 = n * (n + 2) * (n + 4) * k * k * k;
  const double a = 1.0 - (1.0 - k) / k * 0.5 * n, c = (1.0 - k) / (2.0 * k * k);
  return a * m4 + c * m6;
}

double BKW::fourth_moment_rate(double m4) const {
  // relaxes to the Maxwellian value N(N+2) at rate 2 * rate
  return 2.0 * rate * (N * (N + 2.0) - m4);
}

BKW bkw(int N) {
  if (N == 2) return {2, 1.0 / 8.0, 0.5};
  if (N == 3) return {3, 1.0 / 6.0, 0.6};
  throw std::invalid_argument("bkw: dimension must be 2 or 3");
}

Field bkw_field(const GridSpec &g, double t) {
  const BKW b = bkw(g.N);
  Field f = sample(g, [&](const double *v) {
    double r2 = 0;
    for (int d = 0; d < g.N; ++d) r2 += v[d] * v[d];
    return b.value(r2, t);
  });
  f.nonneg = true;
  return f;
}

std::string bkw_table(int N, const std::vector<double> &times) {
  const BKW b = bkw(N);
  std::string out = "t,K,m4,m4_ode,f0\n";
  // classical RK4 on the moment equation, fine fixed step
  double m = b.fourth_moment(0.0), tc = 0.0;
  const double h = 1e-3;
  auto rhs = [&](double x) { return b.fourth_moment_rate(x); };
  for (double t : times) {
    while (tc < t - 1e-15) {
      const double s = std::min(h, t - tc);
      const double k1 = rhs(m), k2 = rhs(m + 0.5 * s * k1), k3 = rhs(m + 0.5 * s * k2), k4 = rhs(m + s * k3);
      m += s / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
      tc += s;
    }
    out += format_double(t) + "," + format_double(b.K(t)) + "," + format_double(b.fourth_moment(t)) + "," +
           format_double(m) + "," + format_double(b.value(0.0, t)) + "\n";
  }
  return out;
}

GridSpec run_grid(const RunConfig &c) { return make_grid(c.N, c.M, c.R); }

CollisionKernel run_kernel(const RunConfig &c) { return build_kernel(c.N, c.kernel); }

SchemeOptions run_scheme(const RunConfig &c) {
  SchemeOptions s = default_scheme(c.N);
  if (c.angles > 0 || c.azimuth > 0) s.op.quad = make_sigma_quadrature(c.N, c.angles, c.azimuth);
  s.op.loss_mode = c.loss_mode == "direct" ? LossMode::direct : LossMode::fft;
  s.conservative = c.conservative;
  s.equilibrium_fix = c.equilibrium_fix;
  return s;
}

Field disk_indicator(const GridSpec &g, double radius, const std::vector<double> &center) {
  std::vector<double> c = center.empty() ? std::vector<double>(g.N, 0.0) : center;
  Field f = sample(g, [&](const double *v) {
    double r2 = 0;
    for (int d = 0; d < g.N; ++d) r2 += (v[d] - c[d]) * (v[d] - c[d]);
    return r2 <= radius * radius ? 1.0 : 0.0;
  });
  const double mass = moments(f).mass;
  if (!(mass > 0)) throw std::invalid_argument("disk indicator contains no grid node");
  for (double &x : f.values) x /= mass;
  f.nonneg = true;
  return f;
}

Field double_bump(const GridSpec &g, double separation, double width) {
  Field f = sample(g, [&](const double *v) {
    double a = 0, b = 0;
    for (int d = 0; d < g.N; ++d) {
      const double off = d == 0 ? 0.5 * separation : 0.0;
      a += (v[d] - off) * (v[d] - off);
      b += (v[d] + off) * (v[d] + off);
    }
    return std::exp(-a / (2 * width * width)) + std::exp(-b / (2 * width * width));
  });
  const double mass = moments(f).mass;
  for (double &x : f.values) x /= mass;
  f.nonneg = true;
  return f;
}

Field initial_datum(const RunConfig &c) {
  const GridSpec g = run_grid(c);
  const InitialDatum &d = c.init;
  if (d.kind == "maxwellian") {
    std::vector<double> u = d.center.empty() ? std::vector<double>(c.N, 0.0) : d.center;
    Field f = maxwellian(g, 1.0, u, d.temperature);
    f.nonneg = true;
    return f;
  }
  if (d.kind == "disk") return disk_indicator(g, d.radius, d.center);
  if (d.kind == "double-bump") return double_bump(g, d.separation, d.width);
  if (d.kind == "bkw") return bkw_field(g, d.time);
  if (d.kind == "snapshot") {
    Field f = read_snapshot_file(d.file);
    if (f.grid != g) throw std::invalid_argument("snapshot grid does not match the configured grid");
    for (double x : f.values)
      if (x < 0) throw std::invalid_argument("snapshot initial datum has negative values");
    f.nonneg = true;
    return f;
  }
  throw std::invalid_argument("unknown initial datum '" + d.kind + "'");
}

namespace {

std::string time_tag(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", t);
  return buf;
}

void write_text(const fs::path &p, const std::string &text) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
}

const Field *admissible_maxwellian(const Field &f, Field &storage) {
  const Moments m = moments(f);
  if (!(m.mass > 0) || !(m.temperature(f.grid.N) > 0)) return nullptr;
  storage = maxwellian_for(f);
  return &storage;
}

}  // namespace

RunSummary cmd_run(const RunConfig &c, const std::string &out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  RunSummary sum;
  write_text(dir / "config.echo", echo_config(c));
  sum.files.push_back("config.echo");

  const CollisionKernel K = run_kernel(c);
  const SchemeOptions opts = run_scheme(c);
  const Field f0 = initial_datum(c);
  Field Mstore;
  const Field *Mref = admissible_maxwellian(f0, Mstore);
  const Integrator integ = c.integrator == "rk4" ? Integrator::rk4 : Integrator::exponential;

  std::ofstream csv(dir / "diagnostics.csv");
  if (!csv) throw std::runtime_error("cannot write diagnostics.csv");
  DiagnosticsWriter writer(csv);
  sum.files.push_back("diagnostics.csv");

  SolverState s = init_state(f0, 0.0, K, opts);
  writer.write(diagnostics(s.f, s.t, K.gamma(), Mref));
  long last_row = 0;

  std::vector<double> stops;
  for (double t : c.snapshots)
    if (t <= c.t_end) stops.push_back(t);
  std::sort(stops.begin(), stops.end());
  stops.push_back(c.t_end);
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  auto on_step = [&](const SolverState &st) {
    if (st.steps % c.stride == 0) {
      writer.write(diagnostics(st.f, st.t, K.gamma(), Mref));
      last_row = st.steps;
    }
  };
  for (double stop : stops) {
    if (stop > s.t) {
      AdvanceInfo info = advance(s, stop, c.dt, K, opts, integ, on_step);
      sum.halvings += info.halvings;
    }
    if (std::find(c.snapshots.begin(), c.snapshots.end(), stop) != c.snapshots.end()) {
      const std::string name = "snapshot_t" + time_tag(stop) + ".txt";
      write_snapshot_file((dir / name).string(), s.f, s.t);
      sum.files.push_back(name);
    }
  }
  if (last_row != s.steps) writer.write(diagnostics(s.f, s.t, K.gamma(), Mref));
  csv.close();
  sum.steps = s.steps;
  sum.t_final = s.t;
  write_snapshot_file((dir / "final.txt").string(), s.f, s.t);
  sum.files.push_back("final.txt");

  if (c.init.kind == "bkw") {
    const Field exact = bkw_field(s.f.grid, c.init.time + s.t);
    Field err(s.f.grid);
    sum.bkw_error = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
      err[i] = s.f[i] - exact[i];
      sum.bkw_error = std::max(sum.bkw_error, std::abs(err[i]));
    }
    write_snapshot_file((dir / "bkw_error.txt").string(), err, s.t);
    sum.files.push_back("bkw_error.txt");
  }

  json j;
  j["steps"] = sum.steps;
  j["dt_halvings"] = sum.halvings;
  j["t_final"] = sum.t_final;
  if (sum.bkw_error >= 0) j["bkw_max_error"] = sum.bkw_error;
  j["files"] = sum.files;
  write_text(dir / "run.json", j.dump(2) + "\n");
  return sum;
}

DecomposeSummary decompose(const RunConfig &c) {
  const CollisionKernel K = run_kernel(c);
  const SchemeOptions opts = run_scheme(c);
  const Field f0 = initial_datum(c);

  std::vector<double> times = c.report_times;
  if (times.empty())  // [2 tau, 6 tau] in eighths
    for (int i = 0; i <= 8; ++i) times.push_back(c.tau * (2.0 + 0.5 * i));
  std::sort(times.begin(), times.end());

  // pilot runs for the rate constants
  Field g0 = f0;
  if (const Moments m = moments(f0); m.mass > 0 && m.temperature(c.N) > 0) {
    const Field M = maxwellian_for(f0);
    for (std::size_t i = 0; i < g0.size(); ++i) g0[i] = 0.99 * f0[i] + 0.01 * M[i];
  } else {
    for (double &x : g0.values) x *= 1.01;
  }
  const double pilot_T = std::min(1.0, times.front());
  const StabilityEstimate st = estimate_stability(f0, g0, K, pilot_T, 0.0, opts, c.dt);
  const double K_prime = estimate_decay_constant(f0, K, pilot_T, opts, c.dt);
  const DecompositionPlan probe = make_plan(times.back(), c.tau, c.depth, 0.5, st.C_stab, K_prime);
  const double mu = c.mu == "auto" ? 0.5 * (1.0 + probe.mu_bound) : std::stod(c.mu);

  DecomposeSummary out;
  out.plan = make_plan(times.back(), c.tau, c.depth, mu, st.C_stab, K_prime);
  out.warning = !out.plan.mu_ok;
  out.series = decomposition_series(f0, K, times, c.tau, c.depth, mu, opts, c.dt);

  std::vector<double> ts, l1;
  for (const auto &d : out.series) {
    ts.push_back(d.t);
    l1.push_back(d.fR_l1);
  }
  bool fit_ok = true;
  try {
    out.fR_fit = fit_exponential_decay(ts, l1);
  } catch (const std::exception &) {
    fit_ok = false;
  }

  json j;
  j["plan"] = {{"t", out.plan.t},
               {"tau", out.plan.tau},
               {"depth", out.plan.n},
               {"mu", out.plan.mu},
               {"mu_source", c.mu == "auto" ? "auto" : "config"},
               {"node_times", out.plan.nodes},
               {"C_stab", out.plan.C_stab},
               {"K_prime", out.plan.K_prime},
               {"mu_bound", out.plan.mu_bound}};
  j["warning"] = out.warning;
  if (out.warning) j["warning_text"] = "mu does not exceed C_stab / (C_stab + K') for the estimated constants";
  json rows = json::array();
  for (const auto &d : out.series) {
    json nodes = json::array();
    for (const auto &r : d.nodes)
      nodes.push_back({{"index", r.index}, {"time", r.time}, {"discarded_l1", r.discarded_l1}, {"flow_mass", r.flow_mass}});
    rows.push_back({{"t", d.t},
                    {"fR_l1", d.fR_l1},
                    {"fS_h1", d.fS_h1},
                    {"f_h1", d.f_h1},
                    {"fS_nonneg", d.fS_nonneg},
                    {"nodes", nodes}});
  }
  j["series"] = rows;
  if (fit_ok)
    j["fR_fit"] = {{"lambda", out.fR_fit.lambda}, {"C", out.fR_fit.C}, {"r2", out.fR_fit.r2}};
  else
    j["fR_fit"] = nullptr;
  out.report = j.dump(2) + "\n";
  return out;
}

DecomposeSummary cmd_decompose(const RunConfig &c, const std::string &out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  DecomposeSummary out = decompose(c);
  const Decomposition &last = out.series.back();
  write_snapshot_file((dir / "fS.txt").string(), last.fS, last.t);
  write_snapshot_file((dir / "fR.txt").string(), last.fR, last.t);
  write_text(dir / "decomposition.json", out.report);
  return out;
}

std::string kernel_info(const RunConfig &c) {
  const CollisionKernel K = run_kernel(c);
  json j;
  j["kernel"] = K.describe();
  j["N"] = K.N;
  j["gamma"] = K.gamma();
  try {
    j["angular_mass"] = angular_mass(K);
  } catch (const std::exception &e) {
    j["angular_mass"] = nullptr;
    j["angular_mass_error"] = e.what();
  }
  if (K.gamma() > 0) {
    const double rmax = 2.0 * c.R * std::sqrt(double(c.N));
    j["holder_estimate"] = holder_constant(K, holder_samples(rmax));
  }
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  j["constants"] = {{"C_phi", num(K.C_phi)},         {"K_phi", num(K.K_phi)}, {"K_B", num(K.K_B)},
                    {"C_b", num(K.C_b)},             {"delta_ang", num(K.delta_ang)},
                    {"theta_b", num(K.theta_b)},     {"b0", num(K.b0)}};
  json ex = json::array();
  for (double p : {1.5, 2.0, 3.0, 4.0, 6.0, 8.0})
    ex.push_back({{"p", p},
                  {"corollary", gain_exponent(p, c.N, ExponentRule::corollary)},
                  {"theorem", gain_exponent(p, c.N, ExponentRule::theorem)}});
  j["gain_exponents"] = ex;
  return j.dump(2) + "\n";
}

}  // namespace boltzlab
