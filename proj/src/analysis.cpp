#include "boltzlab/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace boltzlab {

double japanese(const double *v, int N) {
  double s = 1.0;
  for (int d = 0; d < N; ++d) s += v[d] * v[d];
  return std::sqrt(s);
}

double lp_norm(const Field &f, double p, double k) {
  const GridSpec &g = f.grid;
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  double v[3];
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      g.coords(i, v);
      m = std::max(m, std::abs(f[i]) * std::pow(japanese(v, g.N), k));
    }
    return m;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0.0) continue;
    g.coords(i, v);
    const double w = k == 0.0 ? 1.0 : std::pow(japanese(v, g.N), p * k);
    acc += std::pow(std::abs(f[i]), p) * w;
  }
  return std::pow(acc * g.cell_volume(), 1.0 / p);
}

double sobolev_norm(const Field &f, double s, double eta) {
  if (!(s >= 0.0)) throw std::invalid_argument("sobolev_norm: s must be >= 0");
  const GridSpec &g = f.grid;
  Field w = f;
  double v[3];
  if (eta != 0.0)
    for (std::size_t i = 0; i < w.size(); ++i) {
      g.coords(i, v);
      w[i] *= std::pow(japanese(v, g.N), eta);
    }
  const Spectrum F = dft(w);
  double acc = 0.0;
  int ijk[3];
  for (std::size_t i = 0; i < F.size(); ++i) {
    g.unflatten(i, ijk);
    double xi2 = 0.0;
    for (int d = 0; d < g.N; ++d) {
      const double xi = std::numbers::pi * g.wavenumbers[ijk[d]] / g.R;
      xi2 += xi * xi;
    }
    acc += std::pow(1.0 + xi2, s) * std::norm(F[i]);
  }
  return std::sqrt(acc);
}

double norm(const Field &f, const NormSpec &spec) {
  if (spec.kind == NormSpec::Kind::lebesgue) return lp_norm(f, spec.p, spec.weight);
  return sobolev_norm(f, spec.s, spec.weight);
}

double entropy(const Field &f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f[i];
    if (x < -1e-12) throw std::domain_error("entropy: field has negative values below -1e-12");
    if (x > 0.0) acc += x * std::log(x);
  }
  return acc * f.grid.cell_volume();
}

std::vector<double> Moments::mean_velocity() const {
  std::vector<double> u(momentum.size());
  for (std::size_t d = 0; d < u.size(); ++d) u[d] = momentum[d] / mass;
  return u;
}

double Moments::temperature(int N) const {
  const auto u = mean_velocity();
  double u2 = 0.0;
  for (double x : u) u2 += x * x;
  return (energy / mass - u2) / N;
}

Moments moments(const Field &f) {
  const GridSpec &g = f.grid;
  Moments m;
  m.momentum.assign(g.N, 0.0);
  double v[3];
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0.0) continue;
    g.coords(i, v);
    m.mass += f[i];
    double v2 = 0.0;
    for (int d = 0; d < g.N; ++d) {
      m.momentum[d] += f[i] * v[d];
      v2 += v[d] * v[d];
    }
    m.energy += f[i] * v2;
  }
  const double c = g.cell_volume();
  m.mass *= c;
  m.energy *= c;
  for (double &x : m.momentum) x *= c;
  return m;
}

Field maxwellian(const GridSpec &g, double rho, const std::vector<double> &u, double T) {
  if (!(T > 0)) throw std::domain_error("maxwellian: temperature must be positive");
  const double c = rho * std::pow(2.0 * std::numbers::pi * T, -0.5 * g.N);
  Field out = sample(g, [&](const double *v) {
    double r2 = 0.0;
    for (int d = 0; d < g.N; ++d) r2 += (v[d] - u[d]) * (v[d] - u[d]);
    return c * std::exp(-0.5 * r2 / T);
  });
  out.nonneg = true;
  return out;
}

Field maxwellian_for(const Field &f) {
  const GridSpec &g = f.grid;
  const Moments target = moments(f);
  if (!(target.mass > 0)) throw std::domain_error("maxwellian_for: mass must be positive");
  const double Tt = target.temperature(g.N);
  if (!(Tt > 0)) throw std::domain_error("maxwellian_for: temperature must be positive");
  const auto ut = target.mean_velocity();
  double rho = target.mass, T = Tt;
  std::vector<double> u = ut;
  Field M = maxwellian(g, rho, u, T);
  // correct the parameters so the discrete moments match
  for (int it = 0; it < 6; ++it) {
    const Moments m = moments(M);
    const auto um = m.mean_velocity();
    const double Tm = m.temperature(g.N);
    rho *= target.mass / m.mass;
    for (int d = 0; d < g.N; ++d) u[d] += ut[d] - um[d];
    T *= Tt / Tm;
    M = maxwellian(g, rho, u, T);
  }
  return M;
}

double lower_bound_margin(const Field &f, double K0, double A0, double q0) {
  if (!(K0 > 0 && A0 > 0 && q0 >= 2)) throw std::invalid_argument("lower_bound_margin: need K0, A0 > 0 and q0 >= 2");
  const GridSpec &g = f.grid;
  double best = std::numeric_limits<double>::infinity();
  double v[3];
  for (std::size_t i = 0; i < f.size(); ++i) {
    g.coords(i, v);
    double r2 = 0.0;
    for (int d = 0; d < g.N; ++d) r2 += v[d] * v[d];
    const double r = std::sqrt(r2);
    if (r > 0.5 * g.R) continue;
    best = std::min(best, f[i] - K0 * std::exp(-A0 * std::pow(r, q0)));
  }
  return best;
}

DecayFit fourier_decay_exponent(const Field &f, double band_lo, double band_hi) {
  const GridSpec &g = f.grid;
  const double xi_nyquist = std::numbers::pi * g.M / (2.0 * g.R);
  if (band_lo < 0) band_lo = 1.0;
  if (band_hi < 0) band_hi = 0.8 * xi_nyquist;
  const Spectrum F = dft(f);
  // unit-width shells in physical wavenumber, starting at band_lo
  const int nshell = static_cast<int>(std::floor(band_hi - band_lo + 1e-9));
  if (nshell < 2) throw std::invalid_argument("fourier_decay_exponent: empty fit band");
  std::vector<double> sum(nshell, 0.0);
  std::vector<int> cnt(nshell, 0);
  int ijk[3];
  for (std::size_t i = 0; i < F.size(); ++i) {
    g.unflatten(i, ijk);
    double k2 = 0.0;
    for (int d = 0; d < g.N; ++d) k2 += double(g.wavenumbers[ijk[d]]) * g.wavenumbers[ijk[d]];
    const double xi = std::numbers::pi * std::sqrt(k2) / g.R;
    if (xi < band_lo) continue;
    const int s = static_cast<int>(std::floor(xi - band_lo));
    if (s >= nshell) continue;
    sum[s] += std::abs(F[i]);
    ++cnt[s];
  }
  std::vector<double> x, y;
  for (int s = 0; s < nshell; ++s) {
    if (cnt[s] == 0) continue;
    const double avg = sum[s] / cnt[s];
    if (!(avg > 0)) continue;
    const double xi = band_lo + s + 0.5;
    x.push_back(0.5 * std::log1p(xi * xi));
    y.push_back(std::log(avg));
  }
  if (x.size() < 2) throw std::invalid_argument("fourier_decay_exponent: empty fit band");
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
  DecayFit fit;
  fit.exponent = -sxy / sxx;
  fit.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  fit.shells = static_cast<int>(x.size());
  return fit;
}

double radial_jump(const Field &f, double edge, double window, const std::vector<double> &center) {
  const GridSpec &g = f.grid;
  std::vector<double> c = center.empty() ? std::vector<double>(g.N, 0.0) : center;
  constexpr int P = 6;
  std::vector<std::array<double, P>> rows;
  std::vector<double> rhs;
  double v[3];
  for (std::size_t i = 0; i < f.size(); ++i) {
    g.coords(i, v);
    double r2 = 0;
    for (int k = 0; k < g.N; ++k) r2 += (v[k] - c[k]) * (v[k] - c[k]);
    const double d = std::sqrt(r2) - edge;
    if (std::abs(d) >= window || d == 0.0) continue;
    const double in = d < 0 ? 1.0 : 0.0;
    rows.push_back({1.0, d, d * d, d * std::log(std::abs(d)), in, in * d});
    rhs.push_back(f[i]);
  }
  if (rows.size() < 2 * P) throw std::invalid_argument("radial_jump: too few nodes near the edge");
  // Householder QR on the tall system
  const std::size_t n = rows.size();
  for (int k = 0; k < P; ++k) {
    double norm2 = 0;
    for (std::size_t i = k; i < n; ++i) norm2 += rows[i][k] * rows[i][k];
    const double alpha = rows[k][k] > 0 ? -std::sqrt(norm2) : std::sqrt(norm2);
    std::vector<double> u(n, 0.0);
    for (std::size_t i = k; i < n; ++i) u[i] = rows[i][k];
    u[k] -= alpha;
    double unorm2 = 0;
    for (std::size_t i = k; i < n; ++i) unorm2 += u[i] * u[i];
    if (unorm2 == 0) continue;
    for (int j = k; j < P; ++j) {
      double dot = 0;
      for (std::size_t i = k; i < n; ++i) dot += u[i] * rows[i][j];
      for (std::size_t i = k; i < n; ++i) rows[i][j] -= 2 * dot / unorm2 * u[i];
    }
    double dot = 0;
    for (std::size_t i = k; i < n; ++i) dot += u[i] * rhs[i];
    for (std::size_t i = k; i < n; ++i) rhs[i] -= 2 * dot / unorm2 * u[i];
  }
  std::array<double, P> x{};
  for (int k = P - 1; k >= 0; --k) {
    double s = rhs[k];
    for (int j = k + 1; j < P; ++j) s -= rows[k][j] * x[j];
    if (rows[k][k] == 0) throw std::invalid_argument("radial_jump: degenerate node set");
    x[k] = s / rows[k][k];
  }
  return x[4];
}

Field convolve(const Field &f, const Field &g) {
  require_same_grid(f, g, "convolve");
  const GridSpec &G = f.grid;
  const GridSpec big = make_grid(G.N, 2 * G.M, 2 * G.R);
  std::vector<int> shape(G.N, big.M);
  std::vector<std::complex<double>> a(big.size(), 0.0), b(big.size(), 0.0);
  int ijk[3];
  for (std::size_t i = 0; i < f.size(); ++i) {
    G.unflatten(i, ijk);
    const std::size_t p = big.flatten(ijk);
    a[p] = f[i];
    b[p] = g[i];
  }
  fft_inplace(a, shape, false);
  fft_inplace(b, shape, false);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  fft_inplace(a, shape, true);
  Field out(big);
  const double scale = G.cell_volume() / static_cast<double>(big.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i].real() * scale;
  return out;
}

InequalityReport weighted_young_check(const Field &f, const Field &g, double p, double q, double r, double eta) {
  if (!(p >= 1 && q >= 1 && r >= 1)) throw std::invalid_argument("weighted_young_check: exponents must be >= 1");
  const auto inv = [](double x) { return std::isinf(x) ? 0.0 : 1.0 / x; };
  if (std::abs(inv(r) + 1.0 - inv(p) - inv(q)) > 1e-12)
    throw std::invalid_argument("weighted_young_check: need 1/r + 1 = 1/p + 1/q");
  InequalityReport rep;
  rep.lhs = lp_norm(convolve(f, g), r, eta);
  rep.rhs = lp_norm(f, p, std::abs(eta)) * lp_norm(g, q, eta);
  rep.rhs_sharp = std::pow(2.0 / std::sqrt(3.0), std::abs(eta)) * rep.rhs;
  rep.pass = rep.lhs <= rep.rhs * (1.0 + 1e-6);
  rep.pass_sharp = rep.lhs <= rep.rhs_sharp * (1.0 + 1e-6);
  return rep;
}

InequalityReport translation_weight_check(const Field &f, const std::vector<int> &h, double p, double k1, double k2) {
  const GridSpec &g = f.grid;
  if (static_cast<int>(h.size()) != g.N) throw std::invalid_argument("translation_weight_check: shift dimension");
  if (!(p >= 1)) throw std::invalid_argument("translation_weight_check: p must be >= 1");
  const double k = k1 + k2;
  double hv2 = 0.0;
  for (int d = 0; d < g.N; ++d) hv2 += (h[d] * g.dv) * (h[d] * g.dv);
  const double hv = std::sqrt(hv2);
  double lhs = 0.0, base = 0.0;
  const bool inf = std::isinf(p);
  int ijk[3], src[3];
  double v[3], w[3];
  for (std::size_t i = 0; i < f.size(); ++i) {
    g.unflatten(i, ijk);
    bool inside = true;
    for (int d = 0; d < g.N; ++d) {
      src[d] = ijk[d] - h[d];
      if (src[d] < 0 || src[d] >= g.M) inside = false;
    }
    if (!inside) continue;
    const double val = std::abs(f[g.flatten(src)]);
    for (int d = 0; d < g.N; ++d) {
      v[d] = g.nodes[ijk[d]];
      w[d] = g.nodes[src[d]];
    }
    const double wl = std::pow(japanese(v, g.N), k), wr = std::pow(japanese(w, g.N), k);
    if (inf) {
      lhs = std::max(lhs, val * wl);
      base = std::max(base, val * wr);
    } else {
      lhs += std::pow(val * wl, p);
      base += std::pow(val * wr, p);
    }
  }
  if (!inf) {
    lhs = std::pow(lhs * g.cell_volume(), 1.0 / p);
    base = std::pow(base * g.cell_volume(), 1.0 / p);
  }
  InequalityReport rep;
  rep.lhs = lhs;
  rep.rhs = std::pow(std::sqrt(1.0 + hv2), std::abs(k)) * base;
  rep.rhs_sharp = std::pow(0.5 * (hv + std::sqrt(hv2 + 4.0)), std::abs(k)) * base;
  rep.pass = rep.lhs <= rep.rhs * (1.0 + 1e-6);
  rep.pass_sharp = rep.lhs <= rep.rhs_sharp * (1.0 + 1e-6);
  return rep;
}

DiagnosticsRow diagnostics(const Field &f, double t, double gamma, const Field *maxwellian) {
  DiagnosticsRow row;
  row.t = t;
  const Moments m = moments(f);
  row.mass = m.mass;
  row.momentum = m.momentum;
  row.energy = m.energy;
  row.entropy = entropy(f);
  row.l2 = lp_norm(f, 2.0, 0.0);
  row.l2_weighted = lp_norm(f, 2.0, gamma / 2.0);
  row.h1 = sobolev_norm(f, 1.0, 0.0);
  row.min_value = *std::min_element(f.values.begin(), f.values.end());
  if (maxwellian) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += std::abs(f[i] - (*maxwellian)[i]);
    row.dist_maxwellian = acc * f.grid.cell_volume();
  }
  return row;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_header(const DiagnosticsRow &row) {
  std::ostringstream os;
  os << "t,mass";
  for (std::size_t d = 0; d < row.momentum.size(); ++d) os << ",momentum_" << d;
  os << ",energy,entropy,l2,l2_weighted,h1,min,dist_maxwellian";
  for (const auto &e : row.extra) os << ',' << e.first;
  return os.str();
}

std::string csv_line(const DiagnosticsRow &row) {
  std::ostringstream os;
  os << format_double(row.t) << ',' << format_double(row.mass);
  for (double x : row.momentum) os << ',' << format_double(x);
  os << ',' << format_double(row.energy) << ',' << format_double(row.entropy) << ',' << format_double(row.l2) << ','
     << format_double(row.l2_weighted) << ',' << format_double(row.h1) << ',' << format_double(row.min_value) << ','
     << format_double(row.dist_maxwellian);
  for (const auto &e : row.extra) os << ',' << format_double(e.second);
  return os.str();
}

void DiagnosticsWriter::write(const DiagnosticsRow &row) {
  if (!header_done_) {
    os_ << csv_header(row) << '\n';
    header_done_ = true;
  }
  os_ << csv_line(row) << '\n';
}

}  // namespace boltzlab
