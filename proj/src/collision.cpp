#include "boltzlab/collision.hpp"

#include "boltzlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace boltzlab {

namespace {
constexpr double pi = std::numbers::pi;

void gauss_legendre(int n, std::vector<double> &x, std::vector<double> &w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // symmetric pair stored exactly antisymmetric
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

// Zero-padded copy with stride M+1 per axis; small values dropped.
struct Padded {
  std::vector<double> data;
  int lo[3] = {0, 0, 0}, hi[3] = {-1, -1, -1};  // inclusive support box
  bool empty = true;
};

Padded pad(const Field &f, double guard) {
  const GridSpec &g = f.grid;
  const int M = g.M, P = M + 1;
  Padded out;
  std::size_t total = 1;
  for (int d = 0; d < g.N; ++d) total *= P;
  out.data.assign(total, 0.0);
  for (int d = 0; d < 3; ++d) {
    out.lo[d] = M;
    out.hi[d] = -1;
  }
  int ijk[3];
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double v = f.values[i];
    if (std::abs(v) < guard || v == 0.0) continue;
    g.unflatten(i, ijk);
    std::size_t pi_ = 0;
    for (int d = 0; d < g.N; ++d) {
      pi_ = pi_ * P + ijk[d];
      out.lo[d] = std::min(out.lo[d], ijk[d]);
      out.hi[d] = std::max(out.hi[d], ijk[d]);
    }
    out.data[pi_] = v;
    out.empty = false;
  }
  return out;
}

struct PairGeometry {
  int n1[3], n2[3];
  int lo[3], hi[3];
  double wf[8], wg[8];
};

// Offsets of v' = a + x1 and v'_* = a + x2 (cell units) and the admissible output box.
template <int N>
bool pair_geometry(const int *k, double rk, const double *sigma, int M, const Padded &pf, const Padded &pg,
                   PairGeometry &pg_out) {
  double frac1[N], frac2[N];
  for (int d = 0; d < N; ++d) {
    const double x1 = -0.5 * k[d] + 0.5 * rk * sigma[d];
    const double x2 = -0.5 * k[d] - 0.5 * rk * sigma[d];
    const double f1 = std::floor(x1), f2 = std::floor(x2);
    pg_out.n1[d] = static_cast<int>(f1);
    pg_out.n2[d] = static_cast<int>(f2);
    frac1[d] = x1 - f1;
    frac2[d] = x2 - f2;
    const int e1 = frac1[d] > 0.0 ? 1 : 0, e2 = frac2[d] > 0.0 ? 1 : 0;
    int lo = std::max(0, k[d]), hi = std::min(M, M + k[d]);
    const int n1 = pg_out.n1[d], n2 = pg_out.n2[d];
    lo = std::max({lo, -n1, -n2, pf.lo[d] - n1 - e1, pg.lo[d] - n2 - e2});
    hi = std::min({hi, M - e1 - n1, M - e2 - n2, pf.hi[d] - n1 + 1, pg.hi[d] - n2 + 1});
    if (lo >= hi) return false;
    pg_out.lo[d] = lo;
    pg_out.hi[d] = hi;
  }
  constexpr int C = 1 << N;
  for (int c = 0; c < C; ++c) {
    double a = 1.0, b = 1.0;
    for (int d = 0; d < N; ++d) {
      const int bit = (c >> (N - 1 - d)) & 1;
      a *= bit ? frac1[d] : 1.0 - frac1[d];
      b *= bit ? frac2[d] : 1.0 - frac2[d];
    }
    pg_out.wf[c] = a;
    pg_out.wg[c] = b;
  }
  return true;
}

template <int N>
void gain_kernel(const Padded &pf, const Padded &pg, const std::vector<double> &weights,
                 const std::vector<int> &sigma_idx, const SigmaQuadrature &quad, int M, double *out,
                 std::size_t row_begin, std::size_t row_end) {
  constexpr int C = 1 << N;
  const int P = M + 1;
  const int stride[3] = {N == 3 ? P * P : P, N == 3 ? P : 1, 1};
  int corner[C];
  for (int c = 0; c < C; ++c) {
    corner[c] = 0;
    for (int d = 0; d < N; ++d) corner[c] += ((c >> (N - 1 - d)) & 1) * stride[d];
  }
  const int S = static_cast<int>(sigma_idx.size());
  const int span = 2 * M - 1;
  std::size_t noff = 1;
  for (int d = 0; d < N; ++d) noff *= span;
  const int rb = static_cast<int>(row_begin), re = static_cast<int>(row_end);
  PairGeometry geo;
  int k[3];
  // offsets k = v - v_* visited in decreasing order, so v_* runs row-major for each output node
  for (std::size_t o = 0; o < noff; ++o) {
    std::size_t rem = o;
    double rk2 = 0.0;
    for (int d = N - 1; d >= 0; --d) {
      k[d] = (M - 1) - static_cast<int>(rem % span);
      rem /= span;
      rk2 += double(k[d]) * k[d];
    }
    if (k[0] <= rb - M || k[0] >= re) continue;  // v_* row outside this block for every output row
    const double rk = std::sqrt(rk2);
    for (int s = 0; s < S; ++s) {
      const double W = weights[o * S + s];
      if (W == 0.0) continue;
      if (!pair_geometry<N>(k, rk, quad.node(sigma_idx[s]), M, pf, pg, geo)) continue;
      const int lo0 = std::max(geo.lo[0], rb), hi0 = std::min(geo.hi[0], re);
      if (lo0 >= hi0) continue;
      const double *fp = pf.data.data();
      const double *gp = pg.data.data();
      const int lo_last = geo.lo[N - 1], hi_last = geo.hi[N - 1];
      auto run_row = [&](int a0, int a1) {
        std::ptrdiff_t fo = 0, go = 0, oo = 0;
        if constexpr (N == 2) {
          fo = std::ptrdiff_t(a0 + geo.n1[0]) * P + geo.n1[1];
          go = std::ptrdiff_t(a0 + geo.n2[0]) * P + geo.n2[1];
          oo = std::ptrdiff_t(a0) * M;
        } else {
          fo = (std::ptrdiff_t(a0 + geo.n1[0]) * P + (a1 + geo.n1[1])) * P + geo.n1[2];
          go = (std::ptrdiff_t(a0 + geo.n2[0]) * P + (a1 + geo.n2[1])) * P + geo.n2[2];
          oo = (std::ptrdiff_t(a0) * M + a1) * M;
        }
        const double *fr[C];
        const double *gr[C];
        for (int c = 0; c < C; ++c) {
          fr[c] = fp + fo + corner[c];
          gr[c] = gp + go + corner[c];
        }
        double *orow = out + oo;
        for (int c = lo_last; c < hi_last; ++c) {
          double fv = 0.0, gv = 0.0;
          for (int q = 0; q < C; ++q) {
            fv += geo.wf[q] * fr[q][c];
            gv += geo.wg[q] * gr[q][c];
          }
          orow[c] += W * fv * gv;
        }
      };
      for (int a0 = lo0; a0 < hi0; ++a0) {
        if constexpr (N == 2) {
          run_row(a0, 0);
        } else {
          for (int a1 = geo.lo[1]; a1 < geo.hi[1]; ++a1) run_row(a0, a1);
        }
      }
    }
  }
}

double angular_mass_cached(const CollisionKernel &K) { return angular_mass(K); }
}  // namespace

SigmaQuadrature make_sigma_quadrature(int N, int angles, int azimuth) {
  SigmaQuadrature q;
  q.N = N;
  if (N == 2) {
    const int n = angles > 0 ? angles : 32;
    if (n < 2) throw std::invalid_argument("sigma quadrature needs at least 2 angles");
    for (int j = 0; j < n; ++j) {
      const double t = 2.0 * pi * j / n;
      q.nodes.push_back(std::cos(t));
      q.nodes.push_back(std::sin(t));
      q.weights.push_back(2.0 * pi / n);
      q.antipode.push_back(n % 2 == 0 ? (j + n / 2) % n : -1);
    }
  } else if (N == 3) {
    const int nt = angles > 0 ? angles : 16, na = azimuth > 0 ? azimuth : 16;
    std::vector<double> x, w;
    gauss_legendre(nt, x, w);
    for (int i = 0; i < nt; ++i) {
      const double st = std::sqrt(std::max(0.0, 1.0 - x[i] * x[i]));
      for (int j = 0; j < na; ++j) {
        const double p = 2.0 * pi * j / na;
        q.nodes.push_back(st * std::cos(p));
        q.nodes.push_back(st * std::sin(p));
        q.nodes.push_back(x[i]);
        q.weights.push_back(w[i] * 2.0 * pi / na);
        q.antipode.push_back(na % 2 == 0 ? (nt - 1 - i) * na + (j + na / 2) % na : -1);
      }
    }
  } else {
    throw std::invalid_argument("sigma quadrature dimension must be 2 or 3");
  }
  return q;
}

OperatorOptions default_options(int N) {
  OperatorOptions o;
  o.quad = make_sigma_quadrature(N);
  return o;
}

std::array<std::vector<double>, 2> post_collision(const std::vector<double> &v, const std::vector<double> &vs,
                                                  const std::vector<double> &sigma) {
  const std::size_t N = v.size();
  if (vs.size() != N || sigma.size() != N) throw std::invalid_argument("post_collision: dimension mismatch");
  double r2 = 0.0, s2 = 0.0;
  for (std::size_t d = 0; d < N; ++d) {
    r2 += (v[d] - vs[d]) * (v[d] - vs[d]);
    s2 += sigma[d] * sigma[d];
  }
  if (std::abs(s2 - 1.0) > 1e-12) throw std::invalid_argument("post_collision: sigma must be a unit vector");
  const double r = std::sqrt(r2);
  std::array<std::vector<double>, 2> out{std::vector<double>(N), std::vector<double>(N)};
  for (std::size_t d = 0; d < N; ++d) {
    const double mid = 0.5 * (v[d] + vs[d]);
    out[0][d] = mid + 0.5 * r * sigma[d];
    out[1][d] = mid - 0.5 * r * sigma[d];
  }
  return out;
}

Field q_plus(const Field &g, const Field &f, const CollisionKernel &K, const OperatorOptions &opts) {
  require_same_grid(g, f, "q_plus");
  const GridSpec &G = f.grid;
  if (K.N != G.N || opts.quad.N != G.N) throw std::invalid_argument("q_plus: kernel/quadrature dimension mismatch");
  if (opts.guard < 0) throw std::invalid_argument("q_plus: guard threshold must be nonnegative");
  Field out(G);
  const Padded pf = pad(f, opts.guard);
  const Padded pg = (&g == &f) ? pf : pad(g, opts.guard);
  if (pf.empty || pg.empty) {
    out.nonneg = true;
    return out;
  }
  const int N = G.N, M = G.M;
  const auto &quad = opts.quad;

  // Q+(f, f) is symmetric under sigma -> -sigma, so antipodal nodes can share one pass.
  bool folded = (&g == &f || g.values == f.values);
  for (int a : quad.antipode) folded = folded && a >= 0;
  std::vector<int> sigma_idx;
  for (std::size_t j = 0; j < quad.count(); ++j)
    if (!folded || static_cast<int>(j) < quad.antipode[j]) sigma_idx.push_back(static_cast<int>(j));
  const int S = static_cast<int>(sigma_idx.size());

  const int span = 2 * M - 1;
  std::size_t noff = 1;
  for (int d = 0; d < N; ++d) noff *= span;
  std::vector<double> weights(noff * S, 0.0);
  const double cell = G.cell_volume();
  parallel_for(
      noff,
      [&](std::size_t b, std::size_t e) {
        int k[3];
        for (std::size_t o = b; o < e; ++o) {
          std::size_t rem = o;
          double rk2 = 0.0;
          for (int d = N - 1; d >= 0; --d) {
            k[d] = (M - 1) - static_cast<int>(rem % span);
            rem /= span;
            rk2 += double(k[d]) * k[d];
          }
          const double rk = std::sqrt(rk2);
          const double phi = K.phi(rk * G.dv);
          if (phi == 0.0) continue;
          for (int s = 0; s < S; ++s) {
            auto cosine = [&](int j) {
              const double *sg = quad.node(j);
              if (rk == 0.0) return sg[0];
              double c = 0.0;
              for (int d = 0; d < N; ++d) c += sg[d] * k[d];
              return std::clamp(c / rk, -1.0, 1.0);
            };
            const int j = sigma_idx[s];
            double w = quad.weights[j] * K.b(cosine(j));
            if (folded) w += quad.weights[quad.antipode[j]] * K.b(cosine(quad.antipode[j]));
            const double W = cell * phi * w;
            if (!std::isfinite(W)) throw std::domain_error("q_plus: collision kernel is not finite on a quadrature node");
            weights[o * S + s] = W;
          }
        }
      },
      opts.threads);

  parallel_for(
      static_cast<std::size_t>(M),
      [&](std::size_t rb, std::size_t re) {
        if (N == 2)
          gain_kernel<2>(pf, pg, weights, sigma_idx, quad, M, out.values.data(), rb, re);
        else
          gain_kernel<3>(pf, pg, weights, sigma_idx, quad, M, out.values.data(), rb, re);
      },
      opts.threads);
  out.nonneg = f.nonneg && g.nonneg;
  return out;
}

Field loss_rate(const Field &f, const CollisionKernel &K, LossMode mode) {
  const GridSpec &G = f.grid;
  if (K.N != G.N) throw std::invalid_argument("loss_rate: kernel dimension mismatch");
  const int N = G.N, M = G.M;
  const double amass = angular_mass_cached(K);
  const double cell = G.cell_volume();
  Field out(G);
  if (mode == LossMode::fft) {
    const int L = 2 * M;
    std::vector<int> shape(N, L);
    std::size_t total = 1;
    for (int d = 0; d < N; ++d) total *= L;
    std::vector<std::complex<double>> kern(total), data(total, 0.0);
    int idx[3];
    for (std::size_t i = 0; i < total; ++i) {
      std::size_t rem = i;
      double r2 = 0.0;
      for (int d = N - 1; d >= 0; --d) {
        idx[d] = static_cast<int>(rem % L);
        rem /= L;
        const int k = idx[d] < M ? idx[d] : idx[d] - L;
        r2 += double(k) * k;
      }
      kern[i] = amass * K.phi(std::sqrt(r2) * G.dv) * cell;
    }
    int ijk[3];
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      G.unflatten(i, ijk);
      std::size_t p = 0;
      for (int d = 0; d < N; ++d) p = p * L + ijk[d];
      data[p] = f.values[i];
    }
    fft_inplace(kern, shape, false);
    fft_inplace(data, shape, false);
    for (std::size_t i = 0; i < total; ++i) data[i] *= kern[i];
    fft_inplace(data, shape, true);
    const double norm = 1.0 / static_cast<double>(total);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      G.unflatten(i, ijk);
      std::size_t p = 0;
      for (int d = 0; d < N; ++d) p = p * L + ijk[d];
      out.values[i] = data[p].real() * norm;
    }
  } else {
    const int span = 2 * M - 1;
    std::size_t noff = 1;
    for (int d = 0; d < N; ++d) noff *= span;
    std::vector<double> A(noff);
    for (std::size_t o = 0; o < noff; ++o) {
      std::size_t rem = o;
      double r2 = 0.0;
      for (int d = N - 1; d >= 0; --d) {
        const int k = static_cast<int>(rem % span) - (M - 1);
        rem /= span;
        r2 += double(k) * k;
      }
      A[o] = amass * K.phi(std::sqrt(r2) * G.dv) * cell;
    }
    parallel_for(G.size(), [&](std::size_t b, std::size_t e) {
      int a[3], c[3];
      for (std::size_t i = b; i < e; ++i) {
        G.unflatten(i, a);
        double acc = 0.0;
        for (std::size_t j = 0; j < f.values.size(); ++j) {
          const double v = f.values[j];
          if (v == 0.0) continue;
          G.unflatten(j, c);
          std::size_t o = 0;
          for (int d = 0; d < N; ++d) o = o * span + (a[d] - c[d] + M - 1);
          acc += A[o] * v;
        }
        out.values[i] = acc;
      }
    });
  }
  return out;
}

Field q_minus(const Field &g, const Field &f, const CollisionKernel &K, const OperatorOptions &opts) {
  require_same_grid(g, f, "q_minus");
  Field L = loss_rate(g, K, opts.loss_mode);
  for (std::size_t i = 0; i < L.values.size(); ++i) L.values[i] *= f.values[i];
  return L;
}

Field q_full(const Field &f, const CollisionKernel &K, const OperatorOptions &opts) {
  Field qp = q_plus(f, f, K, opts);
  const Field qm = q_minus(f, f, K, opts);
  for (std::size_t i = 0; i < qp.values.size(); ++i) qp.values[i] -= qm.values[i];
  qp.nonneg = false;
  return qp;
}

Field iterated_gain(const Field &g, const Field &f, const Field &h, const CollisionKernel &K,
                    const OperatorOptions &opts) {
  require_same_grid(g, h, "iterated_gain");
  const Field inner = q_plus(g, f, K, opts);
  return q_plus(inner, h, K, opts);
}

Field carleman_q_plus(const Field &g, const Field &f, const CollisionKernel &K, const CarlemanOptions &opts) {
  require_same_grid(g, f, "carleman_q_plus");
  const GridSpec &G = f.grid;
  if (G.N != 2 || K.N != 2) throw std::invalid_argument("carleman_q_plus: only N = 2 is supported");
  const double dv = G.dv, R = G.R;
  // Epstein zeta of Z^2 at s = 1/2: 4 zeta(1/2) beta(1/2)
  constexpr double lattice_zeta = -3.900264920001956;
  Field out(G);
  const double lo_box = -R, hi_box = R - dv;

  auto line_range = [&](const double *v, const double *e, double &smin, double &smax) {
    smin = -1e300;
    smax = 1e300;
    for (int d = 0; d < 2; ++d) {
      if (e[d] == 0.0) {
        if (v[d] < lo_box || v[d] > hi_box) smin = 1, smax = 0;
        continue;
      }
      double a = (lo_box - v[d]) / e[d], b = (hi_box - v[d]) / e[d];
      if (a > b) std::swap(a, b);
      smin = std::max(smin, a);
      smax = std::min(smax, b);
    }
  };

  parallel_for(
      G.size(),
      [&](std::size_t b, std::size_t e) {
        double v[2], vp[2], perp[2], vps[2];
        int ia[2], ip[2];
        for (std::size_t i = b; i < e; ++i) {
          G.unflatten(i, ia);
          v[0] = G.nodes[ia[0]];
          v[1] = G.nodes[ia[1]];
          double acc = 0.0;
          for (std::size_t p = 0; p < G.size(); ++p) {
            if (p == i) continue;
            const double fv = f.values[p];
            if (fv == 0.0) continue;
            G.unflatten(p, ip);
            vp[0] = G.nodes[ip[0]];
            vp[1] = G.nodes[ip[1]];
            const double dx = v[0] - vp[0], dy = v[1] - vp[1];
            const double rho2 = dx * dx + dy * dy, rho = std::sqrt(rho2);
            perp[0] = -dy / rho;
            perp[1] = dx / rho;
            double smin, smax;
            line_range(v, perp, smin, smax);
            if (smin > smax) continue;
            const long jmin = static_cast<long>(std::ceil(smin / dv)), jmax = static_cast<long>(std::floor(smax / dv));
            double line = 0.0;
            for (long j = jmin; j <= jmax; ++j) {
              const double s = j * dv;
              vps[0] = v[0] + s * perp[0];
              vps[1] = v[1] + s * perp[1];
              const double gv = interpolate(g, vps);
              if (gv == 0.0) continue;
              const double u2 = rho2 + s * s;
              const double c = 1.0 - 2.0 * rho2 / u2;
              line += K.phi(std::sqrt(u2)) * K.b(c) * gv;
            }
            acc += fv * line * dv * 2.0 / rho;
          }
          acc *= dv * dv;
          if (opts.cell_correction && f.values[i] != 0.0) {
            double h0 = 0.0;
            const int nd = std::max(1, opts.correction_directions);
            for (int q = 0; q < nd; ++q) {
              const double t = pi * q / nd;
              perp[0] = std::cos(t);
              perp[1] = std::sin(t);
              double smin, smax;
              line_range(v, perp, smin, smax);
              if (smin > smax) continue;
              const long jmin = static_cast<long>(std::ceil(smin / dv)), jmax = static_cast<long>(std::floor(smax / dv));
              double line = 0.0;
              for (long j = jmin; j <= jmax; ++j) {
                if (j == 0) continue;
                const double s = j * dv;
                vps[0] = v[0] + s * perp[0];
                vps[1] = v[1] + s * perp[1];
                line += K.phi(std::abs(s)) * K.b(1.0) * interpolate(g, vps);
              }
              h0 += line * dv / nd;
            }
            acc -= lattice_zeta * dv * 2.0 * h0 * f.values[i];
          }
          out.values[i] = acc;
        }
      },
      opts.threads);
  out.nonneg = f.nonneg && g.nonneg;
  return out;
}

}  // namespace boltzlab
