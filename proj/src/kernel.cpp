#include "boltzlab/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace boltzlab {

namespace {
constexpr double pi = std::numbers::pi;

// 8-point Gauss-Legendre on [-1, 1]
constexpr std::array<double, 8> gl8_x = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                         -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                         0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> gl8_w = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                         0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                         0.2223810344533745, 0.1012285362903763};

template <class F>
double gl_composite(F &&f, double a, double b, int pieces) {
  double acc = 0.0;
  const double h = (b - a) / pieces;
  for (int p = 0; p < pieces; ++p) {
    const double c = a + (p + 0.5) * h;
    double s = 0.0;
    for (int i = 0; i < 8; ++i) s += gl8_w[i] * f(c + 0.5 * h * gl8_x[i]);
    acc += 0.5 * h * s;
  }
  return acc;
}

// Integral over [a, m] with geometric refinement toward a (toward_left) or m.
template <class F>
double graded(F &&f, double a, double m, bool toward_left) {
  const double len = m - a;
  double acc = 0.0, prev = 0.0;
  int flat = 0;
  for (int j = 0; j < 64; ++j) {
    const double outer = len * std::ldexp(1.0, -j), inner = len * std::ldexp(1.0, -j - 1);
    double lo, hi;
    if (toward_left) {
      lo = a + inner;
      hi = a + outer;
    } else {
      lo = m - outer;
      hi = m - inner;
    }
    const double s = gl_composite(f, lo, hi, j < 6 ? 256 : 8);
    acc += s;
    if (j > 20 && prev > 0 && s >= 0.999 * prev && s > 1e-300) ++flat;
    prev = s;
  }
  if (flat > 8) throw std::domain_error("angular integral diverges at an endpoint: kernel is not cut-off");
  return acc;
}

std::vector<double> breakpoints(const AngularPart &b) {
  switch (b.family) {
    case AngularPart::Family::band:
      return {b.theta_b, pi - b.theta_b};
    case AngularPart::Family::remainder:
    case AngularPart::Family::folded: {
      auto v = breakpoints(*b.base);
      if (b.family == AngularPart::Family::folded) {
        std::vector<double> w;
        for (double t : v) {
          w.push_back(t);
          w.push_back(pi - t);
        }
        w.push_back(pi / 2);
        return w;
      }
      return v;
    }
    default:
      return {};
  }
}

double sphere_area(int dim_minus_one) {
  // |S^{k}| for k = 0, 1, 2
  switch (dim_minus_one) {
    case 0: return 2.0;
    case 1: return 2.0 * pi;
    case 2: return 4.0 * pi;
  }
  throw std::invalid_argument("unsupported sphere dimension");
}

std::shared_ptr<const UniformTable> make_bump() {
  auto t = std::make_shared<UniformTable>();
  const int n = 4096;
  t->x0 = -1.0;
  t->x1 = 1.0;
  t->y.resize(n);
  const double h = 2.0 / (n - 1);
  double mass = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -1.0 + i * h;
    t->y[i] = (std::abs(x) < 1.0) ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
    mass += t->y[i] * h;
  }
  for (double &v : t->y) v /= mass;
  return t;
}

std::shared_ptr<const UniformTable> make_radial_bump(int N) {
  auto t = std::make_shared<UniformTable>();
  const int n = 4096;
  t->x0 = 0.0;
  t->x1 = 1.0;
  t->y.resize(n);
  const double h = 1.0 / (n - 1);
  double mass = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = i * h;
    t->y[i] = r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0;
    mass += t->y[i] * std::pow(r, N - 1) * h;
  }
  mass *= sphere_area(N - 1);
  for (double &v : t->y) v /= mass;
  return t;
}

// Gauss-Legendre nodes/weights on [0, 1] by Newton iteration.
void gauss_legendre01(int n, std::vector<double> &x, std::vector<double> &w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[n - 1 - i] = 0.5 * (z + 1.0);
    w[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
}
}  // namespace

double UniformTable::operator()(double x) const {
  if (!(x >= x0) || x > x1 || y.empty()) return 0.0;
  const double h = (x1 - x0) / (y.size() - 1);
  double t = (x - x0) / h;
  std::size_t i = static_cast<std::size_t>(t);
  if (i >= y.size() - 1) return y.back();
  t -= static_cast<double>(i);
  return (1.0 - t) * y[i] + t * y[i + 1];
}

double KineticPart::base_value(double r) const {
  double v = gamma == 0.0 ? 1.0 : (gamma == 1.0 ? r : std::pow(r, gamma));
  if (base == Family::capped || family == Family::capped) v = std::min(v, 1.0);
  return scale * v;
}

double KineticPart::operator()(double r) const {
  switch (family) {
    case Family::power:
    case Family::capped:
      return base_value(r);
    case Family::mollified:
      return (*smooth)(r);
    case Family::remainder:
      return base_value(r) - (*smooth)(r);
  }
  return 0.0;
}

std::string KineticPart::name() const {
  std::ostringstream os;
  const char *bn = base == Family::capped ? "capped" : "power";
  switch (family) {
    case Family::power: os << "power(gamma=" << gamma << ",scale=" << scale << ")"; break;
    case Family::capped: os << "capped(gamma=" << gamma << ",scale=" << scale << ")"; break;
    case Family::mollified: os << "smooth_n" << n << "[" << bn << " gamma=" << gamma << "]"; break;
    case Family::remainder: os << "remainder_n" << n << "[" << bn << " gamma=" << gamma << "]"; break;
  }
  return os.str();
}

double AngularPart::operator()(double c) const {
  switch (family) {
    case Family::constant:
      return cb;
    case Family::band: {
      const double t = std::acos(std::clamp(c, -1.0, 1.0));
      return (t >= theta_b && t <= pi - theta_b) ? cb : 0.0;
    }
    case Family::power: {
      const double s = std::sqrt(std::max(0.0, 0.5 * (1.0 - c)));
      return cb * std::pow(s, -alpha);
    }
    case Family::table:
    case Family::mollified:
      return (*table)(c);
    case Family::remainder:
      return (*base)(c) - (*table)(c);
    case Family::folded:
      return c >= 0.0 ? (*base)(c) + (*base)(-c) : 0.0;
  }
  return 0.0;
}

std::string AngularPart::name() const {
  std::ostringstream os;
  switch (family) {
    case Family::constant: os << "constant(cb=" << cb << ")"; break;
    case Family::band: os << "band(cb=" << cb << ",theta_b=" << theta_b << ")"; break;
    case Family::power: os << "power(cb=" << cb << ",alpha=" << alpha << ")"; break;
    case Family::table: os << "table(" << (table ? table->y.size() : 0) << ")"; break;
    case Family::mollified: os << "smooth_m" << m; break;
    case Family::remainder: os << "remainder_m" << m << "[" << base->name() << "]"; break;
    case Family::folded: os << "folded[" << base->name() << "]"; break;
  }
  return os.str();
}

std::string CollisionKernel::describe() const {
  std::ostringstream os;
  os << "N=" << N << " phi=" << phi.name() << " b=" << b.name();
  return os.str();
}

double eval_B(const CollisionKernel &K, double r, double c) { return K.phi(r) * K.b(c); }

double angular_integral(const AngularPart &b, int N, double lo, double hi) {
  if (hi <= lo) return 0.0;
  auto f = [&](double t) { return b(std::cos(t)) * (N == 3 ? std::sin(t) : 1.0); };
  std::vector<double> cuts{lo};
  for (double t : breakpoints(b))
    if (t > lo && t < hi) cuts.push_back(t);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], c = cuts[i + 1];
    if (c <= a) continue;
    const bool left_singular = (a == 0.0), right_singular = (c == pi);
    const double mid = 0.5 * (a + c);
    acc += left_singular ? graded(f, a, mid, true) : gl_composite(f, a, mid, 512);
    acc += right_singular ? graded(f, mid, c, false) : gl_composite(f, mid, c, 512);
  }
  return acc;
}

double angular_mass(const CollisionKernel &K) { return sphere_area(K.N - 2) * angular_integral(K.b, K.N, 0.0, pi); }

CollisionKernel normalize_angular(CollisionKernel K) {
  const double m = angular_mass(K);
  if (!(m > 0)) throw std::domain_error("angular part has zero mass");
  switch (K.b.family) {
    case AngularPart::Family::constant:
    case AngularPart::Family::band:
    case AngularPart::Family::power:
      K.b.cb /= m;
      break;
    default:
      throw std::invalid_argument("normalize_angular: only parametric angular families can be rescaled");
  }
  return make_kernel(K.N, K.phi, K.b, K.validation);
}

TailFit angular_tail_rate(const CollisionKernel &K, const std::vector<double> &eps) {
  if (eps.size() < 4) throw std::invalid_argument("angular_tail_rate: need at least 4 eps values");
  TailFit fit;
  std::vector<double> lx, ly;
  for (double e : eps) {
    if (!(e > 0 && e < 0.3)) throw std::invalid_argument("angular_tail_rate: eps must lie in (0, 0.3)");
    const double d = std::abs(angular_integral(K.b, K.N, 0.0, e) + angular_integral(K.b, K.N, pi - e, pi));
    fit.defects.push_back(d);
    if (d > 1e-300) {
      lx.push_back(std::log(e));
      ly.push_back(std::log(d));
    }
  }
  if (lx.size() < 2) {
    fit.delta = std::numeric_limits<double>::infinity();
    fit.C_b = 0.0;
    fit.r2 = 1.0;
    return fit;
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  fit.delta = sxy / sxx;
  fit.C_b = std::exp(my - fit.delta * mx);
  fit.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

double holder_constant(const CollisionKernel &K, const std::vector<std::pair<double, double>> &pairs) {
  const double g = K.gamma();
  if (!(g > 0)) throw std::invalid_argument("holder_constant: gamma must be positive");
  double best = 0.0;
  for (auto [r, s] : pairs) {
    if (r == s) continue;
    const double q = std::abs(K.phi(r) - K.phi(s)) / std::pow(std::abs(r - s), g);
    best = std::max(best, q);
  }
  return best;
}

std::vector<std::pair<double, double>> holder_samples(double rmax, int count) {
  std::vector<double> pts{0.0};
  const int half = std::max(2, count / 2);
  for (int i = 0; i < half; ++i) pts.push_back(rmax * std::pow(1e-8, 1.0 - double(i) / (half - 1)));
  for (int i = 1; i <= half; ++i) pts.push_back(rmax * i / half);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) out.emplace_back(pts[i], pts[j]);
  return out;
}

CollisionKernel make_kernel(int N, const KineticPart &phi, const AngularPart &b, bool validation) {
  if (N != 2 && N != 3) throw std::invalid_argument("kernel dimension must be 2 or 3");
  if (!(phi.gamma >= 0.0 && phi.gamma < 2.0)) throw std::invalid_argument("gamma must lie in [0, 2)");
  if (phi.gamma == 0.0 && !validation) throw std::invalid_argument("gamma = 0 is only allowed in validation mode");
  CollisionKernel K;
  K.N = N;
  K.phi = phi;
  K.b = b;
  K.validation = validation;
  using KF = KineticPart::Family;
  using AF = AngularPart::Family;
  const bool plain_phi = phi.family == KF::power || phi.family == KF::capped;
  if (plain_phi && phi.gamma > 0 && phi.gamma <= 1) K.C_phi = phi.scale;
  if (b.family == AF::band) K.theta_b = b.theta_b;
  if (b.family == AF::constant) K.b0 = b.cb;
  try {
    if (phi.family == KF::power) {
      K.K_phi = phi.scale;
      K.K_B = angular_mass(K) * K.K_phi;
    }
    if (b.family == AF::constant || b.family == AF::band || b.family == AF::power) {
      auto fit = angular_tail_rate(K, {0.01, 0.02, 0.05, 0.1, 0.2});
      K.C_b = fit.C_b;
      K.delta_ang = fit.delta;
    }
  } catch (const std::domain_error &) {
    // non-cut-off angular part: constants stay undefined, angular_mass reports it
  }
  return K;
}

CollisionKernel hard_sphere(int N) {
  KineticPart phi;
  AngularPart b;
  b.cb = 1.0 / sphere_area(N - 1);
  return make_kernel(N, phi, b);
}

CollisionKernel constant_kernel(int N) {
  KineticPart phi;
  phi.gamma = 0.0;
  AngularPart b;
  b.cb = 1.0 / sphere_area(N - 1);
  return make_kernel(N, phi, b, true);
}

MollifiedSplit split_kernel(const CollisionKernel &K, int m, int n) {
  if (m < 4 || n < 4) throw std::invalid_argument("split_kernel: m and n must be >= 4 to separate supports");
  using KF = KineticPart::Family;
  if (K.phi.family != KF::power && K.phi.family != KF::capped)
    throw std::invalid_argument("split_kernel: kinetic part is already split");
  const int N = K.N;
  MollifiedSplit s;
  s.m = m;
  s.n = n;
  s.bump = make_bump();
  s.radial_bump = make_radial_bump(N);

  // angular: b_S = Theta_m * (b 1_{|x| <= 1 - 2/m}), support [-1 + 1/m, 1 - 1/m]
  {
    const auto &bump = *s.bump;
    const std::size_t nb = bump.y.size();
    const double hb = (bump.x1 - bump.x0) / (nb - 1);
    double wsum = 0.0;
    for (double y : bump.y) wsum += y * hb;
    const double cut = 1.0 - 2.0 / m;
    auto t = std::make_shared<UniformTable>();
    t->x0 = -1.0 + 1.0 / m;
    t->x1 = 1.0 - 1.0 / m;
    const int nt = 2048;
    t->y.resize(nt);
    const double ht = (t->x1 - t->x0) / (nt - 1);
    for (int i = 0; i < nt; ++i) {
      const double x = t->x0 + i * ht;
      double acc = 0.0;
      for (std::size_t j = 0; j < nb; ++j) {
        if (bump.y[j] == 0.0) continue;
        const double y = x - (bump.x0 + j * hb) / m;
        if (std::abs(y) <= cut) acc += bump.y[j] * hb * K.b(y);
      }
      t->y[i] = acc / wsum;
    }
    s.b_smooth.family = AngularPart::Family::mollified;
    s.b_smooth.m = m;
    s.b_smooth.table = t;
    s.b_rem.family = AngularPart::Family::remainder;
    s.b_rem.m = m;
    s.b_rem.table = t;
    s.b_rem.base = std::make_shared<AngularPart>(K.b);
  }

  // kinetic: Phi_S = radial mollifier * (Phi 1_{2/n <= |x| <= n}), support [1/n, n + 1/n]
  {
    std::vector<double> rho, wrho;
    gauss_legendre01(32, rho, wrho);
    const int nang = N == 2 ? 64 : 32;
    std::vector<double> ang, wang;
    if (N == 2) {
      for (int i = 0; i < nang; ++i) {
        ang.push_back(std::cos(pi * (i + 0.5) / nang));
        wang.push_back(pi / nang);
      }
    } else {
      std::vector<double> x, w;
      gauss_legendre01(nang, x, w);
      for (int i = 0; i < nang; ++i) {
        ang.push_back(2.0 * x[i] - 1.0);  // cos of polar angle
        wang.push_back(2.0 * w[i]);
      }
    }
    std::vector<double> wr(rho.size());
    double total = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      wr[i] = wrho[i] * std::pow(rho[i], N - 1) * (*s.radial_bump)(rho[i]);
      for (double wa : wang) total += wr[i] * wa;
    }
    const double lo = 2.0 / n, hi = n;
    KineticPart base = K.phi;
    auto t = std::make_shared<UniformTable>();
    t->x0 = 1.0 / n;
    t->x1 = n + 1.0 / n;
    const int nt = 4096;
    t->y.resize(nt);
    const double ht = (t->x1 - t->x0) / (nt - 1);
    for (int k = 0; k < nt; ++k) {
      const double r = t->x0 + k * ht;
      double acc = 0.0;
      for (std::size_t i = 0; i < rho.size(); ++i) {
        const double u = rho[i] / n;
        double inner = 0.0;
        for (std::size_t a = 0; a < ang.size(); ++a) {
          const double d = std::sqrt(std::max(0.0, r * r + u * u - 2.0 * r * u * ang[a]));
          if (d >= lo && d <= hi) inner += wang[a] * base.base_value(d);
        }
        acc += wr[i] * inner;
      }
      t->y[k] = acc / total;
    }
    t->y.front() = 0.0;
    t->y.back() = 0.0;
    s.phi_smooth = K.phi;
    s.phi_smooth.base = K.phi.family;
    s.phi_smooth.family = KF::mollified;
    s.phi_smooth.n = n;
    s.phi_smooth.smooth = t;
    s.phi_rem = s.phi_smooth;
    s.phi_rem.family = KF::remainder;
  }
  return s;
}

CollisionKernel kernel_piece(const CollisionKernel &K, const MollifiedSplit &s, const std::string &piece) {
  if (piece.size() != 2 || (piece[0] != 'S' && piece[0] != 'R') || (piece[1] != 'S' && piece[1] != 'R'))
    throw std::invalid_argument("kernel piece must be one of SS, RS, SR, RR");
  CollisionKernel out = K;
  out.phi = piece[0] == 'S' ? s.phi_smooth : s.phi_rem;
  out.b = piece[1] == 'S' ? s.b_smooth : s.b_rem;
  out.C_phi = out.K_phi = out.K_B = out.C_b = out.delta_ang = out.theta_b = out.b0 = CollisionKernel::nan;
  return out;
}

CollisionKernel fold(const CollisionKernel &K) {
  CollisionKernel out = K;
  out.b = AngularPart{};
  out.b.family = AngularPart::Family::folded;
  out.b.base = std::make_shared<AngularPart>(K.b);
  out.theta_b = CollisionKernel::nan;
  out.b0 = CollisionKernel::nan;
  return out;
}

double gain_exponent(double p, int N, ExponentRule which) {
  if (!(p > 1.0)) throw std::invalid_argument("gain_exponent: p must exceed 1");
  if (N != 2 && N != 3) throw std::invalid_argument("gain_exponent: N must be 2 or 3");
  const double n = N;
  if (which == ExponentRule::corollary) {
    if (p <= 2.0) return p * n / (2.0 * n - 1.0 + p * (1.0 - n));  // cleared of 1/n so integer cases are exact
    return p * n;
  }
  if (p <= 2.0 * n) return (2.0 * n - 1.0) * p / (n + (n - 1.0) * p);
  return p / n;
}

CollisionKernel build_kernel(int N, const KernelDescriptor &d) {
  KineticPart phi;
  if (d.phi == "power") phi.family = KineticPart::Family::power;
  else if (d.phi == "capped") phi.family = KineticPart::Family::capped;
  else throw std::invalid_argument("unknown kinetic family '" + d.phi + "' (expected power or capped)");
  phi.base = phi.family;
  phi.gamma = d.gamma;
  phi.scale = d.phi_scale;
  if (!(d.phi_scale > 0)) throw std::invalid_argument("kinetic scale must be positive");
  AngularPart b;
  if (d.angular == "constant") b.family = AngularPart::Family::constant;
  else if (d.angular == "band") {
    b.family = AngularPart::Family::band;
    if (!(d.theta_b > 0 && d.theta_b < pi / 2)) throw std::invalid_argument("band angular part needs theta_b in (0, pi/2)");
    b.theta_b = d.theta_b;
  } else if (d.angular == "power") {
    b.family = AngularPart::Family::power;
    if (!(d.alpha > 0)) throw std::invalid_argument("power angular part needs alpha > 0");
    b.alpha = d.alpha;
  } else
    throw std::invalid_argument("unknown angular family '" + d.angular + "' (expected constant, band or power)");
  b.cb = 1.0;
  if (d.normalization == "value") {
    if (!(d.cb > 0)) throw std::invalid_argument("angular value normalization needs cb > 0");
    b.cb = d.cb;
  } else if (d.normalization != "unit")
    throw std::invalid_argument("unknown angular normalization '" + d.normalization + "' (expected unit or value)");
  CollisionKernel K = make_kernel(N, phi, b, d.validation);
  if (d.normalization == "unit") K = normalize_angular(K);
  if (d.piece != "full") {
    if (d.split_m <= 0 || d.split_n <= 0) throw std::invalid_argument("a split piece needs split_m and split_n");
    K = kernel_piece(K, split_kernel(K, d.split_m, d.split_n), d.piece);
  }
  if (d.fold) K = fold(K);
  return K;
}

}  // namespace boltzlab
