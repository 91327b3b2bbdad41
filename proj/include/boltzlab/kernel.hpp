#pragma once

#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace boltzlab {

/// Samples on a uniform abscissa, linear in between, zero outside [x0, x1].
struct UniformTable {
  double x0 = 0, x1 = 1;
  std::vector<double> y;
  double operator()(double x) const;
};

/// Kinetic part Phi(|z|).
struct KineticPart {
  enum class Family { power, capped, mollified, remainder };
  Family family = Family::power;
  Family base = Family::power;  ///< underlying power/capped law for the split pieces
  double gamma = 1.0;
  double scale = 1.0;
  int n = 0;  ///< split parameter for mollified/remainder
  std::shared_ptr<const UniformTable> smooth;

  double base_value(double r) const;
  double operator()(double r) const;
  std::string name() const;
};

/// Angular part b(cos theta).
struct AngularPart {
  enum class Family { constant, band, power, table, mollified, remainder, folded };
  Family family = Family::constant;
  double cb = 1.0;
  double theta_b = 0.0;  ///< band: support theta in [theta_b, pi - theta_b]
  double alpha = 0.0;    ///< power: cb * sin(theta/2)^(-alpha)
  int m = 0;
  std::shared_ptr<const UniformTable> table;  ///< table samples, or the smooth piece
  std::shared_ptr<const AngularPart> base;    ///< remainder and folded wrap another part

  double operator()(double c) const;
  std::string name() const;
};

struct CollisionKernel {
  int N = 2;
  KineticPart phi;
  AngularPart b;
  bool validation = false;  ///< allows gamma = 0

  // Assumption constants; NaN when not applicable.
  static constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  double C_phi = nan;
  double K_phi = nan;
  double K_B = nan;
  double C_b = nan;
  double delta_ang = nan;
  double theta_b = nan;
  double b0 = nan;

  double gamma() const { return phi.gamma; }
  std::string describe() const;
};

double eval_B(const CollisionKernel &K, double r, double c);

/// Hard sphere Phi = |z| with constant b of unit angular mass.
CollisionKernel hard_sphere(int N);
/// Phi = 1, unit angular mass. Validation only.
CollisionKernel constant_kernel(int N);
CollisionKernel make_kernel(int N, const KineticPart &phi, const AngularPart &b, bool validation = false);

/// Integral of b(cos t) sin^{N-2} t over t in [lo, hi]; throws on a divergent endpoint.
double angular_integral(const AngularPart &b, int N, double lo, double hi);
/// ||b||_{L1(S^{N-1})} = |S^{N-2}| * integral over [0, pi].
double angular_mass(const CollisionKernel &K);
/// Rescales b so that angular_mass is 1.
CollisionKernel normalize_angular(CollisionKernel K);

struct TailFit {
  double C_b = 0;
  double delta = 0;  ///< +inf when the defect vanishes for every eps
  double r2 = 1;
  std::vector<double> defects;
};
TailFit angular_tail_rate(const CollisionKernel &K, const std::vector<double> &eps);

double holder_constant(const CollisionKernel &K, const std::vector<std::pair<double, double>> &pairs);
/// Default sample pairs on [0, rmax], dense near the origin.
std::vector<std::pair<double, double>> holder_samples(double rmax, int count = 400);

struct MollifiedSplit {
  int m = 0, n = 0;
  KineticPart phi_smooth, phi_rem;
  AngularPart b_smooth, b_rem;
  std::shared_ptr<const UniformTable> bump;         ///< 1-D profile on [-1, 1], unit mass
  std::shared_ptr<const UniformTable> radial_bump;  ///< radial N-D profile on [0, 1], unit mass
};

MollifiedSplit split_kernel(const CollisionKernel &K, int m, int n);
/// One of "SS", "RS", "SR", "RR": first letter picks Phi, second picks b.
CollisionKernel kernel_piece(const CollisionKernel &K, const MollifiedSplit &s, const std::string &piece);

/// b folded onto theta in [0, pi/2]: b(c) + b(-c) for c >= 0, zero otherwise.
CollisionKernel fold(const CollisionKernel &K);

enum class ExponentRule { corollary, theorem };
double gain_exponent(double p, int N, ExponentRule which);

/// Text form of a kernel as used by the run config.
struct KernelDescriptor {
  std::string phi = "power";  ///< power | capped
  double gamma = 1.0;
  double phi_scale = 1.0;
  std::string angular = "constant";  ///< constant | band | power
  std::string normalization = "unit";  ///< unit | value
  double cb = 0.0;  ///< used when normalization = value
  double theta_b = 0.0;
  double alpha = 0.0;
  bool validation = false;
  bool fold = false;
  int split_m = 0, split_n = 0;
  std::string piece = "full";  ///< full | SS | RS | SR | RR
};

CollisionKernel build_kernel(int N, const KernelDescriptor &d);

}  // namespace boltzlab
