#pragma once

#include "boltzlab/grid.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace boltzlab {

struct NormSpec {
  enum class Kind { lebesgue, sobolev };
  Kind kind = Kind::lebesgue;
  double p = 2.0;  ///< Lebesgue exponent (infinity allowed)
  double s = 0.0;  ///< Sobolev order
  double weight = 0.0;
};

/// <v> = sqrt(1 + |v|^2)
double japanese(const double *v, int N);

double lp_norm(const Field &f, double p, double k);
/// H^s norm of f <v>^eta through the unitary DFT; wavenumbers xi = pi * index / R.
double sobolev_norm(const Field &f, double s, double eta);
double norm(const Field &f, const NormSpec &spec);
double entropy(const Field &f);

struct Moments {
  double mass = 0;
  std::vector<double> momentum;
  double energy = 0;  ///< integral of |v|^2 f
  std::vector<double> mean_velocity() const;
  double temperature(int N) const;
};
Moments moments(const Field &f);

/// Gaussian with the same discrete mass, mean velocity and temperature as f.
Field maxwellian_for(const Field &f);
/// rho (2 pi T)^{-N/2} exp(-|v - u|^2 / (2T)) sampled on the grid.
Field maxwellian(const GridSpec &g, double rho, const std::vector<double> &u, double T);

double lower_bound_margin(const Field &f, double K0, double A0, double q0);

struct DecayFit {
  double exponent = 0;  ///< larger means smoother
  double r2 = 0;
  int shells = 0;
};
/// Slope of log shell-averaged |F| against log <xi>. Band and unit-width shells are in physical
/// wavenumber; default band [1, 0.8 xi_nyquist].
DecayFit fourier_decay_exponent(const Field &f, double band_lo = -1, double band_hi = -1);

/// Jump of f across the sphere |v - center| = edge (inside minus outside), from one least-squares fit
/// over the nodes within `window` of it: a background a + b d + c d^2 + s d log|d| shared by both
/// sides plus J + k d on the inside, d = |v - center| - edge. Returns J.
double radial_jump(const Field &f, double edge, double window, const std::vector<double> &center = {});

struct InequalityReport {
  double lhs = 0, rhs = 0;
  double rhs_sharp = 0;  ///< right side with the best weight constant
  bool pass = false;
  bool pass_sharp = false;
  double ratio() const { return rhs > 0 ? lhs / rhs : 0.0; }
};

/// Full (zero padded) convolution dv^N sum f(w) g(v - w) on the doubled grid.
Field convolve(const Field &f, const Field &g);

InequalityReport weighted_young_check(const Field &f, const Field &g, double p, double q, double r, double eta);
/// ||tau_h f||_{L^p_k} against <h>^{|k|} ||f||_{L^p_k} with k = k1 + k2, h in cells.
InequalityReport translation_weight_check(const Field &f, const std::vector<int> &h, double p, double k1, double k2);

struct DiagnosticsRow {
  double t = 0;
  double mass = 0;
  std::vector<double> momentum;
  double energy = 0;
  double entropy = 0;
  double l2 = 0;
  double l2_weighted = 0;  ///< L^2_{gamma/2}
  double h1 = 0;
  double min_value = 0;
  double dist_maxwellian = 0;  ///< ||f - M||_{L1}
  std::vector<std::pair<std::string, double>> extra;
};

DiagnosticsRow diagnostics(const Field &f, double t, double gamma, const Field *maxwellian = nullptr);
std::string csv_header(const DiagnosticsRow &row);
std::string csv_line(const DiagnosticsRow &row);

/// Writes the header on the first row only.
class DiagnosticsWriter {
 public:
  explicit DiagnosticsWriter(std::ostream &os) : os_(os) {}
  void write(const DiagnosticsRow &row);

 private:
  std::ostream &os_;
  bool header_done_ = false;
};

std::string format_double(double x);

}  // namespace boltzlab
