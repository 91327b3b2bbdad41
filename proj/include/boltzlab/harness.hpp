#pragma once

#include "boltzlab/config.hpp"
#include "boltzlab/solver.hpp"

#include <string>
#include <utility>
#include <vector>

namespace boltzlab {

// Bobylev-Krook-Wu similarity solution for the constant kernel with unit angular mass.
struct BKW {
  int N = 2;
  double rate = 0;  ///< K(t) = 1 - (1 - K0) e^{-rate t}
  double K0 = 0;
  double K(double t) const;
  double value(double r2, double t) const;  ///< f at |v|^2 = r2
  double fourth_moment(double t) const;     ///< integral of |v|^4 f
  /// Right side of d m4/dt = rhs(m4) for this kernel.
  double fourth_moment_rate(double m4) const;
};
BKW bkw(int N);
Field bkw_field(const GridSpec &g, double t);
/// Rows t, K, m4 closed form, m4 from integrating the moment ODE, f(0).
std::string bkw_table(int N, const std::vector<double> &times);

GridSpec run_grid(const RunConfig &c);
CollisionKernel run_kernel(const RunConfig &c);
SchemeOptions run_scheme(const RunConfig &c);
Field initial_datum(const RunConfig &c);
/// Indicator of |v - center| <= radius, scaled to unit discrete mass.
Field disk_indicator(const GridSpec &g, double radius, const std::vector<double> &center = {});
/// Two equal Gaussians at +-separation/2 on axis 0, unit discrete mass.
Field double_bump(const GridSpec &g, double separation, double width);

struct RunSummary {
  long steps = 0;
  int halvings = 0;
  double t_final = 0;
  double bkw_error = -1;  ///< max |f - BKW| at the final time; -1 when not a BKW run
  std::vector<std::string> files;
};
/// Integrates the configured problem, writes diagnostics.csv, snapshots and run.json under out_dir.
RunSummary cmd_run(const RunConfig &c, const std::string &out_dir);

struct DecomposeSummary {
  DecompositionPlan plan;
  std::vector<Decomposition> series;
  ExpFit fR_fit;
  bool warning = false;
  std::string report;  ///< JSON text
};
/// Decomposition tree at each report time, no files.
DecomposeSummary decompose(const RunConfig &c);
/// Decomposition tree at each report time, fS/fR snapshots at the last one, decomposition.json.
DecomposeSummary cmd_decompose(const RunConfig &c, const std::string &out_dir);

struct Check {
  std::string name;
  std::string claim;  ///< the statement the check is anchored to
  std::vector<std::pair<std::string, double>> measured;
  std::string tolerance;
  bool pass = false;
};

struct VerifyReport {
  std::string suite;
  std::vector<Check> checks;
  bool pass() const;
  std::string json() const;
  std::string text() const;
};

std::vector<std::string> verify_suites();
/// Midpoint between the outermost node inside |v| <= radius and the innermost one outside.
double disk_edge(const GridSpec &g, double radius);
/// Runs one suite on the configured rig; throws std::invalid_argument on an unknown suite.
VerifyReport cmd_verify(const std::string &suite, const RunConfig &c);

/// Angular mass, Holder estimate, assumption constants and gain exponents as JSON.
std::string kernel_info(const RunConfig &c);

}  // namespace boltzlab
