#pragma once

#include "boltzlab/analysis.hpp"
#include "boltzlab/collision.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace boltzlab {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemeOptions {
  OperatorOptions op;
  /// Shift the loss rate by a + b.v + c|v|^2 each step so mass, momentum and energy are kept exactly.
  bool conservative = true;
  /// Add Q+(M,M)/M - L(M) to the loss rate so the discrete Maxwellian is a fixed point.
  bool equilibrium_fix = true;
  double cfl = 0.5;           ///< dt * max L allowed
  double cfl_support = 1e-12;  ///< nodes below this fraction of max f are ignored by the CFL guard
};

SchemeOptions default_scheme(int N);

struct SolverState {
  double t = 0;
  Field f;
  Field loss;           ///< loss rate used by the last step
  Field transported;    ///< f_a * G(a, t)
  Field smoothpart;     ///< integral of Q+ e^{-int L} over the segment
  Field loss_integral;  ///< integral of the loss rate over the segment
  Field eq_defect;      ///< empty when the equilibrium fix is off
  std::vector<double> reference;  ///< conserved moments (mass, momentum, energy)
  long steps = 0;
  double segment_start = 0;
};

/// Fresh state; the Duhamel segment starts at t.
SolverState init_state(const Field &f0, double t, const CollisionKernel &K, const SchemeOptions &opts);
/// Starts a new Duhamel segment at the current time without touching f.
void restart_segment(SolverState &s);

/// f e^{-dt L} + dt phi1(dt L) gain, phi1(x) = (1 - e^{-x}) / x.
Field exponential_update(const Field &f, const Field &L, const Field &gain, double dt);
/// One classical RK4 step of df/dt = rhs(f).
Field rk4_update(const Field &f, double dt, const std::function<Field(const Field &)> &rhs);

void step_exponential(SolverState &s, double dt, const CollisionKernel &K, const SchemeOptions &opts);
void step_rk4(SolverState &s, double dt, const CollisionKernel &K, const SchemeOptions &opts);

enum class Integrator { exponential, rk4 };

struct AdvanceInfo {
  long steps = 0;
  int halvings = 0;
  double min_dt = 0;
};

/// Steps to exactly t_end with nominal dt, halving while dt * max L > cfl.
AdvanceInfo advance(SolverState &s, double t_end, double dt, const CollisionKernel &K, const SchemeOptions &opts,
                    Integrator integ = Integrator::exponential,
                    const std::function<void(const SolverState &)> &on_step = {});

struct DuhamelSplit {
  Field transported, smoothpart, f_end, loss_integral;
};
DuhamelSplit duhamel_split(const Field &fa, double a, double b, double dt, const CollisionKernel &K,
                           const SchemeOptions &opts);

/// t_0 .. t_{n-1} with t_{-1} = tau_p, t_i = t_{i-1} + mu (t - t_{i-1}).
std::vector<double> node_times(double tau_p, double t, int n, double mu);

struct DecompositionPlan {
  double t = 6;
  double tau = 1;
  int n = 3;
  double mu = 0.5;
  std::vector<double> nodes;  ///< t_{-1}, t_0, ..., t_n
  double C_stab = 0;
  double K_prime = 0;
  double mu_bound = 0;  ///< C_stab / (C_stab + K_prime)
  bool mu_ok = true;
};
DecompositionPlan make_plan(double t, double tau, int n, double mu, double C_stab = 0, double K_prime = 0);

struct NodeRecord {
  int index = 0;
  double time = 0;
  double discarded_l1 = 0;  ///< L1 norm of the transported part dropped at this node
  double flow_mass = 0;     ///< mass of the next flow's initial datum
};

struct Decomposition {
  double t = 0;
  Field f, fS, fR;
  std::vector<NodeRecord> nodes;
  double fR_l1 = 0, fS_h1 = 0, f_h1 = 0;
  bool fS_nonneg = true;
};

Decomposition decomposition_tree(const Field &f0, const CollisionKernel &K, const DecompositionPlan &plan,
                                 const SchemeOptions &opts, double dt);
/// Same construction for several final times, sharing one base flow.
std::vector<Decomposition> decomposition_series(const Field &f0, const CollisionKernel &K,
                                                const std::vector<double> &final_times, double tau, int n,
                                                double mu, const SchemeOptions &opts, double dt);

struct StabilityEstimate {
  double C_stab = 0;
  double C_diff = 0;  ///< max of slope / ||f + g||_{L^1_{k+gamma}}
  bool degenerate = false;
  std::vector<double> t, gap, slopes;
};
StabilityEstimate estimate_stability(const Field &f0, const Field &g0, const CollisionKernel &K, double T, double k,
                                     const SchemeOptions &opts, double dt);

struct ExpFit {
  double lambda = 0, C = 0, r2 = 0;
};
struct PowerFit {
  double exponent = 0, C = 0, r2 = 0;
};
ExpFit fit_exponential_decay(const std::vector<double> &t, const std::vector<double> &y);
PowerFit fit_power_decay(const std::vector<double> &t, const std::vector<double> &y);
struct DecayModel {
  ExpFit exponential;
  PowerFit power;
  std::string preferred;  ///< "exponential" or "power"
};
DecayModel compare_decay_models(const std::vector<double> &t, const std::vector<double> &y);

/// Decay rate of ||transported||_{L1} over [0, T].
double estimate_decay_constant(const Field &f0, const CollisionKernel &K, double T, const SchemeOptions &opts,
                               double dt);

struct DiffIneqFit {
  double C_plus = 0, K_minus = 0, theta = 0.5;
  bool feasible = false;
  double max_violation = 0;  ///< relative to the term scale
  double residual = 0;
  /// Level above which the norm must decrease: (C+/K-)^{1/(p theta)}.
  double bound(double p) const;
};
/// Fits d/dt X^p <= C+ X^{p(1-theta)} - K- Y^p on a time series.
DiffIneqFit fit_diffineq(const std::vector<double> &t, const std::vector<double> &X, const std::vector<double> &Y,
                         double p, std::vector<double> theta_grid = {});

}  // namespace boltzlab
