#pragma once

#include "boltzlab/kernel.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace boltzlab {

/// Config problem; line is 0 when the value came from the environment.
struct ConfigError : std::runtime_error {
  int line = 0;
  std::string key;
  ConfigError(const std::string &msg, int line_, std::string key_ = {});
};

struct InitialDatum {
  std::string kind = "disk";  ///< maxwellian | disk | double-bump | bkw | snapshot
  double radius = 2.0;
  std::vector<double> center;  ///< empty means the origin
  double separation = 4.0;     ///< double-bump: distance between the two centers (axis 0)
  double width = 0.7;          ///< double-bump: standard deviation of each bump
  double temperature = 1.0;    ///< maxwellian
  double time = 0.0;           ///< bkw: similarity time of the initial profile
  std::string file;            ///< snapshot path
};

struct RunConfig {
  int N = 2;
  int M = 64;
  double R = 8.0;
  KernelDescriptor kernel;
  InitialDatum init;
  std::string integrator = "exponential";  ///< exponential | rk4
  double dt = 0.05;
  double t_end = 1.0;
  int stride = 1;
  std::vector<double> snapshots;  ///< times at which fields are written
  bool conservative = true;
  bool equilibrium_fix = true;
  int angles = 0;   ///< sigma nodes (N = 2) or polar nodes (N = 3); 0 = default
  int azimuth = 0;  ///< N = 3 azimuthal nodes; 0 = default
  std::string loss_mode = "fft";
  // decomposition
  double tau = 1.0;
  int depth = 3;
  std::string mu = "auto";  ///< "auto" or a number in (0, 1)
  std::vector<double> report_times;  ///< final times for the fR decay fit; empty = default window
  std::string out = "out";
  std::uint64_t seed = 1;
};

/// Prefix of environment overrides: BOLTZLAB_<KEY>, key upper-cased (e.g. BOLTZLAB_T_END=2).
inline constexpr const char *env_prefix = "BOLTZLAB_";

/// Parses key = value lines. Unknown keys, malformed values and constraint violations raise ConfigError.
RunConfig parse_config(const std::string &text, const std::map<std::string, std::string> &env = {});
/// Every key with its effective value; parse_config(echo_config(c)) reproduces c.
std::string echo_config(const RunConfig &c);
/// BOLTZLAB_* entries of the process environment.
std::map<std::string, std::string> environment_overrides();
/// Names of all accepted keys, in echo order.
std::vector<std::string> config_keys();

}  // namespace boltzlab
