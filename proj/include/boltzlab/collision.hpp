#pragma once

#include "boltzlab/grid.hpp"
#include "boltzlab/kernel.hpp"

#include <array>
#include <vector>

namespace boltzlab {

/// Nodes and positive weights on S^{N-1}.
struct SigmaQuadrature {
  int N = 2;
  std::vector<double> nodes;  ///< count * N, row per node
  std::vector<double> weights;
  std::vector<int> antipode;  ///< index of -sigma_j, or -1

  std::size_t count() const { return weights.size(); }
  const double *node(std::size_t j) const { return nodes.data() + j * N; }
};

/// N = 2: `angles` uniform angles. N = 3: Gauss-Legendre in cos(theta) x `azimuth` uniform angles.
SigmaQuadrature make_sigma_quadrature(int N, int angles = 0, int azimuth = 0);

enum class LossMode { direct, fft };

struct OperatorOptions {
  SigmaQuadrature quad;
  double guard = 1e-15;  ///< values with |f| below this are treated as zero
  LossMode loss_mode = LossMode::fft;
  int threads = 0;  ///< 0: use the global setting
};

OperatorOptions default_options(int N);

std::array<std::vector<double>, 2> post_collision(const std::vector<double> &v, const std::vector<double> &vs,
                                                  const std::vector<double> &sigma);

Field q_plus(const Field &g, const Field &f, const CollisionKernel &K, const OperatorOptions &opts);
/// (A * f)(v) with A(z) = angular_mass * Phi(|z|).
Field loss_rate(const Field &f, const CollisionKernel &K, LossMode mode = LossMode::fft);
Field q_minus(const Field &g, const Field &f, const CollisionKernel &K, const OperatorOptions &opts);
Field q_full(const Field &f, const CollisionKernel &K, const OperatorOptions &opts);
Field iterated_gain(const Field &g, const Field &f, const Field &h, const CollisionKernel &K,
                    const OperatorOptions &opts);

struct CarlemanOptions {
  bool cell_correction = true;  ///< add the lattice-sum correction for the excluded cell
  int correction_directions = 16;
  int threads = 0;
};

/// Gain term through the (v', v'_*) parametrization, N = 2 only.
Field carleman_q_plus(const Field &g, const Field &f, const CollisionKernel &K, const CarlemanOptions &opts = {});

}  // namespace boltzlab
