#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace boltzlab {

using Vec = std::vector<double>;

/// Uniform tensor velocity grid, nodes v_i = -R + i*dv, axis 0 slowest.
struct GridSpec {
  int N = 2;
  int M = 64;
  double R = 8.0;
  double dv = 0.25;
  std::vector<double> nodes;  ///< per-axis coordinates (shared by all axes)
  std::vector<int> wavenumbers;  ///< integer DFT lattice in FFT order

  std::size_t size() const;
  double cell_volume() const;  ///< dv^N
  /// Node coordinates of flat index idx.
  void coords(std::size_t idx, double *v) const;
  void unflatten(std::size_t idx, int *ijk) const;
  std::size_t flatten(const int *ijk) const;
  bool operator==(const GridSpec &o) const { return N == o.N && M == o.M && R == o.R; }
  bool operator!=(const GridSpec &o) const { return !(*this == o); }
};

GridSpec make_grid(int N, int M, double R);

struct Field {
  GridSpec grid;
  Vec values;
  bool nonneg = false;

  Field() = default;
  explicit Field(const GridSpec &g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  Field(const GridSpec &g, Vec v) : grid(g), values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double &operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  /// Throws if any value is non-finite, or negative while nonneg is set.
  void check() const;
};

struct GridMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
void require_same_grid(const Field &a, const Field &b, const char *what);

/// Multilinear interpolation, zero outside [-R, R-dv]^N.
double interpolate(const Field &f, const double *point);
double interpolate(const Field &f, const std::vector<double> &point);

/// Samples fn(v) on every node.
template <class Fn>
Field sample(const GridSpec &g, Fn &&fn) {
  Field out(g);
  std::vector<double> v(g.N);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.coords(i, v.data());
    out.values[i] = fn(v.data());
  }
  return out;
}

using Spectrum = std::vector<std::complex<double>>;

/// Unitary DFT on the periodized grid: sum |f|^2 dv^N == sum |F|^2.
Spectrum dft(const Field &f);
Field inverse_dft(const Spectrum &F, const GridSpec &g);
/// Plain (unnormalized) N-D FFT on an arbitrary box, row-major.
void fft_inplace(std::vector<std::complex<double>> &data, const std::vector<int> &shape, bool inverse);

/// Integer-cell shift: out(i) = f(i - h), zero fill.
Field shift(const Field &f, const std::vector<int> &h);

// Snapshot files: header lines then M^N values, 17 significant digits.
void write_snapshot(std::ostream &os, const Field &f, double time);
Field read_snapshot(std::istream &is, double *time = nullptr);
void write_snapshot_file(const std::string &path, const Field &f, double time);
Field read_snapshot_file(const std::string &path, double *time = nullptr);

}  // namespace boltzlab
