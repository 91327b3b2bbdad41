#include "boltzlab/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>

namespace boltzlab {

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (int d = 0; d < N; ++d) n *= static_cast<std::size_t>(M);
  return n;
}

double GridSpec::cell_volume() const { return std::pow(dv, N); }

void GridSpec::unflatten(std::size_t idx, int *ijk) const {
  for (int d = N - 1; d >= 0; --d) {
    ijk[d] = static_cast<int>(idx % M);
    idx /= M;
  }
}

std::size_t GridSpec::flatten(const int *ijk) const {
  std::size_t idx = 0;
  for (int d = 0; d < N; ++d) idx = idx * M + static_cast<std::size_t>(ijk[d]);
  return idx;
}

void GridSpec::coords(std::size_t idx, double *v) const {
  int ijk[3];
  unflatten(idx, ijk);
  for (int d = 0; d < N; ++d) v[d] = nodes[ijk[d]];
}

GridSpec make_grid(int N, int M, double R) {
  if (N != 2 && N != 3) throw std::invalid_argument("grid dimension must be 2 or 3");
  if (M < 8 || (M & (M - 1)) != 0) throw std::invalid_argument("points per axis must be a power of two >= 8");
  if (!(R > 0) || !std::isfinite(R)) throw std::invalid_argument("half-width must be positive");
  GridSpec g;
  g.N = N;
  g.M = M;
  g.R = R;
  g.dv = 2.0 * R / M;
  g.nodes.resize(M);
  g.wavenumbers.resize(M);
  for (int i = 0; i < M; ++i) {
    g.nodes[i] = -R + i * g.dv;
    g.wavenumbers[i] = i < M / 2 ? i : i - M;
  }
  return g;
}

void Field::check() const {
  if (values.size() != grid.size()) throw std::runtime_error("field size does not match its grid");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw std::runtime_error("non-finite field value at index " + std::to_string(i));
    if (nonneg && values[i] < 0) throw std::runtime_error("negative value in nonnegative field at index " + std::to_string(i));
  }
}

void require_same_grid(const Field &a, const Field &b, const char *what) {
  if (a.grid != b.grid) throw GridMismatch(std::string(what) + ": fields live on different grids");
}

double interpolate(const Field &f, const double *point) {
  const GridSpec &g = f.grid;
  int base[3];
  double frac[3];
  for (int d = 0; d < g.N; ++d) {
    double x = (point[d] + g.R) / g.dv;
    if (!(x >= 0.0) || x > g.M - 1) return 0.0;
    int i = static_cast<int>(std::floor(x));
    if (i >= g.M - 1) {
      i = g.M - 1;
      frac[d] = 0.0;
    } else {
      frac[d] = x - i;
    }
    base[d] = i;
  }
  double acc = 0.0;
  const int corners = 1 << g.N;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    int ijk[3];
    bool skip = false;
    for (int d = 0; d < g.N; ++d) {
      int bit = (c >> (g.N - 1 - d)) & 1;
      w *= bit ? frac[d] : 1.0 - frac[d];
      ijk[d] = base[d] + bit;
      if (ijk[d] >= g.M) skip = true;
    }
    if (skip || w == 0.0) continue;
    acc += w * f.values[g.flatten(ijk)];
  }
  return acc;
}

double interpolate(const Field &f, const std::vector<double> &point) {
  if (static_cast<int>(point.size()) != f.grid.N) throw std::invalid_argument("interpolate: point dimension mismatch");
  return interpolate(f, point.data());
}

namespace {
std::mutex &planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

void fft_inplace(std::vector<std::complex<double>> &data, const std::vector<int> &shape, bool inverse) {
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  if (n != data.size()) throw std::invalid_argument("fft: shape does not match data");
  auto *ptr = reinterpret_cast<fftw_complex *>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), ptr, ptr, inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                         FFTW_ESTIMATE);
  }
  if (!plan) throw std::runtime_error("fftw planning failed");
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

Spectrum dft(const Field &f) {
  const GridSpec &g = f.grid;
  Spectrum F(f.values.begin(), f.values.end());
  fft_inplace(F, std::vector<int>(g.N, g.M), false);
  // sum |F|^2 = M^N sum |f|^2, so scale by sqrt(dv^N / M^N)
  const double scale = std::sqrt(g.cell_volume() / static_cast<double>(g.size()));
  for (auto &c : F) c *= scale;
  return F;
}

Field inverse_dft(const Spectrum &F, const GridSpec &g) {
  if (F.size() != g.size()) throw std::invalid_argument("inverse_dft: spectrum size mismatch");
  Spectrum work = F;
  fft_inplace(work, std::vector<int>(g.N, g.M), true);
  const double scale = 1.0 / std::sqrt(g.cell_volume() * static_cast<double>(g.size()));
  Field out(g);
  for (std::size_t i = 0; i < work.size(); ++i) out.values[i] = work[i].real() * scale;
  return out;
}

Field shift(const Field &f, const std::vector<int> &h) {
  const GridSpec &g = f.grid;
  if (static_cast<int>(h.size()) != g.N) throw std::invalid_argument("shift: dimension mismatch");
  Field out(g);
  out.nonneg = f.nonneg;
  int ijk[3], src[3];
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.unflatten(i, ijk);
    bool inside = true;
    for (int d = 0; d < g.N; ++d) {
      src[d] = ijk[d] - h[d];
      if (src[d] < 0 || src[d] >= g.M) inside = false;
    }
    if (inside) out.values[i] = f.values[g.flatten(src)];
  }
  return out;
}

namespace {
std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace

void write_snapshot(std::ostream &os, const Field &f, double time) {
  const GridSpec &g = f.grid;
  os << "# boltzlab field snapshot\n";
  os << "N " << g.N << "\nM " << g.M << "\nR " << fmt17(g.R) << "\ntime " << fmt17(time) << "\n";
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    os << fmt17(f.values[i]) << ((i + 1) % g.M == 0 ? '\n' : ' ');
  }
}

Field read_snapshot(std::istream &is, double *time) {
  std::string line;
  int N = 0, M = 0;
  double R = 0, t = 0;
  int seen = 0;
  while (seen < 4 && std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key, val;
    ls >> key >> val;
    if (key == "N") N = std::stoi(val);
    else if (key == "M") M = std::stoi(val);
    else if (key == "R") R = std::strtod(val.c_str(), nullptr);
    else if (key == "time") t = std::strtod(val.c_str(), nullptr);
    else throw std::runtime_error("snapshot: unexpected header key '" + key + "'");
    ++seen;
  }
  if (seen < 4) throw std::runtime_error("snapshot: truncated header");
  Field f(make_grid(N, M, R));
  std::string tok;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (!(is >> tok)) throw std::runtime_error("snapshot: expected " + std::to_string(f.values.size()) + " values");
    char *end = nullptr;
    f.values[i] = std::strtod(tok.c_str(), &end);
    if (*end != '\0') throw std::runtime_error("snapshot: bad number '" + tok + "'");
  }
  if (time) *time = t;
  return f;
}

void write_snapshot_file(const std::string &path, const Field &f, double time) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_snapshot(os, f, time);
}

Field read_snapshot_file(const std::string &path, double *time) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_snapshot(is, time);
}

}  // namespace boltzlab
