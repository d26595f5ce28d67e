#pragma once

#include <complex>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dwnls/potential.hpp"

namespace dwnls {

using cplx = std::complex<double>;

/// Uniform periodic grid on [-L, L)^d with n points per axis (n a power of two).
/// Row-major, x1 is the slowest index.
class Grid {
 public:
  Grid(int dim, double half_width, int points_per_axis);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  int points_per_axis() const { return n_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return size_; }
  /// h^d, the rectangle-rule quadrature weight.
  double cell_volume() const;

  double coord(int i) const { return -half_width_ + spacing_ * i; }
  Point point(std::size_t flat) const;
  /// Flat index of the mirror point (-x1, x2) under index reflection i -> (n - i) mod n.
  std::size_t reflect(std::size_t flat) const;
  /// Flat index of the grid point closest to x.
  std::size_t nearest(const Point& x) const;

  /// |k|^2 for every Fourier mode in FFTW storage order, k in (pi/L){-n/2..n/2-1}.
  std::vector<double> wavenumbers_squared() const;

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && n_ == o.n_ && half_width_ == o.half_width_;
  }

 private:
  int dim_;
  double half_width_;
  int n_;
  double spacing_;
  std::size_t size_;
};

/// Complex wavefunction samples over a grid.
struct FieldC {
  FieldC() : grid(1, 1.0, 2) {}
  explicit FieldC(const Grid& g) : grid(g), values(g.size()) {}
  FieldC(const Grid& g, std::vector<cplx> v);

  Grid grid;
  std::vector<cplx> values;

  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }

  bool all_finite() const;
};

FieldC operator+(const FieldC& a, const FieldC& b);
FieldC operator-(const FieldC& a, const FieldC& b);
FieldC operator*(cplx s, const FieldC& a);
/// a += s * b
void axpy(cplx s, const FieldC& b, FieldC& a);

/// Physical and numerical parameters of a run.
struct SimConfig {
  double hbar = 0.1;
  double epsilon = 0.0;
  int sigma = 1;
  int dim = 1;
  /// Rescaled time tau = t / hbar (default): i psi_tau = H0 psi + eps |psi|^{2 sigma} psi.
  bool time_rescaled = true;
  double dt = 1e-3;
  double t_final = 1.0;
  /// Observables every `output_stride` steps; snapshots every `snapshot_stride` (0 = never).
  int output_stride = 100;
  int snapshot_stride = 0;
  std::filesystem::path snapshot_dir;

  /// Throws InvalidParameter unless hbar > 0, sigma >= 1 and dt > 0.
  void validate() const;
};

/// Discrete L2 pairing sum conj(f) g h^d. Conjugate-linear in the first slot.
cplx inner(const FieldC& f, const FieldC& g);
double norm0(const FieldC& f);

/// Forward/backward FFT on one grid. Plans are created once under a global lock and
/// executed with the new-array interface, so an instance is safe to use from the
/// thread that owns it.
class Fft {
 public:
  explicit Fft(const Grid& grid);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  /// Unnormalized forward transform, in place.
  void forward(std::span<cplx> data) const;
  /// Inverse transform including the 1/N normalization, in place.
  void backward(std::span<cplx> data) const;

 private:
  struct Plans;
  std::unique_ptr<Plans> plans_;
  std::size_t size_;
};

/// Per-thread FFT cache keyed on (dim, n).
const Fft& fft_for(const Grid& grid);

/// Discrete H0 = -hbar^2 Laplacian + V with V sampled once.
class Hamiltonian {
 public:
  Hamiltonian(const Potential& V, const Grid& grid, double hbar);

  const Grid& grid() const { return grid_; }
  double hbar() const { return hbar_; }
  double v_min() const { return v_min_; }
  const std::vector<double>& potential_samples() const { return v_; }
  const std::vector<double>& k_squared() const { return k2_; }

  FieldC apply(const FieldC& f) const;
  /// Raw version used by the eigensolver: out = H0 in. Both spans have grid().size() entries.
  void apply(std::span<const cplx> in, std::span<cplx> out) const;
  /// Spectral Laplacian of f.
  FieldC laplacian(const FieldC& f) const;
  /// Re <f, H0 f>.
  double expectation(const FieldC& f) const;

 private:
  Grid grid_;
  double hbar_;
  double v_min_;
  std::vector<double> v_;
  std::vector<double> k2_;
};

FieldC apply_H0(const FieldC& f, const Potential& V, double hbar);

/// Graph norm of H0^{s/2}, s in {0, 1}. Small negative radicands (> -1e-12) are
/// clamped to zero; larger ones raise ConsistencyError.
double norm_Xs(const FieldC& f, const Hamiltonian& H, int s);
double norm_Xs(const FieldC& f, const Potential& V, double hbar, int s);

/// Integral of |f|^p over the grid.
double lp_power(const FieldC& f, double p);

/// Mass of f outside the central box |x_j| < (1 - fraction) L.
double tail_mass(const FieldC& f, double fraction = 0.1);

/// Raw little-endian (re, im) doubles plus a JSON sidecar {n, dim, L, hbar, t}.
void write_snapshot(const FieldC& f, double hbar, double t, const std::filesystem::path& stem);
FieldC read_snapshot(const std::filesystem::path& stem, double* hbar = nullptr, double* t = nullptr);

}  // namespace dwnls
