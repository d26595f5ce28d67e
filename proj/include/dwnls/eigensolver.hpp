#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dwnls/discretization.hpp"

namespace dwnls {

enum class Parity { even, odd };
std::string to_string(Parity p);

/// Lowest eigenpairs of the discrete H0 plus the derived doublet quantities.
/// Immutable once built; safe to share between threads.
struct SpectralData {
  double hbar = 0.0;
  std::vector<double> eigenvalues;   // ascending
  std::vector<FieldC> eigenvectors;  // orthonormal, real-valued
  std::vector<Parity> parities;
  std::vector<double> residuals;     // ||H0 phi - lambda phi||_0
  double omega_mean = 0.0;           // (lambda1 + lambda2) / 2
  double omega_split = 0.0;          // (lambda2 - lambda1) / 2
  FieldC phi_R;                      // (phi1 + phi2) / sqrt 2, right well
  FieldC phi_L;                      // (phi1 - phi2) / sqrt 2, left well
  std::uint64_t seed = 0;
  std::shared_ptr<const Hamiltonian> hamiltonian;

  const Grid& grid() const { return hamiltonian->grid(); }
};

struct EigenOptions {
  double tol = 1e-10;
  int max_iterations = 4000;
  int check_every = 10;
};

/// Lanczos with full reorthogonalization, run separately on the even and odd
/// sectors of the reflection x1 -> -x1. The even ground state is (lambda1, phi1),
/// the odd ground state (lambda2, phi2); the remaining k - 2 pairs are merged
/// from both sectors. Signs are fixed so that phi1, phi2 are positive at x_+.
SpectralData lowest_eigenpairs(const Potential& V, const Grid& grid, double hbar, int k,
                               double tol = 1e-10, std::uint64_t seed = 1,
                               const EigenOptions& opts = {});

/// f(x) + s f(-x1, x2) over 2, with s = +1 (even) or -1 (odd).
FieldC symmetrize(const FieldC& f, Parity p);

struct LocalizationReport {
  double radius = 0.0;
  double mass_R_plus = 0.0;   // integral of |phi_R|^2 over the ball around x_+
  double mass_R_minus = 0.0;  // ... around x_-
  double mass_L_minus = 0.0;
  double mass_L_plus = 0.0;
  double overlap_sup = 0.0;   // max |phi_R phi_L|
};

LocalizationReport localization_report(const SpectralData& S, const Potential& V, double r);

struct SweepRow {
  double hbar = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double omega = 0.0;
  double Omega = 0.0;
  bool in_fit = true;
  bool failed = false;  // the eigensolve for this hbar raised an error
};

struct SweepTable {
  std::vector<SweepRow> rows;
  double slope = 0.0;      // of log(omega) against 1/hbar, estimates -Gamma
  double intercept = 0.0;
  double r2 = 0.0;
  /// R^2 of the competing power law log(omega) ~ log(hbar).
  double r2_power = 0.0;
  std::vector<std::string> warnings;

  /// The splitting looks exponentially small: R^2 >= 0.99 and the exponential
  /// model fits better than a power law.
  bool exponential_law() const { return r2 >= 0.99 && r2 > r2_power && slope < 0.0; }
  bool partial() const;
};

/// Splitting below this cannot be certified positive in double precision.
inline constexpr double kOmegaFloor = 1e-14;

/// Eigen-solves for every hbar (independent jobs, `threads` workers, 0 = default)
/// and fits log(omega) = slope / hbar + intercept over the points above kOmegaFloor.
SweepTable splitting_sweep(const Potential& V, const Grid& grid, const std::vector<double>& hbars,
                           double tol = 1e-10, std::uint64_t seed = 1, int threads = 0);

/// eta = eps hbar^{-d sigma / 2} / omega.
double effective_eta(double epsilon, double hbar, int sigma, int dim, double omega_split);

enum class CSigmaConvention {
  projected,      // integral of |phi_R|^{2 sigma + 2}
  paper_literal,  // integral of |phi_R|^{4 sigma}
};

/// Coupling constant of the reduced model. Throws ConsistencyError if the phi_R and
/// phi_L values differ by more than 1e-10.
double c_sigma(const SpectralData& S, int sigma,
               CSigmaConvention conv = CSigmaConvention::projected);

/// Worker count: DWNLS_NUM_THREADS if set, else hardware concurrency.
int default_thread_count();

}  // namespace dwnls
