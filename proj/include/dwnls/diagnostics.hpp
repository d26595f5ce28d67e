#pragma once

#include <optional>
#include <vector>

#include "dwnls/eigensolver.hpp"
#include "dwnls/nls.hpp"
#include "dwnls/twomode.hpp"

namespace dwnls {

/// Decomposition of psi against the doublet span(phi1, phi2).
struct ProjectionData {
  cplx zeta1{};
  cplx zeta2{};
  FieldC pic_field;        // psi - zeta1 phi1 - zeta2 phi2
  double mu = 0.0;         // ||Pi_c psi||_1
  double pic_norm0 = 0.0;  // ||Pi_c psi||_0
  double pop_R = 0.0;
  double pop_L = 0.0;
  double h0_gap = 0.0;     // mu^2 - Omega ||Pi_c psi||_0^2
};

/// mu is evaluated on the subtracted field, never as a difference of energies.
ProjectionData project(const FieldC& psi, const SpectralData& S);

struct SandwichReport {
  double upper_margin = 0.0;  // mu^2 - h0_gap
  double lower_margin = 0.0;  // h0_gap - g mu^2 / lambda_top
  double relative_gap = 0.0;  // g = min_{k>=3} (lambda_k - Omega) / lambda_k
  double lambda_top = 0.0;
  bool upper_ok = false;
  bool lower_ok = false;
  /// h0_gap < hbar^3, the small-gap regime of the distance estimate. Informational.
  bool in_small_gap_regime = false;

  bool ok() const { return upper_ok && lower_ok; }
};

/// Requires at least three eigenpairs in S.
SandwichReport h0_sandwich_check(const ProjectionData& pd, const SpectralData& S, double hbar);

struct TheoremReport {
  double mu_max = 0.0;
  double mu0 = 0.0;
  std::optional<double> amplification;  // mu_max / |eps|^{1/2}, absent at eps = 0
  bool initial_hypothesis_ok = false;   // mu(0) <= c0 |eps|^{1/2}
  double first_half_max = 0.0;
  double second_half_max = 0.0;
  /// second_half_max <= 1.2 first_half_max
  bool no_secular_growth = false;
  /// ||psi||_1 <= sqrt(2 Omega) + margin along the run (only meaningful for eps > 0).
  bool x1_bound_ok = true;
  std::optional<double> eps_scaling_exponent;
};

TheoremReport theorem1_monitor(const Trajectory& traj, const SimConfig& cfg,
                               const SpectralData& S, double c0 = 1.0);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Fits log mu_max against log |eps| over several runs.
double eps_scaling_exponent(const std::vector<double>& eps, const std::vector<double>& mu_max);

struct CorollaryReport {
  std::vector<double> times;
  std::vector<double> errors;  // || phi^a(t) - Pi psi(t) ||_0
  double e0 = 0.0;
  double slope = 0.0;          // least-squares e ~ slope * t over the window e < 0.1
  std::optional<double> slope_eps_exponent;
};

/// Throws GridMismatch-like InvalidParameter when the output times differ.
CorollaryReport corollary1_monitor(const Trajectory& traj, const TwoModeTrajectory& tm,
                                   const SpectralData& S);

/// log(slope_a / slope_b) / log(eps_a / eps_b).
double slope_eps_exponent(double eps_a, double slope_a, double eps_b, double slope_b);

}  // namespace dwnls
