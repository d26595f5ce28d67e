#pragma once

#include <optional>
#include <vector>

#include "dwnls/discretization.hpp"

namespace dwnls {

struct TwoModeState {
  cplx c_R{};
  cplx c_L{};

  double norm2() const { return std::norm(c_R) + std::norm(c_L); }
  /// Population imbalance |c_R|^2 - |c_L|^2.
  double imbalance() const { return std::norm(c_R) - std::norm(c_L); }
};

struct TwoModeParams {
  double omega_split = 0.0;  // omega
  double omega_mean = 0.0;   // Omega
  double epsilon = 0.0;
  int sigma = 1;
  double c_sigma = 1.0;
  bool time_rescaled = true;
  double hbar = 1.0;  // only used in physical time

  void validate() const;
};

/// (dc_R/dt, dc_L/dt) of the reduced doublet system.
TwoModeState rhs(const TwoModeState& s, const TwoModeParams& p);

/// Integral of motion I(c_R, c_L).
double invariant_I(const TwoModeState& s, const TwoModeParams& p);

struct TwoModeRecord {
  double tau = 0.0;
  TwoModeState state;
  double norm2 = 0.0;
  double invariant = 0.0;
  double z = 0.0;
};

using TwoModeTrajectory = std::vector<TwoModeRecord>;

/// Classical RK4 with fixed dt. Records every `stride` steps (and the final step);
/// times are step_index * dt. Unless `allow_coarse`, dt must be at most 1/1000 of
/// the beat period 2 pi / omega.
TwoModeTrajectory integrate(const TwoModeState& state0, const TwoModeParams& p, double dt,
                            double t_final, int stride = 1, bool allow_coarse = false);

struct ScanRow {
  double eta = 0.0;  // coupling ratio eps C_sigma / omega
  double min_z = 0.0;
  bool trapped = false;
};

struct ScanTable {
  std::vector<ScanRow> rows;
  std::optional<double> eta_star;
  double bisection_width = 0.0;
  /// Once trapped, every larger coupling in the table is trapped too.
  bool monotone = false;
};

struct ScanOptions {
  double periods = 10.0;
  int steps_per_period = 10000;
  double bisection_tol = 0.01;
};

/// Starts from (c_R, c_L) = (1, 0) for each coupling ratio eta = eps C_sigma / omega
/// (eps set from the template's omega and C_sigma), records min z over
/// `periods` beat periods and bisects the beating/trapped boundary.
ScanTable selftrap_scan(const TwoModeParams& p_template, const std::vector<double>& eta_values,
                        int sigma, const ScanOptions& opts = {});

/// Minimum imbalance over a run started at (1, 0), coupling ratio eta.
double selftrap_min_z(const TwoModeParams& p_template, double eta, int sigma,
                      const ScanOptions& opts = {});

}  // namespace dwnls
