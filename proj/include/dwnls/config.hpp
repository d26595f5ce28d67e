#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dwnls/discretization.hpp"
#include "dwnls/potential.hpp"

namespace dwnls {

// Run configuration read from an INI file. Every key has a typed default; keys
// that are not listed here are rejected.

struct PotentialSpec {
  std::string family = "quartic";  // quartic | harmonic_barrier | harmonic
  double a = 1.0;
  double beta = 1.0;
  double transverse_freq = 1.0;  // quartic, dim 2
  double omega0 = 1.0;
  double barrier = 4.0;
  double width = 0.5;
};

struct GridSpec {
  int dim = 1;
  double L = 4.0;
  int n = 256;
};

struct PhysicsSpec {
  double hbar = 0.1;
  double epsilon = 0.0;
  std::optional<double> eta;  // overrides epsilon: eps = eta * omega * hbar^{d sigma / 2}
  int sigma = 1;
  bool time_rescaled = true;
};

struct TimeSpec {
  std::optional<double> dt;
  int steps_per_period = 10000;  // used when dt is absent
  std::optional<double> t_final;
  double periods = 1.0;          // used when t_final is absent
  int output_stride = 100;
  int snapshot_stride = 0;
};

struct SolverSpec {
  int k = 6;
  double tol = 1e-10;
  int max_iterations = 4000;
  std::uint64_t seed = 1;
  std::string c_sigma = "projected";  // projected | paper_literal
  int agmon_resolution = 512;
};

struct OutputSpec {
  bool eigenvectors = false;
  bool projections = true;
  double blowup_factor = 10.0;
};

struct SweepSpec {
  std::vector<double> hbars;
  std::vector<double> epsilons;
};

struct InitialSpec {
  std::string state = "phi_R";  // phi_R | phi_L | phi1 | phi2 | phi3 | mix
  double zeta_R = 1.0;          // mix: zeta_R phi_R + zeta_L phi_L, normalized
  double zeta_L = 0.0;
};

struct TwoModeSpec {
  std::optional<double> dt;
  int stride = 0;  // 0 = match the trajectory output times
  std::vector<double> scan_etas;
  double scan_periods = 10.0;
  int scan_steps_per_period = 10000;
  double bisection_tol = 0.01;
};

struct CompareSpec {
  double pair_ratio = 0.0;  // > 1 adds a second run at epsilon / pair_ratio
};

struct RunConfig {
  PotentialSpec potential;
  GridSpec grid;
  PhysicsSpec physics;
  TimeSpec time;
  SolverSpec solver;
  OutputSpec output;
  SweepSpec sweep;
  InitialSpec initial;
  TwoModeSpec twomode;
  CompareSpec compare;

  Potential make_potential() const;
  Grid make_grid() const;
};

/// Throws ConfigError with the offending section.key in the message.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);

/// Every field, defaults included. Stable key order.
nlohmann::json to_json(const RunConfig& cfg);

/// Canonical INI text of the resolved configuration.
std::string canonical_text(const RunConfig& cfg);

}  // namespace dwnls
