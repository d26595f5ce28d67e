#pragma once

#include <filesystem>
#include <vector>

#include "dwnls/discretization.hpp"
#include "dwnls/eigensolver.hpp"
#include "dwnls/errors.hpp"

namespace dwnls {

/// One row of the trajectory CSV.
struct Observation {
  double t = 0.0;
  double norm = 0.0;    // ||psi||_0
  double energy = 0.0;  // E_eps(psi)
  cplx zeta1{};
  cplx zeta2{};
  double mu = 0.0;      // ||Pi_c psi||_1
  double pic_norm0 = 0.0;
  double pop_R = 0.0;
  double pop_L = 0.0;
  double h0_gap = 0.0;
  double x1_norm = 0.0;  // ||psi||_1
};

struct Trajectory {
  std::vector<Observation> records;
  std::vector<std::filesystem::path> snapshots;

  std::vector<double> times() const;
};

/// What evolve() records besides norm and energy.
struct ObserverSet {
  bool projections = true;
  /// Abort when ||psi||_1 exceeds this multiple of its initial value.
  double blowup_factor = 10.0;
};

/// Blow-up with the trajectory recorded up to the failure.
class EvolveBlowUp : public BlowUpError {
 public:
  EvolveBlowUp(const std::string& what, double t, Trajectory partial)
      : BlowUpError(what, t), partial(std::move(partial)) {}
  Trajectory partial;
};

/// Strang phase-kinetic-phase propagator with precomputed linear factors.
class SplitStepPropagator {
 public:
  SplitStepPropagator(std::shared_ptr<const Hamiltonian> H, const SimConfig& cfg);

  /// Advances psi by one step of size cfg.dt, in place.
  void step(FieldC& psi) const;

  const SimConfig& config() const { return cfg_; }

 private:
  void half_phase(FieldC& psi) const;

  std::shared_ptr<const Hamiltonian> H_;
  SimConfig cfg_;
  double time_scale_;  // 1 in rescaled time, 1/hbar in physical time
  std::vector<cplx> potential_half_;
  std::vector<cplx> kinetic_;
};

/// One Strang step of i psi_tau = H0 psi + eps |psi|^{2 sigma} psi (generator divided
/// by hbar in physical time). Throws BlowUpError on non-finite output.
FieldC step(const FieldC& psi, const SimConfig& cfg, const Potential& V);

/// Repeated step() to cfg.t_final, recording observables every cfg.output_stride
/// steps. Output times are step_index * dt.
Trajectory evolve(const FieldC& psi0, const SimConfig& cfg, const SpectralData& S,
                  const ObserverSet& observers = {});

/// E_eps(psi) = Re <psi, H0 psi> + eps / (1 + sigma) * integral |psi|^{2 sigma + 2}.
double energy(const FieldC& psi, const SimConfig& cfg, const Hamiltonian& H);
double energy(const FieldC& psi, const SimConfig& cfg, const Potential& V);

/// Closed-form linear (eps = 0) solution started from zeta_R phi_R + zeta_L phi_L.
FieldC linear_beating_exact(cplx zeta_R, cplx zeta_L, double t, const SpectralData& S,
                            bool time_rescaled = true);

/// 2 pi / omega in rescaled time, 2 pi hbar / omega in physical time.
double beat_period(const SpectralData& S, bool time_rescaled = true);

}  // namespace dwnls
