#include "dwnls/nls.hpp"

#include <cmath>
#include <sstream>

#include "dwnls/diagnostics.hpp"

namespace dwnls {

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(records.size());
  for (const auto& r : records) t.push_back(r.t);
  return t;
}

SplitStepPropagator::SplitStepPropagator(std::shared_ptr<const Hamiltonian> H, const SimConfig& cfg)
    : H_(std::move(H)), cfg_(cfg), time_scale_(cfg.time_rescaled ? 1.0 : 1.0 / cfg.hbar) {
  cfg_.validate();
  if (std::abs(H_->hbar() - cfg.hbar) > 1e-15 * cfg.hbar)
    throw InvalidParameter("propagator: configuration hbar differs from the Hamiltonian's");
  const auto& v = H_->potential_samples();
  const auto& k2 = H_->k_squared();
  const double h2 = cfg.hbar * cfg.hbar;
  const double dt = cfg.dt * time_scale_;
  potential_half_.resize(v.size());
  kinetic_.resize(k2.size());
  for (std::size_t i = 0; i < v.size(); ++i) potential_half_[i] = std::polar(1.0, -0.5 * dt * v[i]);
  for (std::size_t i = 0; i < k2.size(); ++i) kinetic_[i] = std::polar(1.0, -dt * h2 * k2[i]);
}

void SplitStepPropagator::half_phase(FieldC& psi) const {
  if (cfg_.epsilon == 0.0) {
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= potential_half_[i];
    return;
  }
  const double c = -0.5 * cfg_.dt * time_scale_ * cfg_.epsilon;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double rho = std::norm(psi[i]);
    double w = rho;
    for (int s = 1; s < cfg_.sigma; ++s) w *= rho;
    psi[i] *= potential_half_[i] * std::polar(1.0, c * w);
  }
}

void SplitStepPropagator::step(FieldC& psi) const {
  half_phase(psi);
  const Fft& fft = fft_for(psi.grid);
  fft.forward(psi.values);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= kinetic_[i];
  fft.backward(psi.values);
  half_phase(psi);
}

FieldC step(const FieldC& psi, const SimConfig& cfg, const Potential& V) {
  if (!psi.all_finite()) throw BlowUpError("step: input field is not finite", 0.0);
  SplitStepPropagator prop(std::make_shared<const Hamiltonian>(V, psi.grid, cfg.hbar), cfg);
  FieldC out = psi;
  prop.step(out);
  if (!out.all_finite()) throw BlowUpError("step: non-finite values after one step", cfg.dt);
  return out;
}

double energy(const FieldC& psi, const SimConfig& cfg, const Hamiltonian& H) {
  const double e0 = H.expectation(psi);
  if (cfg.epsilon == 0.0) return e0;
  return e0 + cfg.epsilon / (1.0 + cfg.sigma) * lp_power(psi, 2.0 * cfg.sigma + 2.0);
}

double energy(const FieldC& psi, const SimConfig& cfg, const Potential& V) {
  return energy(psi, cfg, Hamiltonian(V, psi.grid, cfg.hbar));
}

namespace {

Observation observe(const FieldC& psi, double t, const SimConfig& cfg, const SpectralData& S,
                    const ObserverSet& obs) {
  Observation o;
  o.t = t;
  o.norm = norm0(psi);
  const double e0 = S.hamiltonian->expectation(psi);
  o.x1_norm = std::sqrt(std::max(e0, 0.0));
  o.energy = cfg.epsilon == 0.0
                 ? e0
                 : e0 + cfg.epsilon / (1.0 + cfg.sigma) * lp_power(psi, 2.0 * cfg.sigma + 2.0);
  if (obs.projections) {
    const ProjectionData pd = project(psi, S);
    o.zeta1 = pd.zeta1;
    o.zeta2 = pd.zeta2;
    o.mu = pd.mu;
    o.pic_norm0 = pd.pic_norm0;
    o.pop_R = pd.pop_R;
    o.pop_L = pd.pop_L;
    o.h0_gap = pd.h0_gap;
  }
  return o;
}

}  // namespace

Trajectory evolve(const FieldC& psi0, const SimConfig& cfg, const SpectralData& S,
                  const ObserverSet& observers) {
  cfg.validate();
  if (!(psi0.grid == S.grid())) throw GridMismatch("initial datum and spectral data grids differ");
  if (std::abs(norm0(psi0) - 1.0) > 1e-10) throw InvalidParameter("evolve: initial datum must have unit L2 norm");

  SplitStepPropagator prop(S.hamiltonian, cfg);
  const long long nsteps = std::llround(cfg.t_final / cfg.dt);
  Trajectory traj;
  FieldC psi = psi0;
  traj.records.push_back(observe(psi, 0.0, cfg, S, observers));
  const double x1_initial = traj.records.front().x1_norm;

  auto snapshot = [&](long long n) {
    if (cfg.snapshot_stride <= 0 || n % cfg.snapshot_stride != 0) return;
    std::ostringstream name;
    name << "psi_" << n;
    const auto stem = cfg.snapshot_dir / name.str();
    write_snapshot(psi, cfg.hbar, static_cast<double>(n) * cfg.dt, stem);
    traj.snapshots.push_back(stem);
  };
  snapshot(0);

  for (long long n = 1; n <= nsteps; ++n) {
    prop.step(psi);
    const bool record = n % cfg.output_stride == 0 || n == nsteps;
    if (!record) continue;
    const double t = static_cast<double>(n) * cfg.dt;
    if (!psi.all_finite()) {
      throw EvolveBlowUp("evolve: non-finite field (possible focusing blow-up)", t, std::move(traj));
    }
    traj.records.push_back(observe(psi, t, cfg, S, observers));
    if (traj.records.back().x1_norm > observers.blowup_factor * x1_initial) {
      std::ostringstream os;
      os << "evolve: energy norm grew beyond " << observers.blowup_factor << "x its initial value";
      throw EvolveBlowUp(os.str(), t, std::move(traj));
    }
    snapshot(n);
  }
  return traj;
}

FieldC linear_beating_exact(cplx zeta_R, cplx zeta_L, double t, const SpectralData& S, bool time_rescaled) {
  if (std::abs(std::norm(zeta_R) + std::norm(zeta_L) - 1.0) > 1e-10)
    throw InvalidParameter("linear_beating_exact: |zeta_R|^2 + |zeta_L|^2 must be 1");
  const double tau = time_rescaled ? t : t / S.hbar;
  const double c = std::cos(S.omega_split * tau), s = std::sin(S.omega_split * tau);
  const cplx phase = std::polar(1.0, -S.omega_mean * tau);
  const cplx aR = phase * (zeta_R * c + cplx(0, 1) * zeta_L * s);
  const cplx aL = phase * (zeta_L * c + cplx(0, 1) * zeta_R * s);
  FieldC out(S.grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = aR * S.phi_R[i] + aL * S.phi_L[i];
  return out;
}

double beat_period(const SpectralData& S, bool time_rescaled) {
  if (!(S.omega_split > 0.0)) throw InvalidParameter("beat_period: splitting must be positive");
  const double T = 2.0 * M_PI / S.omega_split;
  return time_rescaled ? T : T * S.hbar;
}

}  // namespace dwnls
