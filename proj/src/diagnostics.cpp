#include "dwnls/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "dwnls/errors.hpp"

namespace dwnls {

ProjectionData project(const FieldC& psi, const SpectralData& S) {
  if (S.eigenvectors.size() < 2) throw InvalidParameter("project: spectral data needs phi1 and phi2");
  if (!(psi.grid == S.grid())) throw GridMismatch("project: field and spectral data grids differ");
  const FieldC& phi1 = S.eigenvectors[0];
  const FieldC& phi2 = S.eigenvectors[1];

  ProjectionData pd;
  pd.zeta1 = inner(phi1, psi);
  pd.zeta2 = inner(phi2, psi);
  pd.pic_field = psi;
  axpy(-pd.zeta1, phi1, pd.pic_field);
  axpy(-pd.zeta2, phi2, pd.pic_field);
  pd.pic_norm0 = norm0(pd.pic_field);
  pd.mu = norm_Xs(pd.pic_field, *S.hamiltonian, 1);
  pd.pop_R = std::norm(inner(S.phi_R, psi));
  pd.pop_L = std::norm(inner(S.phi_L, psi));
  pd.h0_gap = pd.mu * pd.mu - S.omega_mean * pd.pic_norm0 * pd.pic_norm0;
  return pd;
}

SandwichReport h0_sandwich_check(const ProjectionData& pd, const SpectralData& S, double hbar) {
  if (S.eigenvalues.size() < 3) throw InvalidParameter("h0_sandwich_check: needs at least three eigenpairs");
  SandwichReport r;
  // (lambda - Omega) / lambda increases with lambda, so lambda3 attains the minimum.
  const double l3 = S.eigenvalues[2];
  r.relative_gap = (l3 - S.omega_mean) / l3;
  r.lambda_top = S.eigenvalues.back();
  const double mu2 = pd.mu * pd.mu;
  r.upper_margin = mu2 - pd.h0_gap;
  r.lower_margin = pd.h0_gap - r.relative_gap * mu2 / r.lambda_top;
  // Rounding allowance: both sides are O(mu^2).
  const double slack = 1e-12 * mu2 + 1e-30;
  r.upper_ok = r.upper_margin >= -slack;
  r.lower_ok = r.relative_gap > 0.0 && r.lower_margin >= -slack;
  r.in_small_gap_regime = pd.h0_gap < hbar * hbar * hbar;
  return r;
}

TheoremReport theorem1_monitor(const Trajectory& traj, const SimConfig& cfg, const SpectralData& S,
                               double c0) {
  if (traj.records.empty()) throw InvalidParameter("theorem1_monitor: empty trajectory");
  TheoremReport r;
  const double root_eps = std::sqrt(std::abs(cfg.epsilon));
  r.mu0 = traj.records.front().mu;
  r.initial_hypothesis_ok = cfg.epsilon == 0.0 ? r.mu0 <= 1e-8 : r.mu0 <= c0 * root_eps;

  const double t_end = traj.records.back().t;
  const double t_mid = 0.5 * (traj.records.front().t + t_end);
  const double x1_cap = std::sqrt(2.0 * S.omega_mean) * (1.0 + 1e-6);
  for (const auto& o : traj.records) {
    r.mu_max = std::max(r.mu_max, o.mu);
    if (o.t <= t_mid) r.first_half_max = std::max(r.first_half_max, o.mu);
    else r.second_half_max = std::max(r.second_half_max, o.mu);
    if (cfg.epsilon > 0.0 && o.x1_norm > x1_cap) r.x1_bound_ok = false;
  }
  r.no_secular_growth = r.second_half_max <= 1.2 * r.first_half_max;
  if (cfg.epsilon != 0.0) r.amplification = r.mu_max / root_eps;
  return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidParameter("loglog_slope: need at least two matched points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidParameter("loglog_slope: values must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw InvalidParameter("loglog_slope: x values must not all coincide");
  return (n * sxy - sx * sy) / den;
}

double eps_scaling_exponent(const std::vector<double>& eps, const std::vector<double>& mu_max) {
  std::vector<double> a(eps.size());
  std::transform(eps.begin(), eps.end(), a.begin(), [](double e) { return std::abs(e); });
  return loglog_slope(a, mu_max);
}

CorollaryReport corollary1_monitor(const Trajectory& traj, const TwoModeTrajectory& tm, const SpectralData&) {
  if (traj.records.size() != tm.size())
    throw InvalidParameter("corollary1_monitor: trajectories have different numbers of output times");
  CorollaryReport r;
  const double s = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < tm.size(); ++i) {
    const auto& o = traj.records[i];
    if (std::abs(o.t - tm[i].tau) > 1e-9 * std::max(1.0, std::abs(o.t)))
      throw InvalidParameter("corollary1_monitor: output times differ");
    // phi_R, phi_L are orthonormal, so the L2 error is the coefficient distance.
    const cplx zR = s * (o.zeta1 + o.zeta2);
    const cplx zL = s * (o.zeta1 - o.zeta2);
    const double e = std::sqrt(std::norm(tm[i].state.c_R - zR) + std::norm(tm[i].state.c_L - zL));
    r.times.push_back(o.t);
    r.errors.push_back(e);
  }
  if (r.errors.empty()) return r;
  r.e0 = r.errors.front();

  double stt = 0.0, ste = 0.0;
  for (std::size_t i = 0; i < r.errors.size() && r.errors[i] < 0.1; ++i) {
    stt += r.times[i] * r.times[i];
    ste += r.times[i] * r.errors[i];
  }
  r.slope = stt > 0.0 ? ste / stt : 0.0;
  return r;
}

double slope_eps_exponent(double eps_a, double slope_a, double eps_b, double slope_b) {
  if (!(slope_a > 0.0) || !(slope_b > 0.0)) throw InvalidParameter("slope_eps_exponent: slopes must be positive");
  if (eps_a == eps_b) throw InvalidParameter("slope_eps_exponent: epsilon values must differ");
  return std::log(slope_a / slope_b) / std::log(std::abs(eps_a) / std::abs(eps_b));
}

}  // namespace dwnls
