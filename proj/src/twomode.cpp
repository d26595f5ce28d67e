#include "dwnls/twomode.hpp"

#include <algorithm>
#include <cmath>

#include "dwnls/errors.hpp"

namespace dwnls {

void TwoModeParams::validate() const {
  if (!(omega_split > 0.0)) throw InvalidParameter("two-mode: omega must be positive");
  if (!(c_sigma > 0.0)) throw InvalidParameter("two-mode: C_sigma must be positive");
  if (sigma < 1) throw InvalidParameter("two-mode: sigma must be a positive integer");
  if (!time_rescaled && !(hbar > 0.0)) throw InvalidParameter("two-mode: hbar must be positive");
}

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace

TwoModeState rhs(const TwoModeState& s, const TwoModeParams& p) {
  const double g = p.epsilon * p.c_sigma;
  const cplx hR = -p.omega_split * s.c_L + p.omega_mean * s.c_R + g * ipow(std::norm(s.c_R), p.sigma) * s.c_R;
  const cplx hL = -p.omega_split * s.c_R + p.omega_mean * s.c_L + g * ipow(std::norm(s.c_L), p.sigma) * s.c_L;
  const cplx minus_i(0.0, -1.0);
  const double scale = p.time_rescaled ? 1.0 : 1.0 / p.hbar;
  return {minus_i * scale * hR, minus_i * scale * hL};
}

double invariant_I(const TwoModeState& s, const TwoModeParams& p) {
  const double nR = std::norm(s.c_R), nL = std::norm(s.c_L);
  const double hop = 2.0 * (std::conj(s.c_R) * s.c_L).real();
  return p.omega_mean * (nR + nL) - p.omega_split * hop +
         p.c_sigma * p.epsilon / (p.sigma + 1.0) * (ipow(nR, p.sigma + 1) + ipow(nL, p.sigma + 1));
}

namespace {

TwoModeState rk4_step(const TwoModeState& s, const TwoModeParams& p, double dt) {
  auto add = [](const TwoModeState& a, const TwoModeState& b, double h) {
    return TwoModeState{a.c_R + h * b.c_R, a.c_L + h * b.c_L};
  };
  const TwoModeState k1 = rhs(s, p);
  const TwoModeState k2 = rhs(add(s, k1, 0.5 * dt), p);
  const TwoModeState k3 = rhs(add(s, k2, 0.5 * dt), p);
  const TwoModeState k4 = rhs(add(s, k3, dt), p);
  return {s.c_R + dt / 6.0 * (k1.c_R + 2.0 * k2.c_R + 2.0 * k3.c_R + k4.c_R),
          s.c_L + dt / 6.0 * (k1.c_L + 2.0 * k2.c_L + 2.0 * k3.c_L + k4.c_L)};
}

TwoModeRecord make_record(double tau, const TwoModeState& s, const TwoModeParams& p) {
  return {tau, s, s.norm2(), invariant_I(s, p), s.imbalance()};
}

}  // namespace

TwoModeTrajectory integrate(const TwoModeState& state0, const TwoModeParams& p, double dt,
                            double t_final, int stride, bool allow_coarse) {
  p.validate();
  if (!(dt > 0.0)) throw InvalidParameter("two-mode: dt must be positive");
  if (stride < 1) throw InvalidParameter("two-mode: stride must be >= 1");
  double period = 2.0 * M_PI / p.omega_split;
  if (!p.time_rescaled) period *= p.hbar;
  if (!allow_coarse && dt > period / 1000.0)
    throw InvalidParameter("two-mode: dt must resolve the beat (dt <= period / 1000)");

  const long long nsteps = std::llround(t_final / dt);
  TwoModeTrajectory traj;
  traj.reserve(static_cast<std::size_t>(nsteps / stride + 2));
  TwoModeState s = state0;
  traj.push_back(make_record(0.0, s, p));
  for (long long n = 1; n <= nsteps; ++n) {
    s = rk4_step(s, p, dt);
    if (n % stride == 0 || n == nsteps) traj.push_back(make_record(static_cast<double>(n) * dt, s, p));
  }
  return traj;
}

double selftrap_min_z(const TwoModeParams& p_template, double eta, int sigma, const ScanOptions& opts) {
  TwoModeParams p = p_template;
  p.sigma = sigma;
  p.epsilon = eta * p.omega_split / p.c_sigma;
  p.validate();
  double period = 2.0 * M_PI / p.omega_split;
  if (!p.time_rescaled) period *= p.hbar;
  double dt = period / opts.steps_per_period;
  // Keep every rotation rate (Omega, omega, nonlinear shift) well resolved too.
  double rate = std::abs(p.omega_mean) + p.omega_split + std::abs(p.epsilon * p.c_sigma);
  if (!p.time_rescaled) rate /= p.hbar;
  dt = std::min(dt, 0.05 / rate);
  const long long nsteps = std::llround(opts.periods * period / dt);

  TwoModeState s{1.0, 0.0};
  double min_z = s.imbalance();
  for (long long n = 0; n < nsteps; ++n) {
    s = rk4_step(s, p, dt);
    min_z = std::min(min_z, s.imbalance());
  }
  return min_z;
}

ScanTable selftrap_scan(const TwoModeParams& p_template, const std::vector<double>& eta_values, int sigma,
                        const ScanOptions& opts) {
  if (!std::is_sorted(eta_values.begin(), eta_values.end()))
    throw InvalidParameter("selftrap_scan: eta values must be sorted");
  if (opts.periods < 10.0) throw InvalidParameter("selftrap_scan: integrate at least 10 beat periods");

  ScanTable table;
  for (double eta : eta_values) {
    const double mz = selftrap_min_z(p_template, eta, sigma, opts);
    table.rows.push_back({eta, mz, mz > 0.0});
  }

  table.monotone = true;
  bool seen_trapped = false;
  for (const auto& r : table.rows) {
    if (seen_trapped && !r.trapped) table.monotone = false;
    seen_trapped |= r.trapped;
  }

  // First beating -> trapped edge.
  for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
    if (table.rows[i].trapped || !table.rows[i + 1].trapped) continue;
    double lo = table.rows[i].eta, hi = table.rows[i + 1].eta;
    while (hi - lo > opts.bisection_tol) {
      const double mid = 0.5 * (lo + hi);
      if (selftrap_min_z(p_template, mid, sigma, opts) > 0.0) hi = mid; else lo = mid;
    }
    table.eta_star = 0.5 * (lo + hi);
    table.bisection_width = hi - lo;
    break;
  }
  return table;
}

}  // namespace dwnls
