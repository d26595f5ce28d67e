#include <doctest.h>

#include <cmath>

#include "dwnls/diagnostics.hpp"

using namespace dwnls;

namespace {

const double kHbar = 0.3;

const SpectralData& spectrum() {
  static const SpectralData S =
      lowest_eigenpairs(builtin_quartic(1.0, 1.0), Grid(1, 4.0, 128), kHbar, 12, 1e-11);
  return S;
}

FieldC combo(const std::vector<std::pair<int, cplx>>& terms) {
  const auto& S = spectrum();
  FieldC f(S.grid());
  for (const auto& [k, c] : terms) axpy(c, S.eigenvectors[k], f);
  return f;
}

}  // namespace

TEST_CASE("project") {
  const auto& S = spectrum();
  const double s = 1.0 / std::sqrt(2.0);
  SUBCASE("phi1") {
    const auto pd = project(S.eigenvectors[0], S);
    CHECK(std::abs(pd.zeta1 - 1.0) <= 1e-10);
    CHECK(std::abs(pd.zeta2) <= 1e-10);
    CHECK(pd.mu <= 1e-8);
    CHECK(pd.pop_R == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(pd.pop_L == doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("phi_R") {
    const auto pd = project(S.phi_R, S);
    CHECK(pd.pop_R == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(pd.pop_L <= 1e-10);
  }
  SUBCASE("phi3") {
    const auto pd = project(S.eigenvectors[2], S);
    CHECK(std::abs(pd.zeta1) <= 1e-10);
    CHECK(std::abs(pd.zeta2) <= 1e-10);
    CHECK(pd.mu == doctest::Approx(std::sqrt(S.eigenvalues[2])).epsilon(1e-9));
    CHECK(pd.pic_norm0 == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("(phi1 + phi3) / sqrt 2") {
    const auto pd = project(combo({{0, s}, {2, s}}), S);
    CHECK(std::abs(pd.zeta1 - s) <= 1e-10);
    CHECK(pd.mu == doctest::Approx(std::sqrt(S.eigenvalues[2] / 2)).epsilon(1e-9));
    CHECK(pd.h0_gap == doctest::Approx((S.eigenvalues[2] - S.omega_mean) / 2).epsilon(1e-8));
  }
}

TEST_CASE("projection identities") {
  const auto& S = spectrum();
  const FieldC psi = combo({{0, cplx(0.6, 0.1)}, {1, cplx(-0.3, 0.5)}, {4, cplx(0.2, -0.2)}, {7, 0.15}});
  const auto pd = project(psi, S);
  const double n2 = std::pow(norm0(psi), 2);
  CHECK(std::norm(pd.zeta1) + std::norm(pd.zeta2) + pd.pic_norm0 * pd.pic_norm0 ==
        doctest::Approx(n2).epsilon(1e-12));
  CHECK(pd.pop_R + pd.pop_L == doctest::Approx(std::norm(pd.zeta1) + std::norm(pd.zeta2)).epsilon(1e-12));
  CHECK(std::abs(inner(S.eigenvectors[0], pd.pic_field)) <= 1e-12);
  CHECK(std::abs(inner(S.eigenvectors[1], pd.pic_field)) <= 1e-12);
  const double x1 = norm_Xs(psi, *S.hamiltonian, 1);
  CHECK(std::abs(x1 * x1 - (S.eigenvalues[0] * std::norm(pd.zeta1) + S.eigenvalues[1] * std::norm(pd.zeta2) +
                            pd.mu * pd.mu)) <= 1e-8);
}

TEST_CASE("sandwich on a state with 10% mass outside the doublet") {
  const auto& S = spectrum();
  // Outside part spread over phi3..phi12 with equal weights; the spectral sums give
  // mu^2 = sum lambda_k |c_k|^2 and h0_gap = sum (lambda_k - Omega) |c_k|^2.
  std::vector<std::pair<int, cplx>> terms{{0, std::sqrt(0.45)}, {1, cplx(0, std::sqrt(0.45))}};
  double mu2 = 0.0, gap = 0.0;
  for (int k = 2; k < 12; ++k) {
    const double w = 0.1 / 10;
    terms.push_back({k, std::polar(std::sqrt(w), 0.3 * k)});
    mu2 += S.eigenvalues[k] * w;
    gap += (S.eigenvalues[k] - S.omega_mean) * w;
  }
  const auto pd = project(combo(terms), S);
  CHECK(pd.mu * pd.mu == doctest::Approx(mu2).epsilon(1e-9));
  CHECK(pd.h0_gap == doctest::Approx(gap).epsilon(1e-8));

  const auto rep = h0_sandwich_check(pd, S, kHbar);
  CHECK(rep.ok());
  CHECK(rep.upper_margin > 0.0);
  CHECK(rep.lower_margin > 0.0);
  CHECK(rep.lambda_top == doctest::Approx(S.eigenvalues.back()));
  CHECK(rep.relative_gap == doctest::Approx((S.eigenvalues[2] - S.omega_mean) / S.eigenvalues[2]));
  CHECK_FALSE(rep.in_small_gap_regime);

  SUBCASE("doublet-only state sits on the boundary") {
    const auto rep0 = h0_sandwich_check(project(S.phi_L, S), S, kHbar);
    CHECK(rep0.ok());
    CHECK(rep0.in_small_gap_regime);
  }
  SUBCASE("needs three eigenpairs") {
    SpectralData two = S;
    two.eigenvalues.resize(2);
    two.eigenvectors.resize(2);
    CHECK_THROWS_AS(h0_sandwich_check(pd, two, kHbar), InvalidParameter);
  }
}

TEST_CASE("theorem monitor on synthetic trajectories") {
  const auto& S = spectrum();
  SimConfig cfg;
  cfg.hbar = kHbar;
  cfg.epsilon = 0.04;
  Trajectory tr;
  for (int i = 0; i <= 10; ++i) {
    Observation o;
    o.t = i;
    o.mu = 0.01 + 0.001 * (i % 3);
    o.x1_norm = std::sqrt(S.omega_mean);
    tr.records.push_back(o);
  }
  auto r = theorem1_monitor(tr, cfg, S);
  CHECK(r.mu_max == doctest::Approx(0.012));
  CHECK(r.initial_hypothesis_ok);
  CHECK(r.no_secular_growth);
  CHECK(r.x1_bound_ok);
  REQUIRE(r.amplification);
  CHECK(*r.amplification == doctest::Approx(0.06));

  tr.records.back().mu = 0.05;
  tr.records[3].x1_norm = 10.0;
  r = theorem1_monitor(tr, cfg, S);
  CHECK_FALSE(r.no_secular_growth);
  CHECK_FALSE(r.x1_bound_ok);
  CHECK_FALSE(theorem1_monitor(tr, cfg, S, 0.01).initial_hypothesis_ok);

  cfg.epsilon = 0.0;
  CHECK_FALSE(theorem1_monitor(tr, cfg, S).amplification);
  CHECK_FALSE(theorem1_monitor(tr, cfg, S).initial_hypothesis_ok);
  CHECK_THROWS_AS(theorem1_monitor(Trajectory{}, cfg, S), InvalidParameter);
}

TEST_CASE("monitors on a linear run") {
  const auto& S = spectrum();
  SimConfig cfg;
  cfg.hbar = kHbar;
  // Strang leaks out of the doublet at about 0.26 dt^2.
  cfg.dt = 1.5e-4;
  cfg.t_final = 3.0;
  cfg.output_stride = 4000;
  const auto traj = evolve(S.phi_R, cfg, S);
  const auto th = theorem1_monitor(traj, cfg, S);
  CHECK(th.initial_hypothesis_ok);
  CHECK(th.mu_max <= 1e-8);

  TwoModeParams p;
  p.omega_split = S.omega_split;
  p.omega_mean = S.omega_mean;
  const auto tm = integrate({1.0, 0.0}, p, cfg.dt, cfg.t_final, cfg.output_stride);
  const auto cr = corollary1_monitor(traj, tm, S);
  CHECK(cr.e0 <= 1e-12);
  CHECK(cr.slope <= 1e-8);
  CHECK(cr.times.size() == traj.records.size());

  const auto shorter = integrate({1.0, 0.0}, p, cfg.dt, cfg.t_final / 2, cfg.output_stride);
  CHECK_THROWS_AS(corollary1_monitor(traj, shorter, S), InvalidParameter);
  const auto shifted = integrate({1.0, 0.0}, p, cfg.dt * 1.5, cfg.t_final * 1.5, cfg.output_stride);
  CHECK_THROWS_AS(corollary1_monitor(traj, shifted, S), InvalidParameter);
}

TEST_CASE("corollary slope is fitted over the early window") {
  const auto& S = spectrum();
  Trajectory tr;
  TwoModeTrajectory tm;
  for (int i = 0; i <= 40; ++i) {
    Observation o;
    o.t = i;
    const double e = 0.005 * i;  // crosses 0.1 at i = 20
    o.zeta1 = std::sqrt(0.5) * cplx(1.0 + e, 0.0);
    o.zeta2 = std::sqrt(0.5) * cplx(1.0 + e, 0.0);
    tr.records.push_back(o);
    TwoModeRecord r;
    r.tau = i;
    r.state = {1.0, 0.0};
    tm.push_back(r);
  }
  const auto cr = corollary1_monitor(tr, tm, S);
  CHECK(cr.errors[10] == doctest::Approx(0.05));
  CHECK(cr.slope == doctest::Approx(0.005));
}

TEST_CASE("log-log fits") {
  std::vector<double> x{1e-3, 1e-2, 1e-1}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 0.5));
  CHECK(loglog_slope(x, y) == doctest::Approx(0.5));
  CHECK(eps_scaling_exponent(x, y) == doctest::Approx(0.5));
  CHECK(slope_eps_exponent(0.02, 8e-4, 0.01, 2e-4) == doctest::Approx(2.0));
  CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), InvalidParameter);
  CHECK_THROWS_AS(loglog_slope({1.0, 2.0}, {1.0, -1.0}), InvalidParameter);
}
