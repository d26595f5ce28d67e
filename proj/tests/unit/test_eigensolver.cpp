#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "dwnls/eigensolver.hpp"
#include "dwnls/errors.hpp"

using namespace dwnls;

namespace {

const SpectralData& quartic_025() {
  static const SpectralData S =
      lowest_eigenpairs(builtin_quartic(1.0, 1.0), Grid(1, 4.0, 256), 0.25, 6);
  return S;
}

// Dense periodic Fourier second-derivative matrix (closed-form entries) plus the
// diagonal potential, for n even on [-L, L).
Eigen::MatrixXd dense_H0(const Potential& V, const Grid& g, double hbar) {
  const int n = g.points_per_axis();
  const double h = 2.0 * M_PI / n;
  const double scale = std::pow(M_PI / g.half_width(), 2);
  Eigen::MatrixXd D2(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      if (j == k) {
        D2(j, k) = -M_PI * M_PI / (3.0 * h * h) - 1.0 / 6.0;
      } else {
        const double s = std::sin(0.5 * h * (j - k));
        D2(j, k) = -((j - k) % 2 == 0 ? 1.0 : -1.0) / (2.0 * s * s);
      }
    }
  Eigen::MatrixXd H = -hbar * hbar * scale * D2;
  for (int j = 0; j < n; ++j) H(j, j) += V({g.coord(j), 0.0});
  return H;
}

}  // namespace

TEST_CASE("harmonic oscillator spectrum") {
  const double hbar = 0.1;
  const SpectralData S = lowest_eigenpairs(builtin_harmonic(1.0, 1), Grid(1, 8.0, 1024), hbar, 5);
  for (int n = 1; n <= 5; ++n) {
    const double exact = 1.0 + hbar * (2 * n - 1);
    CHECK(std::abs(S.eigenvalues[n - 1] - exact) <= 1e-8 * exact);
  }
}

TEST_CASE("Lanczos agrees with dense diagonalization") {
  const Potential V = builtin_quartic(1.0, 1.0);
  const Grid g(1, 4.0, 256);
  const double hbar = 0.25;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_H0(V, g, hbar), Eigen::EigenvaluesOnly);
  const auto& S = quartic_025();
  for (std::size_t k = 0; k < S.eigenvalues.size(); ++k)
    CHECK(std::abs(S.eigenvalues[k] - es.eigenvalues()(k)) <= 1e-9 * es.eigenvalues()(k));
}

TEST_CASE("spectral data invariants") {
  const auto& S = quartic_025();
  const Grid& g = S.grid();
  CHECK(S.parities[0] == Parity::even);
  CHECK(S.parities[1] == Parity::odd);
  CHECK(S.omega_split > 0.0);
  CHECK(S.omega_mean == doctest::Approx(0.5 * (S.eigenvalues[0] + S.eigenvalues[1])));
  for (std::size_t j = 0; j < S.eigenvectors.size(); ++j) {
    CHECK(std::abs(norm0(S.eigenvectors[j]) - 1.0) <= 1e-10);
    CHECK(S.residuals[j] <= 1e-10 * S.eigenvalues[j]);
    const FieldC r = S.hamiltonian->apply(S.eigenvectors[j]) - cplx(S.eigenvalues[j]) * S.eigenvectors[j];
    CHECK(norm0(r) <= 1e-10 * S.eigenvalues[j]);
    for (std::size_t k = 0; k < j; ++k) CHECK(std::abs(inner(S.eigenvectors[j], S.eigenvectors[k])) <= 1e-8);
    if (j > 0) CHECK(S.eigenvalues[j] >= S.eigenvalues[j - 1]);
  }
  for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(std::abs(S.phi_R[g.reflect(i)] - S.phi_L[i]) <= 1e-10);
  const std::size_t ip = g.nearest({1.0, 0.0});
  CHECK(S.eigenvectors[0][ip].real() > 0.0);
  CHECK(S.eigenvectors[1][ip].real() > 0.0);
}

TEST_CASE("parity symmetrizer") {
  const Grid g(2, 4.0, 32);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  FieldC f(g);
  for (auto& z : f.values) z = {nd(rng), nd(rng)};
  const FieldC e = symmetrize(f, Parity::even), o = symmetrize(f, Parity::odd);
  CHECK(norm0(symmetrize(e, Parity::even) - e) <= 1e-14);
  CHECK(norm0(symmetrize(o, Parity::odd) - o) <= 1e-14);
  CHECK(std::abs(inner(e, o)) <= 1e-12);
  CHECK(norm0(e + o - f) <= 1e-13);
}

TEST_CASE("semiclassical quartic, hbar = 0.05") {
  const Potential V = builtin_quartic(1.0, 1.0);
  const SpectralData S = lowest_eigenpairs(V, Grid(1, 4.0, 512), 0.05, 3);
  // Well-bottom harmonic approximation 1 + 2 hbar sqrt(beta) a, correct to O(hbar^2).
  CHECK(std::abs(S.eigenvalues[0] - 1.1) <= 4.0 * 0.05 * 0.05);
  CHECK(std::abs(S.eigenvalues[1] - 1.1) <= 4.0 * 0.05 * 0.05);
  CHECK(S.omega_split > 0.0);
  CHECK(S.omega_split < 1e-3);

  const auto loc = localization_report(S, V, 0.5);
  CHECK(loc.mass_R_plus >= 0.99);
  CHECK(loc.mass_R_plus + loc.mass_R_minus <= 1.0 + 1e-10);
  CHECK(loc.mass_L_minus == doctest::Approx(loc.mass_R_plus).epsilon(1e-8));
  CHECK_THROWS_AS(localization_report(S, V, 1.0), InvalidParameter);
}

TEST_CASE("overlap and splitting shrink as hbar decreases") {
  const Potential V = builtin_quartic(1.0, 1.0);
  double prev_overlap = INFINITY, prev_omega = INFINITY;
  for (double hbar : {0.2, 0.1, 0.05}) {
    const SpectralData S = lowest_eigenpairs(V, Grid(1, 4.0, 512), hbar, 3);
    const double ov = localization_report(S, V, 0.4).overlap_sup;
    CHECK(ov < prev_overlap);
    CHECK(S.omega_split < prev_omega);
    // Spectral gap lambda3 - lambda2 >= c hbar and the doublet band 1 + C hbar < lambda < 1 + hbar / C.
    CHECK(S.eigenvalues[2] - S.eigenvalues[1] >= 1.0 * hbar);
    CHECK(S.eigenvalues[0] > 1.0 + 0.5 * hbar);
    CHECK(S.eigenvalues[1] < 1.0 + 2.0 * hbar);
    prev_overlap = ov;
    prev_omega = S.omega_split;
  }
}

TEST_CASE("variational upper bound") {
  const auto& S = quartic_025();
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 5; ++t) {
    FieldC f(S.grid());
    for (auto& z : f.values) z = {nd(rng), nd(rng)};
    f = cplx(1.0 / norm0(f)) * f;
    CHECK(S.eigenvalues[0] <= S.hamiltonian->expectation(f));
  }
}

TEST_CASE("splitting sweep") {
  const Grid g(1, 4.0, 256);
  SUBCASE("single well is not exponentially split") {
    const Grid gh(1, 8.0, 512);
    const SweepTable t = splitting_sweep(builtin_harmonic(1.0, 1), gh, {0.2, 0.15, 0.12, 0.1}, 1e-10, 1, 1);
    for (const auto& r : t.rows) CHECK(r.omega == doctest::Approx(r.hbar).epsilon(1e-8));
    CHECK_FALSE(t.exponential_law());
  }
  SUBCASE("doubling beta steepens the slope") {
    const std::vector<double> hbars{0.3, 0.25, 0.2, 0.17};
    const SweepTable t1 = splitting_sweep(builtin_quartic(1.0, 1.0), g, hbars, 1e-10, 1, 1);
    const SweepTable t2 = splitting_sweep(builtin_quartic(1.0, 2.0), g, hbars, 1e-10, 1, 1);
    CHECK(t1.slope < 0.0);
    CHECK(std::abs(t2.slope) > std::abs(t1.slope));
    CHECK_FALSE(t1.partial());
  }
  SUBCASE("merge order follows the input, not the scheduler") {
    const std::vector<double> hbars{0.3, 0.2, 0.25, 0.22};
    const SweepTable a = splitting_sweep(builtin_quartic(1.0, 1.0), g, hbars, 1e-10, 1, 1);
    const SweepTable b = splitting_sweep(builtin_quartic(1.0, 1.0), g, hbars, 1e-10, 1, 3);
    for (std::size_t i = 0; i < hbars.size(); ++i) {
      CHECK(a.rows[i].hbar == hbars[i]);
      CHECK(a.rows[i].omega == b.rows[i].omega);
    }
    CHECK(a.slope == b.slope);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(splitting_sweep(builtin_quartic(1.0, 1.0), g, {0.3, 0.2, 0.1}), InvalidParameter);
  }
}

TEST_CASE("effective eta") {
  CHECK(effective_eta(0.0, 0.1, 1, 1, 1e-3) == 0.0);
  const double w = 2e-3, h = 0.2;
  CHECK(effective_eta(w * std::pow(h, 1.0), h, 1, 2, w) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(effective_eta(1e-4, 0.1, 1, 1, 1e-3) == doctest::Approx(0.31622776601683794).epsilon(1e-12));
  CHECK_THROWS_AS(effective_eta(1e-4, 0.1, 1, 1, 0.0), InvalidParameter);
}

TEST_CASE("C_sigma") {
  const auto& S = quartic_025();
  const double c = c_sigma(S, 1);
  CHECK(c == doctest::Approx(c_sigma(S, 1, CSigmaConvention::paper_literal)).epsilon(1e-15));
  CHECK(c == doctest::Approx(lp_power(S.phi_L, 4.0)).epsilon(1e-10));
  CHECK(c_sigma(S, 2) != doctest::Approx(c_sigma(S, 2, CSigmaConvention::paper_literal)));

  // C_1 hbar^{1/2} stays within fixed bounds across hbar. The harmonic well-bottom
  // Gaussian gives C_1 sqrt(hbar) = sqrt(sqrt(beta) a / pi) = 0.564.
  const Potential V = builtin_quartic(1.0, 1.0);
  for (double hbar : {0.3, 0.2, 0.1, 0.05}) {
    const SpectralData s = lowest_eigenpairs(V, Grid(1, 4.0, 512), hbar, 2);
    const double scaled = c_sigma(s, 1) * std::sqrt(hbar);
    CHECK(scaled > 0.4);
    CHECK(scaled < 0.8);
  }
}

TEST_CASE("eigensolver errors") {
  const Potential V = builtin_quartic(1.0, 1.0);
  CHECK_THROWS_AS(lowest_eigenpairs(V, Grid(1, 4.0, 128), 0.25, 1), InvalidParameter);
  CHECK_THROWS_AS(lowest_eigenpairs(V, Grid(2, 4.0, 32), 0.25, 2), GridMismatch);
  CHECK_THROWS_AS(lowest_eigenpairs(V, Grid(1, 2.5, 128), 0.25, 2), InvalidParameter);
  EigenOptions tight;
  tight.max_iterations = 3;
  CHECK_THROWS_AS(lowest_eigenpairs(V, Grid(1, 4.0, 256), 0.25, 3, 1e-10, 1, tight), SolverError);
}
