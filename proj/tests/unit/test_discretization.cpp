#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "dwnls/discretization.hpp"
#include "dwnls/eigensolver.hpp"
#include "dwnls/errors.hpp"

using namespace dwnls;

namespace {

FieldC random_field(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  FieldC f(g);
  for (auto& z : f.values) z = {n(rng), n(rng)};
  return f;
}

FieldC gaussian(const Grid& g, double hbar) {
  FieldC f(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = g.point(i)[0];
    f[i] = std::exp(-x * x / (2.0 * hbar));
  }
  return f;
}

double sup_diff(const FieldC& a, const FieldC& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Potential zero_potential(int dim) {
  return Potential::custom(dim, [](const Point&) { return 0.0; }, {0, 0}, {0, 0}, 0.0, 0.0, "zero");
}

}  // namespace

TEST_CASE("grid construction") {
  CHECK_THROWS_AS(Grid(1, 4.0, 100), InvalidParameter);
  CHECK_THROWS_AS(Grid(3, 4.0, 64), InvalidParameter);
  CHECK_THROWS_AS(Grid(1, -1.0, 64), InvalidParameter);
  const Grid g(2, 4.0, 8);
  CHECK(g.size() == 64);
  CHECK(g.spacing() == doctest::Approx(1.0));
  CHECK(g.point(g.reflect(3 * 8 + 5))[0] == doctest::Approx(-g.point(3 * 8 + 5)[0]));
  CHECK(g.point(g.reflect(3 * 8 + 5))[1] == doctest::Approx(g.point(3 * 8 + 5)[1]));
  CHECK(g.nearest({1.0, -2.0}) == 5 * 8 + 2);
}

TEST_CASE("inner product") {
  const Grid g(1, 4.0, 64);
  SUBCASE("normalized constant") {
    FieldC f(g);
    for (auto& z : f.values) z = 1.0 / std::sqrt(2.0 * g.half_width());
    CHECK(inner(f, f).real() == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("Hermitian symmetry") {
    const FieldC f = random_field(g, 1), h = random_field(g, 2);
    CHECK(std::abs(inner(f, h) - std::conj(inner(h, f))) < 1e-12);
  }
  SUBCASE("discrete Fourier modes are orthogonal") {
    FieldC a(g), b(g);
    const double k1 = 3 * M_PI / g.half_width(), k2 = 7 * M_PI / g.half_width();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.point(i)[0];
      a[i] = std::polar(1.0, k1 * x);
      b[i] = std::polar(1.0, k2 * x);
    }
    CHECK(std::abs(inner(a, b)) <= 1e-12);
  }
  SUBCASE("grid mismatch") {
    CHECK_THROWS_AS(inner(FieldC(g), FieldC(Grid(1, 4.0, 32))), GridMismatch);
  }
}

TEST_CASE("apply_H0") {
  SUBCASE("plane wave with V = 0") {
    const Grid g(2, 3.0, 32);
    const double hbar = 0.3;
    const double k1 = 2 * M_PI / g.half_width(), k2 = -5 * M_PI / g.half_width();
    FieldC f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point x = g.point(i);
      f[i] = std::polar(1.0, k1 * x[0] + k2 * x[1]);
    }
    const FieldC Hf = apply_H0(f, zero_potential(2), hbar);
    CHECK(sup_diff(Hf, cplx(hbar * hbar * (k1 * k1 + k2 * k2)) * f) < 1e-10);
  }
  SUBCASE("real even input stays real and even") {
    const Grid g(1, 4.0, 128);
    const Potential V = builtin_quartic(1.0, 1.0);
    FieldC f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.point(i)[0];
      f[i] = std::exp(-x * x) * (1.0 + x * x);
    }
    const FieldC Hf = apply_H0(f, V, 0.2);
    for (std::size_t i = 0; i < g.size(); ++i) {
      REQUIRE(std::abs(Hf[i].imag()) < 1e-12);
      REQUIRE(std::abs(Hf[i] - Hf[g.reflect(i)]) < 1e-12);
    }
  }
  SUBCASE("harmonic ground state") {
    const double hbar = 0.1;
    const Grid g(1, 8.0, 1024);
    const FieldC f = gaussian(g, hbar);
    const FieldC Hf = apply_H0(f, builtin_harmonic(1.0, 1), hbar);
    CHECK(sup_diff(Hf, cplx(1.0 + hbar) * f) < 1e-8);
  }
  SUBCASE("spectral accuracy on the Gaussian") {
    const double hbar = 0.1;
    auto err = [&](int n) {
      const Grid g(1, 8.0, n);
      const FieldC f = gaussian(g, hbar);
      return sup_diff(apply_H0(f, builtin_harmonic(1.0, 1), hbar), cplx(1.0 + hbar) * f);
    };
    CHECK(err(32) >= 100.0 * err(64));
  }
}

TEST_CASE("H0 is symmetric and bounded below by v_min") {
  const Grid g(1, 4.0, 128);
  const Potential V = builtin_quartic(1.0, 1.0);
  const Hamiltonian H(V, g, 0.2);
  for (unsigned s = 0; s < 5; ++s) {
    const FieldC f = random_field(g, 10 + s), h = random_field(g, 20 + s);
    CHECK(std::abs(inner(f, H.apply(h)) - std::conj(inner(h, H.apply(f)))) < 1e-11 * (1.0 + std::abs(inner(f, H.apply(h)))));
    CHECK(H.expectation(f) >= V.v_min() * inner(f, f).real() - 1e-10);
  }
}

TEST_CASE("Parseval") {
  const Grid g(2, 4.0, 32);
  FieldC f = random_field(g, 3);
  const double pos = inner(f, f).real();
  FieldC F = f;
  fft_for(g).forward(F.values);
  double spec = 0.0;
  for (const auto& z : F.values) spec += std::norm(z);
  spec *= g.cell_volume() / static_cast<double>(g.size());
  CHECK(std::abs(pos - spec) <= 1e-12 * pos);
  fft_for(g).backward(F.values);
  CHECK(sup_diff(F, f) < 1e-12);
}

TEST_CASE("X_s norms") {
  const Grid g(1, 4.0, 256);
  const Potential V = builtin_quartic(1.0, 1.0);
  const double hbar = 0.25;
  FieldC f = random_field(g, 5);
  f = cplx(1.0 / norm0(f)) * f;
  CHECK(norm_Xs(f, V, hbar, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(norm_Xs(f, V, hbar, 1) >= 1.0);
  CHECK_THROWS_AS(norm_Xs(f, V, hbar, 2), InvalidParameter);

  const SpectralData S = lowest_eigenpairs(V, g, hbar, 2);
  const double n1 = norm_Xs(S.eigenvectors[0], V, hbar, 1);
  CHECK(std::abs(n1 * n1 - S.eigenvalues[0]) <= 1e-8);

  const Potential negative = Potential::custom(1, [](const Point&) { return -1.0; }, {0, 0}, {0, 0}, -1.0, 0.0);
  FieldC c(g);
  for (auto& z : c.values) z = 1.0;
  CHECK_THROWS_AS(norm_Xs(c, negative, hbar, 1), ConsistencyError);
}

TEST_CASE("field arithmetic and helpers") {
  const Grid g(1, 4.0, 64);
  FieldC c(g);
  for (auto& z : c.values) z = 1.0 / std::sqrt(8.0);
  CHECK(lp_power(c, 4.0) == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
  FieldC d = c + c;
  axpy(-2.0, c, d);
  CHECK(norm0(d) < 1e-15);
  CHECK(tail_mass(c) == doctest::Approx(inner(c, c).real() * 0.1).epsilon(0.2));
  CHECK_THROWS_AS(FieldC(g, std::vector<cplx>(3)), InvalidParameter);
}

TEST_CASE("snapshot round trip") {
  const Grid g(2, 3.0, 16);
  const FieldC f = random_field(g, 7);
  const auto dir = std::filesystem::temp_directory_path() / "dwnls_snapshot_test";
  std::filesystem::create_directories(dir);
  write_snapshot(f, 0.2, 1.5, dir / "psi");
  double hbar = 0, t = 0;
  const FieldC r = read_snapshot(dir / "psi", &hbar, &t);
  CHECK(r.grid == g);
  CHECK(hbar == 0.2);
  CHECK(t == 1.5);
  CHECK(sup_diff(r, f) == 0.0);
  CHECK(std::filesystem::file_size(dir / "psi.bin") == g.size() * 16);
  std::filesystem::remove_all(dir);
}
