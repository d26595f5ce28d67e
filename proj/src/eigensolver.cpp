#include "dwnls/eigensolver.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "dwnls/errors.hpp"
#include "dwnls/parallel.hpp"

namespace dwnls {

std::string to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

FieldC symmetrize(const FieldC& f, Parity p) {
  const double s = p == Parity::even ? 1.0 : -1.0;
  FieldC out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = 0.5 * (f[i] + s * f[f.grid.reflect(i)]);
  return out;
}

namespace {

struct SectorPairs {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;  // unit Euclidean norm
  std::vector<double> residuals;             // Euclidean residual of the unit vector
};

void project_sector(std::vector<double>& v, const Grid& g, double sign) {
  std::vector<double> tmp(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) tmp[i] = 0.5 * (v[i] + sign * v[g.reflect(i)]);
  v.swap(tmp);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::size_t sector_dimension(const Grid& g, Parity p) {
  const std::size_t n = static_cast<std::size_t>(g.points_per_axis());
  const std::size_t line = p == Parity::even ? n / 2 + 1 : n / 2 - 1;
  return g.dim() == 1 ? line : line * n;
}

// Lowest `want` eigenpairs of H restricted to one parity sector.
SectorPairs lanczos_sector(const Hamiltonian& H, Parity parity, int want, double tol,
                           std::uint64_t seed, const EigenOptions& opts) {
  const Grid& g = H.grid();
  const std::size_t N = g.size();
  const double sign = parity == Parity::even ? 1.0 : -1.0;
  const std::size_t max_dim =
      std::min<std::size_t>(sector_dimension(g, parity), static_cast<std::size_t>(opts.max_iterations));
  if (static_cast<std::size_t>(want) > max_dim)
    throw InvalidParameter("requested more eigenpairs than the parity sector holds");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> q(N);
  for (auto& x : q) x = uni(rng);
  project_sector(q, g, sign);
  {
    const double nq = std::sqrt(dot(q, q));
    for (auto& x : q) x /= nq;
  }

  std::vector<std::vector<double>> basis;
  std::vector<double> alpha, beta;
  std::vector<cplx> in(N), out(N);
  std::vector<double> w(N);

  auto apply = [&](const std::vector<double>& v, std::vector<double>& res) {
    for (std::size_t i = 0; i < N; ++i) in[i] = v[i];
    H.apply(in, out);
    for (std::size_t i = 0; i < N; ++i) res[i] = out[i].real();
  };

  auto ritz = [&](std::size_t m, Eigen::VectorXd& theta, Eigen::MatrixXd& S) {
    Eigen::VectorXd d(m), e(m > 1 ? m - 1 : 1);
    for (std::size_t i = 0; i < m; ++i) d[i] = alpha[i];
    for (std::size_t i = 0; i + 1 < m; ++i) e[i] = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e.head(m > 1 ? m - 1 : 0), Eigen::ComputeEigenvectors);
    theta = es.eigenvalues();
    S = es.eigenvectors();
  };

  auto assemble = [&](std::size_t m, const Eigen::MatrixXd& S) {
    SectorPairs out_pairs;
    std::vector<double> r(N);
    for (int k = 0; k < want; ++k) {
      std::vector<double> y(N, 0.0);
      for (std::size_t j = 0; j < m; ++j) {
        const double c = S(static_cast<Eigen::Index>(j), k);
        const auto& b = basis[j];
        for (std::size_t i = 0; i < N; ++i) y[i] += c * b[i];
      }
      project_sector(y, g, sign);
      const double ny = std::sqrt(dot(y, y));
      for (auto& x : y) x /= ny;
      apply(y, r);
      const double lam = dot(y, r);
      for (std::size_t i = 0; i < N; ++i) r[i] -= lam * y[i];
      out_pairs.values.push_back(lam);
      out_pairs.residuals.push_back(std::sqrt(dot(r, r)));
      out_pairs.vectors.push_back(std::move(y));
    }
    return out_pairs;
  };

  auto converged = [&](const SectorPairs& p) {
    for (int k = 0; k < want; ++k)
      if (!(p.residuals[k] <= tol * std::abs(p.values[k]))) return false;
    return true;
  };

  SectorPairs best;
  bool invariant = false;
  for (std::size_t j = 0; j < max_dim; ++j) {
    basis.push_back(q);
    apply(q, w);
    project_sector(w, g, sign);
    const double a = dot(q, w);
    alpha.push_back(a);
    for (std::size_t i = 0; i < N; ++i) w[i] -= a * q[i];
    if (j > 0) {
      const auto& qp = basis[j - 1];
      for (std::size_t i = 0; i < N; ++i) w[i] -= beta[j - 1] * qp[i];
    }
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const double c = dot(b, w);
        for (std::size_t i = 0; i < N; ++i) w[i] -= c * b[i];
      }
    }
    const double bnorm = std::sqrt(dot(w, w));
    beta.push_back(bnorm);
    const std::size_t m = j + 1;
    invariant = bnorm <= 1e-13 * std::abs(a) || m == max_dim;

    const bool check_now = m >= static_cast<std::size_t>(want) &&
                           (invariant || m % static_cast<std::size_t>(opts.check_every) == 0);
    if (check_now) {
      Eigen::VectorXd theta;
      Eigen::MatrixXd S;
      ritz(m, theta, S);
      bool estimate_ok = true;
      for (int k = 0; k < want; ++k) {
        const double est = bnorm * std::abs(S(static_cast<Eigen::Index>(m - 1), k));
        if (!(est <= 0.1 * tol * std::abs(theta[k]))) estimate_ok = false;
      }
      if (estimate_ok || invariant) {
        best = assemble(m, S);
        if (converged(best)) return best;
      }
    }
    if (invariant) break;
    for (std::size_t i = 0; i < N; ++i) q[i] = w[i] / bnorm;
  }

  std::ostringstream os;
  os << "Lanczos did not converge in the " << to_string(parity) << " sector after "
     << basis.size() << " iterations";
  throw SolverError(os.str(), best.residuals);
}

FieldC to_field(const Grid& g, const std::vector<double>& v) {
  FieldC f(g);
  const double scale = 1.0 / std::sqrt(g.cell_volume());
  for (std::size_t i = 0; i < v.size(); ++i) f[i] = v[i] * scale;
  return f;
}

// Deterministic sign: positive at the grid point nearest x_+, or, when the field
// vanishes there, positive mass-weighted on the x1 > 0 half.
void fix_sign(FieldC& f, const Potential& V) {
  double peak = 0.0;
  for (const auto& z : f.values) peak = std::max(peak, std::abs(z.real()));
  double ref = f[f.grid.nearest(V.x_plus())].real();
  if (std::abs(ref) <= 1e-8 * peak) {
    ref = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f.grid.point(i)[0] > 0.0) ref += f[i].real();
  }
  if (ref < 0.0)
    for (auto& z : f.values) z = -z;
}

}  // namespace

SpectralData lowest_eigenpairs(const Potential& V, const Grid& grid, double hbar, int k, double tol,
                               std::uint64_t seed, const EigenOptions& opts) {
  if (k < 2) throw InvalidParameter("lowest_eigenpairs: k must be at least 2");
  if (grid.dim() != V.dim()) throw GridMismatch("grid and potential dimensions differ");
  const double reach = std::max({std::abs(V.x_plus()[0]), std::abs(V.x_plus()[1]), std::abs(V.x_minus()[0]),
                                 std::abs(V.x_minus()[1])});
  if (!(grid.half_width() > 3.0 * reach))
    throw InvalidParameter("box too small: L must exceed 3 max |x_pm| components");
  auto H = std::make_shared<const Hamiltonian>(V, grid, hbar);

  const int per_sector = k - 1;
  const SectorPairs even = lanczos_sector(*H, Parity::even, per_sector, tol, seed, opts);
  const SectorPairs odd = lanczos_sector(*H, Parity::odd, per_sector, tol, seed + 1, opts);

  if (!(even.values[0] < odd.values[0]))
    throw ConsistencyError("even ground state lies above the odd ground state (lambda1 >= lambda2)");

  struct Entry {
    double value;
    const std::vector<double>* vec;
    double residual;
    Parity parity;
  };
  std::vector<Entry> rest;
  for (int i = 1; i < per_sector; ++i) {
    rest.push_back({even.values[i], &even.vectors[i], even.residuals[i], Parity::even});
    rest.push_back({odd.values[i], &odd.vectors[i], odd.residuals[i], Parity::odd});
  }
  std::stable_sort(rest.begin(), rest.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });

  std::vector<Entry> chosen = {{even.values[0], &even.vectors[0], even.residuals[0], Parity::even},
                               {odd.values[0], &odd.vectors[0], odd.residuals[0], Parity::odd}};
  for (int i = 0; i < k - 2; ++i) chosen.push_back(rest[i]);

  SpectralData S;
  S.hbar = hbar;
  S.seed = seed;
  S.hamiltonian = H;
  for (const auto& e : chosen) {
    FieldC f = to_field(grid, *e.vec);
    fix_sign(f, V);
    S.eigenvalues.push_back(e.value);
    S.eigenvectors.push_back(std::move(f));
    S.parities.push_back(e.parity);
    S.residuals.push_back(e.residual);
  }
  for (int j = 0; j < 2; ++j)
    if (tail_mass(S.eigenvectors[j]) >= 1e-10)
      throw InvalidParameter("box too small: phi" + std::to_string(j + 1) + " has tail mass >= 1e-10 near the boundary");
  S.omega_mean = 0.5 * (S.eigenvalues[0] + S.eigenvalues[1]);
  S.omega_split = 0.5 * (S.eigenvalues[1] - S.eigenvalues[0]);
  const double r2 = 1.0 / std::sqrt(2.0);
  S.phi_R = r2 * (S.eigenvectors[0] + S.eigenvectors[1]);
  S.phi_L = r2 * (S.eigenvectors[0] - S.eigenvectors[1]);
  return S;
}

LocalizationReport localization_report(const SpectralData& S, const Potential& V, double r) {
  const double sep = std::hypot(V.x_plus()[0] - V.x_minus()[0], V.x_plus()[1] - V.x_minus()[1]);
  if (!(r > 0.0) || !(r < 0.5 * sep))
    throw InvalidParameter("localization radius must lie in (0, |x_+ - x_-| / 2)");
  const Grid& g = S.grid();
  LocalizationReport rep;
  rep.radius = r;
  auto in_ball = [&](const Point& x, const Point& c) { return std::hypot(x[0] - c[0], x[1] - c[1]) < r; };
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.point(i);
    const double pr = std::norm(S.phi_R[i]), pl = std::norm(S.phi_L[i]);
    if (in_ball(x, V.x_plus())) {
      rep.mass_R_plus += pr;
      rep.mass_L_plus += pl;
    }
    if (in_ball(x, V.x_minus())) {
      rep.mass_R_minus += pr;
      rep.mass_L_minus += pl;
    }
    rep.overlap_sup = std::max(rep.overlap_sup, std::abs(S.phi_R[i] * S.phi_L[i]));
  }
  const double w = g.cell_volume();
  rep.mass_R_plus *= w;
  rep.mass_R_minus *= w;
  rep.mass_L_plus *= w;
  rep.mass_L_minus *= w;
  return rep;
}

int default_thread_count() {
  if (const char* env = std::getenv("DWNLS_NUM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

bool SweepTable::partial() const {
  return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.failed; });
}

namespace {

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

}  // namespace

SweepTable splitting_sweep(const Potential& V, const Grid& grid, const std::vector<double>& hbars,
                           double tol, std::uint64_t seed, int threads) {
  if (hbars.size() < 4) throw InvalidParameter("splitting_sweep needs at least 4 hbar values");
  for (double h : hbars)
    if (!(h > 0.0)) throw InvalidParameter("splitting_sweep: hbar values must be positive");

  SweepTable table;
  table.rows.resize(hbars.size());
  const auto errors = parallel_for_index(hbars.size(), threads > 0 ? threads : default_thread_count(),
                                         [&](std::size_t i) {
                                           const auto S = lowest_eigenpairs(V, grid, hbars[i], 2, tol, seed);
                                           auto& row = table.rows[i];
                                           row.hbar = hbars[i];
                                           row.lambda1 = S.eigenvalues[0];
                                           row.lambda2 = S.eigenvalues[1];
                                           row.omega = S.omega_split;
                                           row.Omega = S.omega_mean;
                                         });

  std::vector<double> inv_h, log_h, log_w;
  for (std::size_t i = 0; i < hbars.size(); ++i) {
    auto& row = table.rows[i];
    if (errors[i]) {
      row.hbar = hbars[i];
      row.failed = true;
      row.in_fit = false;
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& e) {
        table.warnings.push_back("hbar=" + std::to_string(hbars[i]) + ": " + e.what());
      }
      continue;
    }
    if (!(row.omega > kOmegaFloor)) {
      row.in_fit = false;
      table.warnings.push_back("hbar=" + std::to_string(row.hbar) +
                               ": splitting below the double-precision floor, excluded from fit");
      continue;
    }
    inv_h.push_back(1.0 / row.hbar);
    log_h.push_back(std::log(row.hbar));
    log_w.push_back(std::log(row.omega));
  }
  if (inv_h.size() >= 2) {
    const auto f = fit_line(inv_h, log_w);
    table.slope = f.slope;
    table.intercept = f.intercept;
    table.r2 = f.r2;
    table.r2_power = fit_line(log_h, log_w).r2;
  } else {
    table.warnings.push_back("fewer than two usable points, no fit");
  }
  return table;
}

double effective_eta(double epsilon, double hbar, int sigma, int dim, double omega_split) {
  if (!(omega_split > 0.0)) throw InvalidParameter("effective_eta: omega must be positive");
  return epsilon * std::pow(hbar, -0.5 * dim * sigma) / omega_split;
}

double c_sigma(const SpectralData& S, int sigma, CSigmaConvention conv) {
  if (sigma < 1) throw InvalidParameter("c_sigma: sigma must be a positive integer");
  const double p = conv == CSigmaConvention::projected ? 2.0 * sigma + 2.0 : 4.0 * sigma;
  const double cr = lp_power(S.phi_R, p);
  const double cl = lp_power(S.phi_L, p);
  if (std::abs(cr - cl) > 1e-10)
    throw ConsistencyError("C_sigma differs between phi_R and phi_L");
  return cr;
}

}  // namespace dwnls
