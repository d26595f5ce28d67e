#include "dwnls/potential.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "dwnls/discretization.hpp"
#include "dwnls/errors.hpp"

namespace dwnls {

Potential Potential::custom(int dim, Eval eval, Point x_minus, Point x_plus, double v_min,
                            double growth_exponent, std::string family) {
  if (dim != 1 && dim != 2) throw InvalidParameter("potential dimension must be 1 or 2");
  if (!eval) throw InvalidParameter("custom potential needs an evaluator");
  Potential V;
  V.dim_ = dim;
  V.eval_ = std::move(eval);
  V.x_minus_ = x_minus;
  V.x_plus_ = x_plus;
  V.v_min_ = v_min;
  V.growth_exponent_ = growth_exponent;
  V.family_ = std::move(family);
  return V;
}

std::vector<double> Potential::sample(const Grid& grid) const {
  if (grid.dim() != dim_) throw GridMismatch("grid and potential dimensions differ");
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = eval_(grid.point(i));
  return out;
}

Potential builtin_quartic(double a, double beta, const std::vector<double>& transverse_freqs) {
  if (!(a > 0.0)) throw InvalidParameter("quartic: a must be positive");
  if (!(beta > 0.0)) throw InvalidParameter("quartic: beta must be positive");
  if (transverse_freqs.size() > 1) throw InvalidParameter("quartic: at most one transverse frequency (d <= 2)");
  const int dim = 1 + static_cast<int>(transverse_freqs.size());
  const double w2 = dim == 2 ? transverse_freqs[0] * transverse_freqs[0] : 0.0;

  Potential V;
  V.dim_ = dim;
  V.eval_ = [a, beta, w2](const Point& x) {
    const double q = x[0] * x[0] - a * a;
    return 1.0 + beta * q * q + w2 * x[1] * x[1];
  };
  V.x_minus_ = {-a, 0.0};
  V.x_plus_ = {a, 0.0};
  V.v_min_ = 1.0;
  V.growth_exponent_ = 4.0;
  V.family_ = "quartic";
  V.params_ = {{"a", a}, {"beta", beta}};
  if (dim == 2) V.params_["omega2"] = transverse_freqs[0];
  return V;
}

namespace {

// Positive root of g'(x) = 2 w^2 x - (2 B x / s^2) exp(-x^2 / s^2), Newton with a
// bisection safeguard.
double barrier_minimum(double omega0, double B, double s) {
  const double w2 = omega0 * omega0;
  auto dg = [&](double x) { return 2.0 * w2 * x - 2.0 * B * x / (s * s) * std::exp(-x * x / (s * s)); };
  auto d2g = [&](double x) {
    const double e = std::exp(-x * x / (s * s));
    return 2.0 * w2 - 2.0 * B / (s * s) * e * (1.0 - 2.0 * x * x / (s * s));
  };

  double lo = 1e-6 * s;
  if (!(dg(lo) < 0.0)) throw InvalidParameter("harmonic_barrier: not a double well");
  double hi = s;
  while (dg(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e6) throw InvalidParameter("harmonic_barrier: minimum not bracketed");
  }

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = dg(x);
    if (f < 0.0) lo = x; else hi = x;
    const double fp = d2g(x);
    double next = fp > 0.0 ? x - f / fp : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double dx = std::abs(next - x);
    x = next;
    if (dx < 1e-12 || hi - lo < 1e-12) break;
  }
  return x;
}

}  // namespace

Potential builtin_harmonic_barrier(double omega0, double barrier_height, double barrier_width,
                                   int dim) {
  if (!(omega0 > 0.0) || !(barrier_height > 0.0) || !(barrier_width > 0.0))
    throw InvalidParameter("harmonic_barrier: not a double well (parameters must be positive)");
  if (dim != 1 && dim != 2) throw InvalidParameter("harmonic_barrier: dimension must be 1 or 2");
  const double B = barrier_height, s = barrier_width, w2 = omega0 * omega0;
  const double xp = barrier_minimum(omega0, B, s);
  const double shift = w2 * xp * xp + B * std::exp(-xp * xp / (s * s));

  Potential V;
  V.dim_ = dim;
  V.eval_ = [w2, B, s, shift, dim](const Point& x) {
    const double r2 = x[0] * x[0] + (dim == 2 ? x[1] * x[1] : 0.0);
    return 1.0 + w2 * r2 + B * std::exp(-x[0] * x[0] / (s * s)) - shift;
  };
  V.x_minus_ = {-xp, 0.0};
  V.x_plus_ = {xp, 0.0};
  V.v_min_ = 1.0;
  V.growth_exponent_ = 2.0;
  V.family_ = "harmonic_barrier";
  V.params_ = {{"omega0", omega0}, {"barrier_height", B}, {"barrier_width", s}};
  return V;
}

Potential builtin_harmonic(double omega0, int dim) {
  if (!(omega0 > 0.0)) throw InvalidParameter("harmonic: omega0 must be positive");
  if (dim != 1 && dim != 2) throw InvalidParameter("harmonic: dimension must be 1 or 2");
  const double w2 = omega0 * omega0;
  Potential V;
  V.dim_ = dim;
  V.eval_ = [w2](const Point& x) { return 1.0 + w2 * (x[0] * x[0] + x[1] * x[1]); };
  V.x_minus_ = {0.0, 0.0};
  V.x_plus_ = {0.0, 0.0};
  V.v_min_ = 1.0;
  V.growth_exponent_ = 2.0;
  V.family_ = "harmonic";
  V.params_ = {{"omega0", omega0}};
  return V;
}

namespace {

double dist(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

// Central-difference Hessian; returns {H11, H12, H22}.
std::array<double, 3> hessian(const Potential& V, const Point& x, double h) {
  auto at = [&](double d0, double d1) { return V({x[0] + d0, x[1] + d1}); };
  const double f0 = at(0, 0);
  const double h11 = (at(h, 0) - 2 * f0 + at(-h, 0)) / (h * h);
  if (V.dim() == 1) return {h11, 0.0, 0.0};
  const double h22 = (at(0, h) - 2 * f0 + at(0, -h)) / (h * h);
  const double h12 = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
  return {h11, h12, h22};
}

}  // namespace

HypothesisReport verify_hypotheses(const Potential& V, const Grid& probe_grid) {
  HypothesisReport rep;
  const Grid& g = probe_grid;
  if (g.dim() != V.dim()) throw GridMismatch("probe grid dimension differs from potential");
  const auto vals = V.sample(g);
  const int n = g.points_per_axis();
  const double h = g.spacing();
  const double reach = std::sqrt(static_cast<double>(g.dim())) * h;

  rep.symmetric = true;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    Point p = g.point(i);
    Point q = p;
    q[0] = -q[0];
    if (std::abs(V(q) - vals[i]) > 1e-12 * (1.0 + std::abs(vals[i]))) {
      rep.symmetric = false;
      std::ostringstream os;
      os << "reflection symmetry broken at x1 = " << p[0];
      rep.failures.push_back(os.str());
      break;
    }
  }

  // Discrete local minima close to the global minimum.
  const double gmin = *std::min_element(vals.begin(), vals.end());
  std::vector<std::size_t> candidates;
  for (std::size_t flat = 0; flat < vals.size(); ++flat) {
    const int i0 = g.dim() == 1 ? static_cast<int>(flat) : static_cast<int>(flat / n);
    const int i1 = g.dim() == 1 ? 0 : static_cast<int>(flat % n);
    bool local = true;
    for (int d0 = -1; d0 <= 1 && local; ++d0) {
      for (int d1 = (g.dim() == 2 ? -1 : 0); d1 <= (g.dim() == 2 ? 1 : 0) && local; ++d1) {
        if (d0 == 0 && d1 == 0) continue;
        const int j0 = i0 + d0, j1 = i1 + d1;
        if (j0 < 0 || j0 >= n || j1 < 0 || (g.dim() == 2 && j1 >= n)) continue;
        const std::size_t nb = g.dim() == 1 ? static_cast<std::size_t>(j0)
                                            : static_cast<std::size_t>(j0) * n + j1;
        if (vals[nb] < vals[flat]) local = false;
      }
    }
    if (local && vals[flat] <= gmin + 1e-6 * (1.0 + std::abs(gmin))) candidates.push_back(flat);
  }
  const bool distinct = dist(V.x_minus(), V.x_plus()) > 2 * reach;
  bool near_minus = false, near_plus = false, stray = false;
  for (auto c : candidates) {
    const Point p = g.point(c);
    const bool m = dist(p, V.x_minus()) <= reach;
    const bool pl = dist(p, V.x_plus()) <= reach;
    near_minus |= m;
    near_plus |= pl;
    if (!m && !pl) stray = true;
  }
  const bool min_values = std::abs(V(V.x_minus()) - V.v_min()) <= 1e-10 * (1.0 + V.v_min()) &&
                          std::abs(V(V.x_plus()) - V.v_min()) <= 1e-10 * (1.0 + V.v_min());
  rep.two_minima = distinct && candidates.size() == 2 && near_minus && near_plus && !stray && min_values;
  if (!rep.two_minima) {
    std::ostringstream os;
    os << "expected two global minimizers near x_-/x_+, found " << candidates.size();
    if (!distinct) os << " (x_- and x_+ coincide)";
    if (!min_values) os << " (V(x_pm) != v_min)";
    rep.failures.push_back(os.str());
  }

  rep.above_min_off_minima = true;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const Point p = g.point(i);
    if (dist(p, V.x_minus()) <= reach || dist(p, V.x_plus()) <= reach) continue;
    if (!(vals[i] > V.v_min())) {
      rep.above_min_off_minima = false;
      rep.failures.push_back("V <= v_min away from the minima");
      break;
    }
  }

  rep.hessian_positive = true;
  for (const Point& m : {V.x_minus(), V.x_plus()}) {
    const auto H = hessian(V, m, 1e-4);
    const bool pd = V.dim() == 1 ? H[0] > 0.0 : (H[0] > 0.0 && H[0] * H[2] - H[1] * H[1] > 0.0);
    if (!pd) {
      rep.hessian_positive = false;
      rep.failures.push_back("Hessian at a minimum is not positive definite");
      break;
    }
  }
  return rep;
}

std::string to_string(AgmonMethod m) {
  switch (m) {
    case AgmonMethod::closed_form_1d: return "closed_form_1d";
    case AgmonMethod::quadrature_1d: return "quadrature_1d";
    case AgmonMethod::eikonal_2d: return "eikonal_2d";
  }
  return "unknown";
}

namespace {

double agmon_weight(const Potential& V, const Point& x) {
  return std::sqrt(std::max(V(x) - V.v_min(), 0.0));
}

AgmonResult agmon_1d(const Potential& V, int resolution) {
  using boost::math::quadrature::gauss;
  const double a = V.x_minus()[0], b = V.x_plus()[0];
  const double width = (b - a) / resolution;
  double sum = 0.0;
  for (int p = 0; p < resolution; ++p) {
    const double lo = a + p * width;
    sum += gauss<double, 4>::integrate([&](double x) { return agmon_weight(V, {x, 0.0}); }, lo,
                                       lo + width);
  }
  AgmonResult r;
  r.gamma = sum;
  r.method = AgmonMethod::quadrature_1d;
  r.resolution = resolution;
  return r;
}

AgmonResult agmon_2d(const Potential& V, int resolution) {
  const Point xm = V.x_minus(), xp = V.x_plus();
  const double h = (xp[0] - xm[0]) / resolution;
  const int pad = resolution / 4;
  const int nx = resolution + 2 * pad + 1;
  const int half_y = (3 * resolution) / 4;
  const int ny = 2 * half_y + 1;
  auto coord = [&](int i, int j) -> Point { return {xm[0] + (i - pad) * h, xm[1] + (j - half_y) * h}; };
  auto idx = [&](int i, int j) { return static_cast<std::size_t>(i) * ny + j; };

  std::vector<double> w(static_cast<std::size_t>(nx) * ny);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) w[idx(i, j)] = agmon_weight(V, coord(i, j));

  const std::size_t src = idx(pad, half_y), dst = idx(pad + resolution, half_y);
  std::vector<double> best(w.size(), std::numeric_limits<double>::infinity());
  std::vector<std::size_t> prev(w.size(), w.size());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  best[src] = 0.0;
  queue.emplace(0.0, src);
  const double diag = std::sqrt(2.0) * h;
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (d > best[u]) continue;
    if (u == dst) break;
    const int i = static_cast<int>(u / ny), j = static_cast<int>(u % ny);
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        const int a = i + di, b = j + dj;
        if (a < 0 || a >= nx || b < 0 || b >= ny) continue;
        const std::size_t v = idx(a, b);
        const double len = (di != 0 && dj != 0) ? diag : h;
        const double cand = d + len * 0.5 * (w[u] + w[v]);
        if (cand < best[v]) {
          best[v] = cand;
          prev[v] = u;
          queue.emplace(cand, v);
        }
      }
    }
  }

  AgmonResult r;
  r.gamma = best[dst];
  r.method = AgmonMethod::eikonal_2d;
  r.resolution = resolution;
  for (std::size_t u = dst; u != w.size(); u = prev[u]) {
    r.path.push_back(coord(static_cast<int>(u / ny), static_cast<int>(u % ny)));
    if (u == src) break;
  }
  std::reverse(r.path.begin(), r.path.end());
  return r;
}

}  // namespace

AgmonResult agmon_distance(const Potential& V, int resolution) {
  if (resolution < 64) throw InvalidParameter("agmon_distance: resolution must be at least 64");
  if (!(V.x_plus()[0] - V.x_minus()[0] > 0.0))
    throw InvalidParameter("agmon_distance: the wells are not separated (x_- == x_+)");
  return V.dim() == 1 ? agmon_1d(V, resolution) : agmon_2d(V, resolution);
}

std::optional<AgmonResult> agmon_closed_form(const Potential& V) {
  if (V.family() != "quartic" || V.dim() != 1) return std::nullopt;
  const double a = V.params().at("a"), beta = V.params().at("beta");
  AgmonResult r;
  r.gamma = std::sqrt(beta) * 4.0 * a * a * a / 3.0;
  r.method = AgmonMethod::closed_form_1d;
  return r;
}

}  // namespace dwnls
