#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dwnls {

class Grid;

/// Point in R^d, d <= 2. Unused trailing coordinates are zero.
using Point = std::array<double, 2>;

/// Symmetric double-well potential V(x), normalized so that V(x_pm) = v_min.
///
/// Instances are immutable after construction; `operator()` is pure and may be
/// called concurrently.
class Potential {
 public:
  using Eval = std::function<double(const Point&)>;

  /// Escape hatch for potentials outside the builtin families. No hypothesis is
  /// checked here; run verify_hypotheses() on the result.
  static Potential custom(int dim, Eval eval, Point x_minus, Point x_plus, double v_min,
                          double growth_exponent, std::string family = "custom");

  double operator()(const Point& x) const { return eval_(x); }

  int dim() const { return dim_; }
  const Point& x_minus() const { return x_minus_; }
  const Point& x_plus() const { return x_plus_; }
  double v_min() const { return v_min_; }
  double growth_exponent() const { return growth_exponent_; }
  const std::string& family() const { return family_; }
  const std::map<std::string, double>& params() const { return params_; }

  /// Samples V on every grid point, row-major.
  std::vector<double> sample(const Grid& grid) const;

 private:
  friend Potential builtin_quartic(double, double, const std::vector<double>&);
  friend Potential builtin_harmonic_barrier(double, double, double, int);
  friend Potential builtin_harmonic(double, int);

  Potential() = default;

  int dim_ = 1;
  Eval eval_;
  Point x_minus_{};
  Point x_plus_{};
  double v_min_ = 1.0;
  double growth_exponent_ = 2.0;
  std::string family_;
  std::map<std::string, double> params_;
};

/// V(x) = 1 + beta (x1^2 - a^2)^2 + sum_j omega_j^2 x_j^2, d = 1 + transverse_freqs.size().
Potential builtin_quartic(double a, double beta, const std::vector<double>& transverse_freqs = {});

/// V(x) = 1 + omega0^2 |x|^2 + B exp(-x1^2 / s^2) - shift, shifted so V(x_pm) = 1.
/// Throws InvalidParameter("not a double well") when the barrier is too weak.
Potential builtin_harmonic_barrier(double omega0, double barrier_height, double barrier_width,
                                   int dim);

/// Single well V(x) = 1 + omega0^2 |x|^2. Not an admissible double well; used as a
/// closed-form control (both "minima" sit at the origin).
Potential builtin_harmonic(double omega0, int dim);

struct HypothesisReport {
  bool symmetric = false;
  bool two_minima = false;
  bool above_min_off_minima = false;
  bool hessian_positive = false;
  /// Growth and derivative bounds at infinity cannot be certified on a finite
  /// grid; they are recorded, not checked.
  std::string growth = "assumed";
  std::vector<std::string> failures;

  bool all_pass() const { return symmetric && two_minima && above_min_off_minima && hessian_positive; }
};

/// Checks reflection symmetry, the two-minimum structure and Hessian positivity on
/// the points of `probe_grid`. Never throws for a failed hypothesis.
HypothesisReport verify_hypotheses(const Potential& V, const Grid& probe_grid);

enum class AgmonMethod { closed_form_1d, quadrature_1d, eikonal_2d };
std::string to_string(AgmonMethod m);

struct AgmonResult {
  double gamma = 0.0;
  std::vector<Point> path;  // 2D only
  AgmonMethod method = AgmonMethod::quadrature_1d;
  int resolution = 0;
};

/// Agmon distance Gamma = inf over paths x_- -> x_+ of the integral of sqrt(V - v_min).
///
/// d = 1: composite Gauss-Legendre (4 nodes per panel, `resolution` panels) on
/// the segment [x_-, x_+]. d = 2: Dijkstra on an 8-neighbour lattice with
/// `resolution` nodes between the wells; first-order accurate.
AgmonResult agmon_distance(const Potential& V, int resolution);

/// Exact Gamma for the 1D quartic family, sqrt(beta) 4 a^3 / 3. Empty for
/// every other potential.
std::optional<AgmonResult> agmon_closed_form(const Potential& V);

}  // namespace dwnls
