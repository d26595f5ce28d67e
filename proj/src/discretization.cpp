#include "dwnls/discretization.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include "json.hpp"

#include "dwnls/errors.hpp"

namespace dwnls {

Grid::Grid(int dim, double half_width, int points_per_axis)
    : dim_(dim), half_width_(half_width), n_(points_per_axis) {
  if (dim != 1 && dim != 2) throw InvalidParameter("grid dimension must be 1 or 2");
  if (!(half_width > 0.0)) throw InvalidParameter("grid half width must be positive");
  if (points_per_axis < 2 || !std::has_single_bit(static_cast<unsigned>(points_per_axis)))
    throw InvalidParameter("points per axis must be a power of two");
  spacing_ = 2.0 * half_width / n_;
  size_ = dim == 1 ? static_cast<std::size_t>(n_) : static_cast<std::size_t>(n_) * n_;
}

double Grid::cell_volume() const { return dim_ == 1 ? spacing_ : spacing_ * spacing_; }

Point Grid::point(std::size_t flat) const {
  if (dim_ == 1) return {coord(static_cast<int>(flat)), 0.0};
  return {coord(static_cast<int>(flat / n_)), coord(static_cast<int>(flat % n_))};
}

std::size_t Grid::reflect(std::size_t flat) const {
  const std::size_t n = static_cast<std::size_t>(n_);
  if (dim_ == 1) return (n - flat) % n;
  const std::size_t i0 = flat / n, i1 = flat % n;
  return ((n - i0) % n) * n + i1;
}

std::size_t Grid::nearest(const Point& x) const {
  auto axis = [&](double c) {
    long i = std::lround((c + half_width_) / spacing_);
    i = ((i % n_) + n_) % n_;
    return static_cast<std::size_t>(i);
  };
  if (dim_ == 1) return axis(x[0]);
  return axis(x[0]) * static_cast<std::size_t>(n_) + axis(x[1]);
}

std::vector<double> Grid::wavenumbers_squared() const {
  std::vector<double> k1(n_);
  const double dk = M_PI / half_width_;
  for (int m = 0; m < n_; ++m) {
    const int signed_m = m < n_ / 2 ? m : m - n_;
    k1[m] = dk * signed_m;
  }
  std::vector<double> k2(size_);
  if (dim_ == 1) {
    for (int m = 0; m < n_; ++m) k2[m] = k1[m] * k1[m];
  } else {
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) k2[static_cast<std::size_t>(a) * n_ + b] = k1[a] * k1[a] + k1[b] * k1[b];
  }
  return k2;
}

FieldC::FieldC(const Grid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw InvalidParameter("field length does not match grid");
}

bool FieldC::all_finite() const {
  for (const auto& z : values)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

namespace {
void require_same_grid(const FieldC& a, const FieldC& b) {
  if (!(a.grid == b.grid)) throw GridMismatch("fields live on different grids");
}
}  // namespace

FieldC operator+(const FieldC& a, const FieldC& b) {
  require_same_grid(a, b);
  FieldC out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

FieldC operator-(const FieldC& a, const FieldC& b) {
  require_same_grid(a, b);
  FieldC out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

FieldC operator*(cplx s, const FieldC& a) {
  FieldC out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return out;
}

void axpy(cplx s, const FieldC& b, FieldC& a) {
  require_same_grid(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
}

void SimConfig::validate() const {
  if (!(hbar > 0.0)) throw InvalidParameter("hbar must be positive");
  if (sigma < 1) throw InvalidParameter("sigma must be a positive integer");
  if (!(dt > 0.0)) throw InvalidParameter("dt must be positive");
  if (dim != 1 && dim != 2) throw InvalidParameter("dimension must be 1 or 2");
  if (output_stride < 1) throw InvalidParameter("output stride must be >= 1");
}

cplx inner(const FieldC& f, const FieldC& g) {
  require_same_grid(f, g);
  cplx s{};
  for (std::size_t i = 0; i < f.size(); ++i) s += std::conj(f[i]) * g[i];
  return s * f.grid.cell_volume();
}

double norm0(const FieldC& f) { return std::sqrt(inner(f, f).real()); }

// ---------------------------------------------------------------------------

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Fft::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

Fft::Fft(const Grid& grid) : plans_(std::make_unique<Plans>()), size_(grid.size()) {
  std::vector<cplx> scratch(size_);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  const int n = grid.points_per_axis();
  const int dims[2] = {n, n};
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  plans_->fwd = fftw_plan_dft(grid.dim(), dims, p, p, FFTW_FORWARD, flags);
  plans_->bwd = fftw_plan_dft(grid.dim(), dims, p, p, FFTW_BACKWARD, flags);
}

Fft::~Fft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plans_->fwd);
  fftw_destroy_plan(plans_->bwd);
}

void Fft::forward(std::span<cplx> data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->fwd, p, p);
}

void Fft::backward(std::span<cplx> data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->bwd, p, p);
  const double scale = 1.0 / static_cast<double>(size_);
  for (auto& z : data) z *= scale;
}

const Fft& fft_for(const Grid& grid) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<Fft>> cache;
  auto& slot = cache[{grid.dim(), grid.points_per_axis()}];
  if (!slot) slot = std::make_unique<Fft>(grid);
  return *slot;
}

// ---------------------------------------------------------------------------

Hamiltonian::Hamiltonian(const Potential& V, const Grid& grid, double hbar)
    : grid_(grid), hbar_(hbar), v_min_(V.v_min()), v_(V.sample(grid)), k2_(grid.wavenumbers_squared()) {
  if (!(hbar > 0.0)) throw InvalidParameter("hbar must be positive");
}

void Hamiltonian::apply(std::span<const cplx> in, std::span<cplx> out) const {
  std::copy(in.begin(), in.end(), out.begin());
  const Fft& fft = fft_for(grid_);
  fft.forward(out);
  const double h2 = hbar_ * hbar_;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= h2 * k2_[i];
  fft.backward(out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += v_[i] * in[i];
}

FieldC Hamiltonian::apply(const FieldC& f) const {
  if (!(f.grid == grid_)) throw GridMismatch("field and Hamiltonian grids differ");
  FieldC out(grid_);
  apply(f.values, out.values);
  return out;
}

FieldC Hamiltonian::laplacian(const FieldC& f) const {
  if (!(f.grid == grid_)) throw GridMismatch("field and Hamiltonian grids differ");
  FieldC out = f;
  const Fft& fft = fft_for(grid_);
  fft.forward(out.values);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= -k2_[i];
  fft.backward(out.values);
  return out;
}

double Hamiltonian::expectation(const FieldC& f) const { return inner(f, apply(f)).real(); }

FieldC apply_H0(const FieldC& f, const Potential& V, double hbar) {
  return Hamiltonian(V, f.grid, hbar).apply(f);
}

double norm_Xs(const FieldC& f, const Hamiltonian& H, int s) {
  if (s == 0) return norm0(f);
  if (s != 1) throw InvalidParameter("norm_Xs: only s = 0 and s = 1 are supported");
  const double q = H.expectation(f);
  if (q < -1e-12) throw ConsistencyError("norm_Xs: negative <f, H0 f> for a positive operator");
  return std::sqrt(std::max(q, 0.0));
}

double norm_Xs(const FieldC& f, const Potential& V, double hbar, int s) {
  if (s == 0) return norm0(f);
  return norm_Xs(f, Hamiltonian(V, f.grid, hbar), s);
}

double lp_power(const FieldC& f, double p) {
  double s = 0.0;
  for (const auto& z : f.values) s += std::pow(std::abs(z), p);
  return s * f.grid.cell_volume();
}

double tail_mass(const FieldC& f, double fraction) {
  const double cut = (1.0 - fraction) * f.grid.half_width();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Point x = f.grid.point(i);
    const bool outside = std::abs(x[0]) >= cut || (f.grid.dim() == 2 && std::abs(x[1]) >= cut);
    if (outside) s += std::norm(f[i]);
  }
  return s * f.grid.cell_volume();
}

// ---------------------------------------------------------------------------

namespace {
static_assert(std::endian::native == std::endian::little, "snapshot writer assumes little-endian host");
}

void write_snapshot(const FieldC& f, double hbar, double t, const std::filesystem::path& stem) {
  {
    std::ofstream out(stem.string() + ".bin", std::ios::binary);
    if (!out) throw Error("cannot open snapshot file " + stem.string() + ".bin");
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(cplx)));
  }
  nlohmann::json meta = {{"n", f.grid.points_per_axis()},
                         {"dim", f.grid.dim()},
                         {"L", f.grid.half_width()},
                         {"hbar", hbar},
                         {"t", t}};
  std::ofstream out(stem.string() + ".json");
  out << meta.dump(2) << "\n";
}

FieldC read_snapshot(const std::filesystem::path& stem, double* hbar, double* t) {
  std::ifstream js(stem.string() + ".json");
  if (!js) throw Error("cannot open snapshot sidecar " + stem.string() + ".json");
  const auto meta = nlohmann::json::parse(js);
  const Grid g(meta.at("dim").get<int>(), meta.at("L").get<double>(), meta.at("n").get<int>());
  FieldC f(g);
  std::ifstream in(stem.string() + ".bin", std::ios::binary);
  in.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(cplx)));
  if (!in) throw Error("snapshot payload shorter than its sidecar declares");
  if (hbar) *hbar = meta.at("hbar").get<double>();
  if (t) *t = meta.at("t").get<double>();
  return f;
}

}  // namespace dwnls
