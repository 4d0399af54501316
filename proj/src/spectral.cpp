#include "gkdv/spectral.hpp"

#include "gkdv/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace gkdv {
namespace {

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

// FFTW planning is not thread-safe; execution through the new-array API is.
PlanPair plans_for(Index n) {
  static std::mutex mutex;
  static std::map<Index, PlanPair> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const int ni = static_cast<int>(n);
  double* real = fftw_alloc_real(n);
  fftw_complex* cplx = fftw_alloc_complex(n / 2 + 1);
  PlanPair plans;
  plans.r2c = fftw_plan_dft_r2c_1d(ni, real, cplx, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.c2r = fftw_plan_dft_c2r_1d(ni, cplx, real, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(cplx);
  fftw_free(real);
  cache.emplace(n, plans);
  return plans;
}

bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid::Grid(double half_width, Index n) : half_width_(half_width), n_(n) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw ConfigurationError("grid half-width must be positive, got " + std::to_string(half_width));
  if (n < 16 || !is_power_of_two(n))
    throw ConfigurationError("grid size must be a power of two >= 16, got " + std::to_string(n));
}

Grid make_grid(double half_width, Index n) { return Grid(half_width, n); }

Eigen::ArrayXd Grid::nodes() const {
  Eigen::ArrayXd x(n_);
  for (Index j = 0; j < n_; ++j) x(j) = node(j);
  return x;
}

double Grid::wavenumber(Index i) const noexcept {
  return std::numbers::pi / half_width_ * static_cast<double>(mode(i));
}

Eigen::ArrayXd Grid::wavenumbers() const {
  Eigen::ArrayXd k(n_);
  for (Index i = 0; i < n_; ++i) k(i) = wavenumber(i);
  return k;
}

Eigen::ArrayXd Grid::half_wavenumbers() const {
  return Eigen::ArrayXd::LinSpaced(n_ / 2 + 1, 0.0, static_cast<double>(n_ / 2)) *
         (std::numbers::pi / half_width_);
}

RealField::RealField(Grid grid, Eigen::ArrayXd samples)
    : grid_(grid), samples_(std::move(samples)) {
  if (samples_.size() != grid_.size())
    throw ConfigurationError("sample count does not match grid size");
}

SpectralField::SpectralField(Grid grid, Eigen::ArrayXcd coefficients)
    : grid_(grid), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != grid_.size())
    throw ConfigurationError("coefficient count does not match grid size");
}

Eigen::ArrayXcd rfft(const Eigen::ArrayXd& u) {
  const Index n = u.size();
  const PlanPair plans = plans_for(n);
  Eigen::ArrayXd in = u;
  Eigen::ArrayXcd out(n / 2 + 1);
  fftw_execute_dft_r2c(plans.r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

Eigen::ArrayXd irfft(const Eigen::ArrayXcd& half, Index n) {
  const PlanPair plans = plans_for(n);
  Eigen::ArrayXcd in = half;  // c2r destroys its input
  Eigen::ArrayXd out(n);
  fftw_execute_dft_c2r(plans.c2r, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  return out / static_cast<double>(n);
}

SpectralField forward(const RealField& f) {
  const Grid& g = f.grid();
  const Index n = g.size();
  const Eigen::ArrayXcd half = rfft(f.samples());
  Eigen::ArrayXcd full(n);
  // exp(-i k_m x_j) = (-1)^m exp(-2 pi i m j / n) because k_m L = pi m.
  for (Index i = 0; i < n; ++i) {
    const Index m = g.mode(i);
    const Complex c = m >= 0 ? half(m) : std::conj(half(-m));
    full(i) = (m % 2 == 0 ? 1.0 : -1.0) * g.dx() * c;
  }
  return {g, std::move(full)};
}

RealField inverse(const SpectralField& s) {
  const Grid& g = s.grid();
  const Index n = g.size();
  const auto& c = s.coefficients();
  Eigen::ArrayXcd half(n / 2 + 1);
  for (Index m = 0; m <= n / 2; ++m) {
    // Hermitian projection keeps the result real for slightly non-symmetric input.
    const Complex pos = c(m);
    const Complex neg = m == 0 || m == n / 2 ? std::conj(c(m)) : c(n - m);
    const Complex sym = 0.5 * (pos + std::conj(neg));
    half(m) = (m % 2 == 0 ? 1.0 : -1.0) * sym / g.dx();
  }
  return {g, irfft(half, n)};
}

RealField spatial_derivative(const RealField& f, int order) {
  if (order < 1 || order > 3) throw DomainError("derivative order must be 1, 2 or 3");
  require_finite(f, "spatial_derivative");
  const Grid& g = f.grid();
  const Index n = g.size();
  Eigen::ArrayXcd half = rfft(f.samples());
  const Eigen::ArrayXd k = g.half_wavenumbers();
  const Complex ik_unit(0.0, 1.0);
  for (Index m = 0; m <= n / 2; ++m) half(m) *= std::pow(ik_unit * k(m), order);
  if (order % 2 == 1) half(n / 2) = 0.0;
  return {g, irfft(half, n)};
}

double integrate(const RealField& f) { return integrate(f.samples(), f.grid().dx()); }

double weighted_moment(const RealField& f, int power, double center) {
  if (power < 0 || power > 2) throw DomainError("moment power must be 0, 1 or 2");
  const Eigen::ArrayXd shifted = f.grid().nodes() - center;
  return integrate(shifted.pow(power) * f.samples(), f.grid().dx());
}

double tail_mass_fraction(const RealField& f, double margin) {
  if (!(margin > 0.0 && margin < 0.5)) throw DomainError("tail margin must lie in (0, 0.5)");
  const double total = f.samples().square().sum();
  if (total == 0.0) throw DegenerateInputError("tail fraction of a zero field");
  const double cut = (1.0 - margin) * f.grid().half_width();
  const Eigen::ArrayXd x = f.grid().nodes();
  const double outside = (x.abs() > cut).select(f.samples().square(), 0.0).sum();
  return outside / total;
}

void require_tail_guard(const RealField& f, double t) {
  if (f.is_zero()) return;
  const double tail = tail_mass_fraction(f);
  if (!(tail < kTailTolerance))
    throw TruncationError("mass near the periodic seam (fraction " + std::to_string(tail) +
                              ") at t = " + std::to_string(t),
                          t, tail);
}

void require_finite(const RealField& f, const char* where) {
  if (!f.samples().allFinite()) throw NumericError(std::string(where) + ": non-finite samples");
}

}  // namespace gkdv
