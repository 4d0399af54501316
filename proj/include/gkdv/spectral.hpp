#pragma once

// Uniform periodic grid on [-L, L), spectral transforms and quadrature.
//
// Mode layout of SpectralField (standard FFT order):
//   index i = 0 .. n-1  <->  mode m = i for i <= n/2, m = i - n otherwise,
//   k_m = (pi / L) m,   u_hat_m = dx * sum_j u_j exp(-i k_m x_j).
// The inverse is u_j = (1 / 2L) sum_m u_hat_m exp(i k_m x_j).

#include <Eigen/Core>

#include <complex>
#include <cstddef>

namespace gkdv {

using Index = Eigen::Index;
using Complex = std::complex<double>;

/// Fraction of the half-width, measured in from each end, that counts as "near the seam".
inline constexpr double kTailMargin = 0.05;
/// Largest admissible seam mass fraction before x-weighted integrals are refused.
inline constexpr double kTailTolerance = 1e-8;

class Grid {
 public:
  Grid(double half_width, Index n);

  double half_width() const noexcept { return half_width_; }
  Index size() const noexcept { return n_; }
  double dx() const noexcept { return 2.0 * half_width_ / static_cast<double>(n_); }
  double node(Index j) const noexcept { return -half_width_ + static_cast<double>(j) * dx(); }
  Eigen::ArrayXd nodes() const;

  /// Signed mode number stored at array position i.
  Index mode(Index i) const noexcept { return i <= n_ / 2 ? i : i - n_; }
  double wavenumber(Index i) const noexcept;
  /// Wavenumbers in full FFT order (length n).
  Eigen::ArrayXd wavenumbers() const;
  /// Wavenumbers of the non-negative half spectrum (length n/2 + 1).
  Eigen::ArrayXd half_wavenumbers() const;

  /// Same node count on a grid stretched by factor lambda.
  Grid scaled(double lambda) const { return Grid(lambda * half_width_, n_); }

  bool operator==(const Grid&) const = default;

 private:
  double half_width_;
  Index n_;
};

Grid make_grid(double half_width, Index n);

class RealField {
 public:
  RealField(Grid grid, Eigen::ArrayXd samples);

  static RealField zero(const Grid& grid) { return {grid, Eigen::ArrayXd::Zero(grid.size())}; }
  template <typename Fn>
  static RealField sample(const Grid& grid, Fn&& fn) {
    Eigen::ArrayXd u(grid.size());
    for (Index j = 0; j < grid.size(); ++j) u(j) = fn(grid.node(j));
    return {grid, std::move(u)};
  }

  const Grid& grid() const noexcept { return grid_; }
  const Eigen::ArrayXd& samples() const noexcept { return samples_; }
  double operator()(Index j) const { return samples_(j); }
  Index size() const noexcept { return samples_.size(); }
  bool is_zero() const { return (samples_ == 0.0).all(); }

 private:
  Grid grid_;
  Eigen::ArrayXd samples_;
};

class SpectralField {
 public:
  SpectralField(Grid grid, Eigen::ArrayXcd coefficients);

  const Grid& grid() const noexcept { return grid_; }
  const Eigen::ArrayXcd& coefficients() const noexcept { return coefficients_; }
  Eigen::ArrayXcd& coefficients() noexcept { return coefficients_; }

 private:
  Grid grid_;
  Eigen::ArrayXcd coefficients_;
};

SpectralField forward(const RealField& f);
/// Hermitian part of the coefficients is used; the result is real by construction.
RealField inverse(const SpectralField& s);

// Raw FFTW-normalized half-spectrum transforms used by the time stepper and the
// derivative operators: r2c is unnormalized, c2r divides by n.
Eigen::ArrayXcd rfft(const Eigen::ArrayXd& u);
Eigen::ArrayXd irfft(const Eigen::ArrayXcd& half, Index n);

RealField spatial_derivative(const RealField& f, int order);

double integrate(const RealField& f);
/// Periodic rectangle rule on raw samples.
template <typename Derived>
double integrate(const Eigen::ArrayBase<Derived>& values, double dx) {
  return dx * values.sum();
}

/// int (x - c)^power f(x) dx with box node coordinates.
double weighted_moment(const RealField& f, int power, double center);

/// Mass fraction of f^2 with |x| > (1 - margin) L.
double tail_mass_fraction(const RealField& f, double margin = kTailMargin);
/// Throws TruncationError unless the seam fraction is below kTailTolerance (zero fields pass).
void require_tail_guard(const RealField& f, double t = 0.0);

void require_finite(const RealField& f, const char* where);

/// Sign-preserving power |u|^{p-1} u.
template <typename Derived>
Eigen::ArrayXd signed_power(const Eigen::ArrayBase<Derived>& u, double p) {
  return u.sign() * u.abs().pow(p);
}

}  // namespace gkdv
