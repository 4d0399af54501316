#include "gkdv/errors.hpp"
#include "gkdv/spectral.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace gkdv;
using Catch::Approx;
using std::numbers::pi;

namespace {

// Band-limited random field: a few low modes with random coefficients.
RealField random_trig_field(const Grid& g, std::mt19937_64& rng, int modes) {
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  std::vector<double> a(modes + 1), b(modes + 1);
  for (int k = 0; k <= modes; ++k) {
    a[k] = uniform();
    b[k] = uniform();
  }
  const double base = pi / g.half_width();
  return RealField::sample(g, [&](double x) {
    double v = 0.0;
    for (int k = 0; k <= modes; ++k) v += a[k] * std::cos(base * k * x) + b[k] * std::sin(base * k * x);
    return v;
  });
}

double max_abs_diff(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) { return (a - b).abs().maxCoeff(); }

}  // namespace

TEST_CASE("grid construction and validation") {
  const Grid g = make_grid(pi, 16);
  CHECK(g.dx() == Approx(2.0 * pi / 16).epsilon(1e-15));
  CHECK(g.node(0) == -pi);
  CHECK(make_grid(30.0, 1024).dx() == Approx(60.0 / 1024).epsilon(1e-15));
  CHECK_THROWS_AS(make_grid(10.0, 100), ConfigurationError);
  CHECK_THROWS_AS(make_grid(10.0, 8), ConfigurationError);
  CHECK_THROWS_AS(make_grid(0.0, 64), ConfigurationError);
  CHECK_THROWS_AS(make_grid(-1.0, 64), ConfigurationError);

  const Eigen::ArrayXd x = make_grid(2.0, 64).nodes();
  for (Index j = 1; j < x.size(); ++j) CHECK(x(j) - x(j - 1) == Approx(4.0 / 64).epsilon(1e-13));
  CHECK(x(x.size() - 1) == Approx(2.0 - 4.0 / 64));
}

TEST_CASE("mode layout follows FFT order") {
  const Grid g(pi, 16);
  CHECK(g.mode(0) == 0);
  CHECK(g.mode(8) == 8);
  CHECK(g.mode(9) == -7);
  CHECK(g.mode(15) == -1);
  CHECK(g.wavenumber(3) == Approx(3.0));
}

TEST_CASE("forward transform uses the quadrature normalization") {
  // u = cos(x) on [-pi, pi): u_hat_{+-1} = dx sum cos(x_j) exp(-+ i x_j) = pi.
  const Grid g(pi, 32);
  const SpectralField s = forward(RealField::sample(g, [](double x) { return std::cos(x); }));
  CHECK(s.coefficients()(1).real() == Approx(pi).epsilon(1e-13));
  CHECK(s.coefficients()(31).real() == Approx(pi).epsilon(1e-13));
  CHECK(std::abs(s.coefficients()(0)) < 1e-13);
  // Constant 1 has u_hat_0 = 2L.
  const SpectralField one = forward(RealField::sample(g, [](double) { return 1.0; }));
  CHECK(one.coefficients()(0).real() == Approx(2.0 * pi));
}

TEST_CASE("transform round trip, Hermitian symmetry and Parseval on random fields") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Grid g(1.0 + trial * 0.5, 64 << (trial % 4));
    const RealField f = random_trig_field(g, rng, 10);
    const SpectralField s = forward(f);
    const RealField back = inverse(s);
    const double scale = f.samples().abs().maxCoeff();
    CHECK(max_abs_diff(back.samples(), f.samples()) <= 1e-12 * scale);

    const auto& c = s.coefficients();
    const Index n = g.size();
    for (Index m = 1; m < n / 2; ++m) CHECK(std::abs(c(n - m) - std::conj(c(m))) <= 1e-12 * c.abs().maxCoeff());

    const double l2 = integrate(f.samples().square(), g.dx());
    const double parseval = c.abs2().sum() / (2.0 * g.half_width());
    CHECK(parseval == Approx(l2).epsilon(1e-10));
  }
}

TEST_CASE("spectral derivatives of resolved modes") {
  const Grid g(pi, 64);
  const RealField c = RealField::sample(g, [](double x) { return std::cos(x); });
  const Eigen::ArrayXd x = g.nodes();
  CHECK(max_abs_diff(spatial_derivative(c, 1).samples(), -x.sin()) < 1e-12);
  CHECK(max_abs_diff(spatial_derivative(c, 2).samples(), -x.cos()) < 1e-12);
  CHECK(max_abs_diff(spatial_derivative(c, 3).samples(), x.sin()) < 1e-10);
  const RealField five = RealField::sample(g, [](double) { return 5.0; });
  CHECK(spatial_derivative(five, 3).samples().abs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(spatial_derivative(c, 4), DomainError);
  CHECK_THROWS_AS(spatial_derivative(c, 0), DomainError);

  Eigen::ArrayXd bad = c.samples();
  bad(3) = NAN;
  CHECK_THROWS_AS(spatial_derivative(RealField(g, bad), 1), NumericError);
}

TEST_CASE("first derivative twice equals the second derivative for band-limited fields") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Grid g(2.0 + trial, 128);
    const RealField f = random_trig_field(g, rng, 20);
    const RealField twice = spatial_derivative(spatial_derivative(f, 1), 1);
    const RealField second = spatial_derivative(f, 2);
    CHECK(max_abs_diff(twice.samples(), second.samples()) <= 1e-10 * second.samples().abs().maxCoeff());
  }
}

TEST_CASE("periodic rectangle rule") {
  const Grid g(pi, 64);
  CHECK(integrate(RealField::sample(g, [](double) { return 1.0; })) == Approx(2.0 * pi));
  CHECK(std::abs(integrate(RealField::sample(g, [](double x) { return std::cos(x); }))) < 1e-14);
  const Grid wide(30.0, 1024);
  CHECK(integrate(RealField::sample(wide, [](double x) { return std::exp(-x * x); })) ==
        Approx(std::sqrt(pi)).epsilon(1e-10));
}

TEST_CASE("integration is linear and translation equivariant") {
  std::mt19937_64 rng(5);
  const Grid g(pi, 128);
  for (int trial = 0; trial < 20; ++trial) {
    const RealField f = random_trig_field(g, rng, 8);
    const RealField h = random_trig_field(g, rng, 8);
    const double a = 0.3 * trial - 2.0;
    CHECK(integrate(RealField(g, a * f.samples() + h.samples())) ==
          Approx(a * integrate(f) + integrate(h)).margin(1e-12));
    // Periodic shift by whole cells leaves the sum untouched.
    Eigen::ArrayXd shifted(g.size());
    const Index s = 1 + trial;
    for (Index j = 0; j < g.size(); ++j) shifted(j) = f((j + s) % g.size());
    CHECK(integrate(RealField(g, shifted)) == Approx(integrate(f)).margin(1e-12));
  }
}

TEST_CASE("weighted moments") {
  const Grid g(30.0, 1024);
  const RealField gauss = RealField::sample(g, [](double x) { return std::exp(-x * x); });
  CHECK(weighted_moment(gauss, 2, 0.0) == Approx(std::sqrt(pi) / 2.0).epsilon(1e-10));
  CHECK(std::abs(weighted_moment(gauss, 1, 0.0)) < 1e-12);
  const RealField shifted = RealField::sample(g, [](double x) { return std::exp(-(x - 3.0) * (x - 3.0)); });
  CHECK(std::abs(weighted_moment(shifted, 1, 3.0)) < 1e-12);

  // Indicator of [-1, 1] sampled with half weights at the jumps.
  const Grid fine(4.0, 4096);
  const RealField box = RealField::sample(fine, [](double x) {
    const double a = std::abs(x);
    return a < 1.0 - 1e-12 ? 1.0 : (a < 1.0 + 1e-12 ? 0.5 : 0.0);
  });
  for (double c : {-3.0, 0.0, 1.7}) CHECK(weighted_moment(box, 0, c) == Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(weighted_moment(box, 3, 0.0), DomainError);
}

TEST_CASE("tail mass fraction and guard") {
  const Grid g(30.0, 1024);
  const RealField gauss = RealField::sample(g, [](double x) { return std::exp(-0.5 * x * x); });
  CHECK(tail_mass_fraction(gauss, 0.1) < 1e-100);
  const RealField flat = RealField::sample(g, [](double) { return 1.0; });
  CHECK(tail_mass_fraction(flat, 0.1) == Approx(0.1).margin(2.0 / 1024));
  CHECK_THROWS_AS(tail_mass_fraction(RealField::zero(g), 0.1), DegenerateInputError);
  CHECK_THROWS_AS(tail_mass_fraction(gauss, 0.6), DomainError);

  CHECK_NOTHROW(require_tail_guard(gauss));
  CHECK_NOTHROW(require_tail_guard(RealField::zero(g)));
  try {
    require_tail_guard(flat, 2.5);
    FAIL("expected a truncation error");
  } catch (const TruncationError& e) {
    CHECK(e.time() == 2.5);
    CHECK(e.tail_fraction() > 0.04);
  }
}

TEST_CASE("signed power keeps the sign") {
  Eigen::ArrayXd u(4);
  u << -2.0, -0.5, 0.0, 3.0;
  const Eigen::ArrayXd v = signed_power(u, 1.5);
  CHECK(v(0) == Approx(-std::pow(2.0, 1.5)));
  CHECK(v(2) == 0.0);
  CHECK(v(3) == Approx(std::pow(3.0, 1.5)));
}
