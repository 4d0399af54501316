#include "gkdv/diagnostics.hpp"
#include "gkdv/dynamics.hpp"
#include "gkdv/errors.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace gkdv;
using Catch::Approx;
using std::numbers::pi;

namespace {

RealField gaussian(const Grid& g, double amplitude = 1.0, double center = 0.0, double width = 1.0) {
  return RealField::sample(g, [=](double x) {
    const double y = (x - center) / width;
    return amplitude * std::exp(-0.5 * y * y);
  });
}

double max_abs_diff(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) { return (a - b).abs().maxCoeff(); }

SimulationOptions plain() {
  SimulationOptions o;
  o.moment_diagnostics = false;
  o.keep_states = true;
  return o;
}

}  // namespace

TEST_CASE("linear propagator is the exact Airy flow") {
  const Grid g(pi, 32);
  const RealField c = RealField::sample(g, [](double x) { return std::cos(x); });
  const Eigen::ArrayXd x = g.nodes();
  for (double t : {0.3, 1.0, -2.5}) {
    const RealField moved = inverse(linear_propagator(forward(c), t));
    CHECK(max_abs_diff(moved.samples(), (x + t).cos()) < 1e-12);
  }
  CHECK(max_abs_diff(inverse(linear_propagator(forward(c), 0.0)).samples(), c.samples()) < 1e-15);

  const RealField gs = gaussian(Grid(20.0, 256));
  const SpectralField there = linear_propagator(forward(gs), 0.7);
  const RealField back = inverse(linear_propagator(there, -0.7));
  CHECK(max_abs_diff(back.samples(), gs.samples()) < 1e-12);
}

TEST_CASE("dealiased nonlinear term") {
  const Grid g(pi, 64);
  const EquationParams cubic{3.0, 1.0};
  const RealField c = RealField::sample(g, [](double x) { return std::cos(x); });
  const Eigen::ArrayXd x = g.nodes();
  const Eigen::ArrayXd expected = -3.0 * x.cos().square() * x.sin();
  CHECK(max_abs_diff(nonlinear_term(c, cubic).samples(), expected) < 1e-12);

  const RealField constant = RealField::sample(g, [](double) { return 2.0; });
  CHECK(nonlinear_term(constant, cubic).samples().abs().maxCoeff() < 1e-12);
  CHECK(nonlinear_term(c, EquationParams{3.0, 0.0}).samples().abs().maxCoeff() == 0.0);

  // Focusing sign flips the term.
  CHECK(max_abs_diff(nonlinear_term(c, EquationParams{3.0, -1.0}).samples(), -expected) < 1e-12);

  const RealField huge = RealField::sample(g, [](double) { return 1e200; });
  CHECK_THROWS_AS(nonlinear_term(huge, EquationParams{5.0, 1.0}), NumericError);
}

TEST_CASE("one step with mu = 0 reproduces the linear propagator") {
  const Grid g(20.0, 256);
  const RealField u = gaussian(g, 1.0, 0.0, 2.0);  // well inside the 2/3 band
  const EquationParams airy{3.0, 0.0};
  const SimState next = step({0.0, u}, 1e-3, airy);
  const RealField exact = inverse(linear_propagator(forward(u), 1e-3));
  CHECK(next.t == 1e-3);
  CHECK(max_abs_diff(next.field.samples(), exact.samples()) < 1e-12);
}

TEST_CASE("stability guard on dt k_max^3") {
  const Grid g(30.0, 1024);
  const double kmax = max_retained_wavenumber(g);
  CHECK(kmax == Approx(pi / 30.0 * 341.0));
  const EquationParams params{3.0, 1.0};
  const RealField u = gaussian(g);
  const double limit_dt = kDefaultStabilityLimit / (kmax * kmax * kmax);
  CHECK_NOTHROW(step({0.0, u}, 0.99 * limit_dt, params));
  CHECK_THROWS_AS(step({0.0, u}, 1.01 * limit_dt, params), ConfigurationError);
  CHECK_THROWS_AS(step({0.0, u}, -1e-4, params), ConfigurationError);
  CHECK_NOTHROW(step({0.0, u}, 1.01 * limit_dt, params, 20.0));
}

TEST_CASE("simulate samples, zero data and Airy mode") {
  const Grid g(30.0, 512);
  const EquationParams params{3.0, 1.0};
  const Trajectory zero = simulate(RealField::zero(g), params, 0.05, 1e-3, 10);
  REQUIRE(zero.records.size() == 6);
  for (const auto& r : zero.records) {
    CHECK(r.mass == 0.0);
    CHECK(r.interaction == 0.0);
  }
  CHECK(zero.states.back().field.samples().abs().maxCoeff() == 0.0);

  // Samples at t = 0, every 3 steps, and the final (shortened) step.
  const Trajectory tr = simulate(gaussian(g), params, 0.0105, 1e-3, 3);
  std::vector<double> times;
  for (const auto& r : tr.records) times.push_back(r.t);
  REQUIRE(times.size() == 5);
  CHECK(times[1] == Approx(0.003));
  CHECK(times[3] == Approx(0.009));
  CHECK(times[4] == 0.0105);

  const Grid periodic(pi, 64);
  const RealField c = RealField::sample(periodic, [](double x) { return std::cos(x); });
  const Trajectory airy = simulate(c, EquationParams{3.0, 0.0}, 1.0, 1e-3, 100, plain());
  const Eigen::ArrayXd x = periodic.nodes();
  for (const auto& s : airy.states) CHECK(max_abs_diff(s.field.samples(), (x + s.t).cos()) < 1e-10);

  CHECK_THROWS_AS(simulate(gaussian(g), params, 0.0, 1e-3, 1), ConfigurationError);
  CHECK_THROWS_AS(simulate(gaussian(g), params, 0.1, 1e-3, 0), ConfigurationError);
}

TEST_CASE("Airy flow is reversible") {
  const Grid g(20.0, 256);
  const RealField u = gaussian(g, 1.0, 0.0, 1.5);
  const EquationParams airy{3.0, 0.0};
  Stepper stepper(g, airy);
  Eigen::ArrayXcd half = stepper.to_half(u);
  const Eigen::ArrayXcd start = half;
  for (int i = 0; i < 100; ++i) stepper.advance(half, 1e-3);
  for (int i = 0; i < 100; ++i) stepper.advance(half, -1e-3);
  CHECK((half - start).abs().maxCoeff() < 1e-12 * start.abs().maxCoeff());
}

TEST_CASE("short defocusing run conserves mass and energy") {
  const Grid g(30.0, 512);
  const EquationParams params{3.0, 1.0};
  const Trajectory tr = simulate(gaussian(g), params, 0.2, 2e-4, 100);
  const auto& first = tr.records.front();
  for (const auto& r : tr.records) {
    CHECK(std::abs(r.mass - first.mass) <= 1e-9 * first.mass);
    CHECK(std::abs(r.energy - first.energy) <= 1e-8 * first.energy);
    CHECK(r.violation_flags.empty());
  }
}

TEST_CASE("mass near the seam stops the run with a time stamp") {
  const Grid g(30.0, 1024);
  const RealField narrow = gaussian(g, 1.0, -20.0, 0.5);
  try {
    simulate(narrow, EquationParams{3.0, 0.0}, 3.0, 2e-4, 50);
    FAIL("expected a truncation error");
  } catch (const TruncationError& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() < 3.0);
  }
  const RealField at_seam = gaussian(g, 1.0, 29.0, 1.0);
  CHECK_THROWS_AS(simulate(at_seam, EquationParams{}, 0.1, 1e-4, 10), TruncationError);
}

TEST_CASE("overflow aborts with the last valid state") {
  const Grid g(30.0, 256);
  const RealField big = gaussian(g, 1e80);
  try {
    simulate(big, EquationParams{5.0, -1.0}, 0.01, 1e-4, 10, plain());
    FAIL("expected a blowup error");
  } catch (const BlowupError& e) {
    CHECK(e.time() == 0.0);
    CHECK(e.last_valid_state().field.samples().allFinite());
  }
}

TEST_CASE("scaling symmetry") {
  const Grid g(20.0, 512);
  const RealField u = gaussian(g, 0.8, 0.0, 1.2);
  for (double p : {2.0, 3.0, 5.0}) {
    const EquationParams params{p, 1.0};
    for (double lambda : {0.8, 1.3}) {
      const RealField ul = apply_scaling_symmetry(u, lambda, params);
      CHECK(ul.grid().half_width() == Approx(lambda * 20.0));
      CHECK(mass(ul) == Approx(std::pow(lambda, (p - 5.0) / (p - 1.0)) * mass(u)).epsilon(1e-12));
      CHECK(energy(ul, params) ==
            Approx(std::pow(lambda, -(p + 3.0) / (p - 1.0)) * energy(u, params)).epsilon(1e-12));
    }
  }
  const EquationParams cubic{3.0, 1.0};
  const double lambda = 1.25;
  const double t = 0.2, dt = 4e-4;
  const Trajectory a = simulate(u, cubic, t, dt, 1000, plain());
  const Trajectory b = simulate(apply_scaling_symmetry(u, lambda, cubic), cubic, lambda * lambda * lambda * t,
                                lambda * lambda * lambda * dt, 1000, plain());
  const RealField expected = apply_scaling_symmetry(a.states.back().field, lambda, cubic);
  const Eigen::ArrayXd& got = b.states.back().field.samples();
  CHECK(max_abs_diff(got, expected.samples()) <= 1e-6 * expected.samples().abs().maxCoeff());
  CHECK_THROWS_AS(apply_scaling_symmetry(u, 0.0, cubic), DomainError);
  CHECK_THROWS_AS(apply_scaling_symmetry(gaussian(g, 1.0, 0.0, 8.0), 0.3, cubic), TruncationError);
}
