#include "gkdv/errors.hpp"
#include "gkdv/ode_inequality.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace gkdv;
using Catch::Approx;

namespace {

OdeParams unit_params(double gamma = 0.0) {
  OdeParams p;
  p.alpha = 1.0;
  p.beta = 1.0;
  p.gamma = gamma;
  p.p = 3.0;
  return p;
}

double min_f(const OdeTrajectory& tr) {
  double m = tr.states.front().f;
  for (const auto& s : tr.states) m = std::min(m, s.f);
  return m;
}

}  // namespace

TEST_CASE("parameter validation and step guard") {
  OdeParams p = unit_params();
  CHECK_NOTHROW(p.validate());
  p.alpha = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigurationError);
  p = unit_params();
  p.beta = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigurationError);
  p = unit_params();
  p.p = 1.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = unit_params();
  p.delta = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigurationError);

  p = unit_params();
  CHECK(ode_max_step(p, 0.25) == Approx(1e-3));
  CHECK(ode_max_step(p, 100.0) == Approx(1e-2));
  CHECK_THROWS_AS(simulate_equality_ode(p, 0.25, 1.0, 2e-3), ConfigurationError);
  CHECK_THROWS_AS(simulate_equality_ode(p, 0.5 * p.delta, 1.0, 1e-3), ConfigurationError);
}

TEST_CASE("vanishing damping gives a nondecreasing trajectory") {
  OdeParams p = unit_params();
  p.beta = 1e-12;
  const OdeTrajectory tr = simulate_equality_ode(p, 0.3, 2.0, 1e-3);
  CHECK(!tr.floor_crossing);
  CHECK(min_f(tr) == Approx(0.3));
  for (std::size_t i = 1; i < tr.states.size(); ++i) CHECK(tr.states[i].f >= tr.states[i - 1].f);
}

TEST_CASE("unit parameters stay above a quarter of the start value") {
  const OdeTrajectory tr = simulate_equality_ode(unit_params(), 0.25, 10.0, 1e-3);
  CHECK(!tr.floor_crossing);
  CHECK(min_f(tr) >= 0.0625);
  CHECK(tr.states.back().t == Approx(10.0));
  for (std::size_t i = 1; i < tr.states.size(); ++i) {
    CHECK(tr.states[i].F >= tr.states[i - 1].F);
    CHECK(tr.states[i].f >= tr.params.delta * (1.0 - 1e-9));
  }
}

TEST_CASE("strong negative drift reaches the floor") {
  const OdeTrajectory tr = simulate_equality_ode(unit_params(10.0), 0.25, 5.0, 1e-3);
  REQUIRE(tr.floor_crossing);
  CHECK(*tr.floor_crossing > 0.0);
  CHECK(*tr.floor_crossing < 0.1);
  CHECK(tr.states.back().t <= *tr.floor_crossing + 1e-3);
}

TEST_CASE("sampling keeps the first and last states") {
  OdeRunOptions opts;
  opts.sample_every = 100;
  const OdeTrajectory tr = simulate_equality_ode(unit_params(), 0.25, 1.05, 1e-3, opts);
  CHECK(tr.states.front().t == 0.0);
  CHECK(tr.states.back().t == Approx(1.05));
  CHECK(tr.states.size() == 12);
  CHECK(tr.times().size() == tr.values().size());
}

TEST_CASE("forcing raises f until the memory term catches up") {
  // F' = f^{(1-p)/2} falls as f rises, so a forced trajectory accumulates less
  // memory and the pointwise order against the equality curve is not permanent.
  const OdeParams p = unit_params(0.3);
  const OdeTrajectory base = simulate_equality_ode(p, 0.4, 3.0, 1e-3);
  OdeRunOptions opts;
  opts.forcing = [](double t, double f) { return 0.2 * (1.0 + std::sin(5.0 * t)) + 0.1 * f; };
  const OdeTrajectory forced = simulate_equality_ode(p, 0.4, 3.0, 1e-3, opts);
  REQUIRE(base.states.size() == forced.states.size());
  bool reversed = false;
  for (std::size_t i = 0; i < base.states.size(); ++i) {
    CHECK(forced.states[i].t == base.states[i].t);
    if (base.states[i].t <= 0.5) CHECK(forced.states[i].f >= base.states[i].f - 1e-8);
    CHECK(forced.states[i].F <= base.states[i].F + 1e-12);
    if (forced.states[i].f < base.states[i].f - 1e-8) reversed = true;
  }
  CHECK(reversed);
}

TEST_CASE("sublevel measure") {
  const std::vector<double> t{0.0, 1.0, 2.0, 3.0, 4.0};
  const std::vector<double> f{2.0, 1.0, 3.0, 0.5, 2.0};
  CHECK(sublevel_measure(t, f, 0.1) == 0.0);
  CHECK(sublevel_measure(t, f, 5.0) == Approx(4.0));
  // f <= 1.5 on [0.5, 1.25] and [2.6, 3+2/3]
  CHECK(sublevel_measure(t, f, 1.5) == Approx(0.75 + (3.0 + 2.0 / 3.0 - 2.6)));
  CHECK_THROWS_AS(sublevel_measure(t, f, 0.0), DomainError);
  CHECK_THROWS_AS(sublevel_measure(t, f, -1.0), DomainError);

  // Monotone trajectory: the measure is the crossing time.
  std::vector<double> tm, fm;
  for (int i = 0; i <= 1000; ++i) {
    tm.push_back(0.01 * i);
    fm.push_back(1.0 + tm.back() * tm.back());
  }
  for (double z : {1.5, 2.0, 10.0, 50.0}) CHECK(sublevel_measure(tm, fm, z) == Approx(std::sqrt(z - 1.0)).epsilon(1e-4));
}

TEST_CASE("sublevel exponent of the exact power law") {
  for (double p : {2.0, 3.0, 5.0}) {
    std::vector<double> t, f;
    const double T = 100.0;
    for (int i = 0; i <= 200000; ++i) {
      t.push_back(T * i / 200000.0);
      f.push_back(std::pow(t.back(), 2.0 / p));
    }
    const std::vector<double> z = log_spaced(0.5, 0.9 * std::pow(T, 2.0 / p), 20);
    const SublevelFit fit = fit_sublevel_exponent(t, f, z);
    CHECK(fit.exponent == Approx(p / 2.0).margin(1e-3));
    CHECK(fit.prefactor == Approx(1.0).epsilon(1e-2));
    CHECK(fit.points == 20);
  }
  const std::vector<double> t{0.0, 1.0, 2.0}, flat{1.0, 1.0, 1.0};
  CHECK_THROWS_AS(fit_sublevel_exponent(t, flat, log_spaced(0.5, 2.0, 8)), DegenerateInputError);
}

TEST_CASE("equality trajectories grow no faster than the sublevel law") {
  for (double p : {2.0, 3.0, 5.0}) {
    OdeParams params = unit_params();
    params.p = p;
    const double f0 = 0.25;
    const OdeTrajectory tr = simulate_equality_ode(params, f0, 40.0, ode_max_step(params, f0));
    REQUIRE(!tr.floor_crossing);
    const double top = tr.states.back().f;
    const SublevelFit fit = fit_sublevel_exponent(tr, log_spaced(0.1 * top, 0.9 * top, 12));
    CAPTURE(p, fit.exponent);
    CHECK(fit.exponent <= p / 2.0 + 0.15);
  }
}

TEST_CASE("log spaced grid") {
  const std::vector<double> z = log_spaced(1.0, 100.0, 3);
  REQUIRE(z.size() == 3);
  CHECK(z[0] == Approx(1.0));
  CHECK(z[1] == Approx(10.0));
  CHECK(z[2] == Approx(100.0));
  CHECK_THROWS_AS(log_spaced(0.0, 1.0, 3), DomainError);
}

TEST_CASE("trapping certificate") {
  CHECK(lemma3_threshold(unit_params()) == Approx(1.0));
  const Lemma3Certificate c = lemma3_certificate(unit_params(), 0.25, 10.0);
  CHECK(c.hypothesis_ok);
  CHECK(c.trapped);
  CHECK(c.inf_f >= 0.0625);
  CHECK(c.threshold == Approx(1.0));

  const Lemma3Certificate high = lemma3_certificate(unit_params(), 2.0, 10.0);
  CHECK(!high.hypothesis_ok);

  const Lemma3Certificate favorable = lemma3_certificate(unit_params(-1.0), 0.25, 10.0);
  CHECK(favorable.hypothesis_ok);
  CHECK(favorable.trapped);

  const Lemma3Certificate drift = lemma3_certificate(unit_params(0.5), 0.25, 10.0);
  CHECK(!drift.hypothesis_ok);
}

TEST_CASE("trapping holds across a parameter sweep") {
  int runs = 0, trapped = 0;
  for (double alpha : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    for (double beta : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      for (double frac : {0.05, 0.2, 0.4, 0.7, 0.95}) {
        for (double gamma : {0.0, -0.5}) {
          OdeParams p{alpha, beta, gamma, 3.0, 1e-6};
          const double f0 = frac * lemma3_threshold(p);
          const Lemma3Certificate c = lemma3_certificate(p, f0, 5.0);
          REQUIRE(c.hypothesis_ok);
          ++runs;
          if (c.trapped) ++trapped;
        }
      }
    }
  }
  CHECK(runs == 250);
  CHECK(trapped == runs);
}

TEST_CASE("barrier function") {
  CHECK(barrier_value(0.0, 0.36, 2.0) == Approx(0.36));
  CHECK(barrier_value(0.3, 0.36, 2.0) == Approx(0.09));
  const double f0 = 0.7, beta = 1.3;
  const double end = 2.0 * std::sqrt(f0) / beta;
  for (int i = 0; i < 100; ++i) {
    const double x = end * (i + 0.5) / 100.0;
    const double h = 1e-6;
    const double slope = (barrier_value(x + h, f0, beta) - barrier_value(x - h, f0, beta)) / (2 * h);
    CHECK(slope + beta * std::sqrt(barrier_value(x, f0, beta)) == Approx(0.0).margin(1e-7));
  }
  CHECK_THROWS_AS(barrier_value(0.1, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(barrier_value(0.1, 1.0, -1.0), DomainError);
}
