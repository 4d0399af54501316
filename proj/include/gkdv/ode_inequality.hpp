#pragma once

// Equality model of the integro-differential inequality
//   f'(t) = alpha int_0^t f^{(1-p)/2} - beta sqrt(f) - gamma,
// written as the system f' = alpha F - beta sqrt(f) - gamma, F' = f^{(1-p)/2}.

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace gkdv {

struct OdeParams {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 0.0;
  double p = 3.0;
  double delta = 1e-6;  // floor on f inside the right-hand side

  void validate() const;
};

struct OdeState {
  double t = 0.0;
  double f = 0.0;
  double F = 0.0;
  double rhs = 0.0;  // f'(t)
};

struct OdeTrajectory {
  OdeParams params;
  std::vector<OdeState> states;
  /// Set when f reached the floor; the run stops there.
  std::optional<double> floor_crossing;

  std::vector<double> times() const;
  std::vector<double> values() const;
};

struct OdeRunOptions {
  int sample_every = 1;
  /// Extra nonnegative term added to f' (comparison runs).
  std::function<double(double t, double f)> forcing;
};

/// Largest admissible step for a given start value.
double ode_max_step(const OdeParams& params, double f0);

/// Classical RK4. Stops early if f drops below delta.
OdeTrajectory simulate_equality_ode(const OdeParams& params, double f0, double T, double dt,
                                    const OdeRunOptions& options = {});

/// Lebesgue measure of {t : f(t) <= z} with f linear between samples.
double sublevel_measure(std::span<const double> t, std::span<const double> f, double z);
double sublevel_measure(const OdeTrajectory& traj, double z);

struct SublevelFit {
  double exponent;
  double prefactor;
  int points;  // z values used
};
/// Least-squares slope of log measure against log z. Zero and saturated measures
/// are dropped; at least five must remain.
SublevelFit fit_sublevel_exponent(std::span<const double> t, std::span<const double> f,
                                  std::span<const double> z_grid);
SublevelFit fit_sublevel_exponent(const OdeTrajectory& traj, std::span<const double> z_grid);

/// n values spaced evenly in log between lo and hi.
std::vector<double> log_spaced(double lo, double hi, int n);

/// (alpha / beta^2)^{2/(p-1)}.
double lemma3_threshold(const OdeParams& params);

struct Lemma3Certificate {
  bool hypothesis_ok;
  bool trapped;
  double inf_f;
  double threshold;
  double f0;
  double T;
  std::optional<double> floor_crossing;
};
Lemma3Certificate lemma3_certificate(const OdeParams& params, double f0, double T);

/// g(x) = (2 sqrt(f0) - beta x)^2 / 4.
double barrier_value(double x, double f0, double beta);

}  // namespace gkdv
