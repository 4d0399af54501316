#include "gkdv/dynamics.hpp"

#include "gkdv/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace gkdv {

SpectralField linear_propagator(const SpectralField& s, double dt) {
  const Eigen::ArrayXd k = s.grid().wavenumbers();
  const Eigen::ArrayXd phase = k.cube() * dt;
  Eigen::ArrayXcd out = s.coefficients();
  for (Index i = 0; i < out.size(); ++i) out(i) *= std::polar(1.0, phase(i));
  return {s.grid(), std::move(out)};
}

double max_retained_wavenumber(const Grid& grid) {
  return std::numbers::pi / grid.half_width() * static_cast<double>(grid.size() / 3);
}

Stepper::Stepper(const Grid& grid, const EquationParams& params, double stability_limit)
    : grid_(grid),
      params_(params),
      stability_limit_(stability_limit),
      k_(grid.half_wavenumbers()),
      band_(grid.size() / 2 + 1),
      padded_(grid.size() + 1),
      physical_(2 * grid.size()) {
  params_.validate();
  const Index n = grid.size();
  for (Index m = 0; m <= n / 2; ++m) band_(m) = m <= n / 3 ? 1.0 : 0.0;
}

void Stepper::check_step(double dt) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigurationError("time step must be positive");
  const double kmax = max_retained_wavenumber(grid_);
  const double measure = dt * kmax * kmax * kmax;
  if (measure > stability_limit_)
    throw ConfigurationError("time step " + std::to_string(dt) + " violates dt*k_max^3 <= " +
                             std::to_string(stability_limit_) + " (got " + std::to_string(measure) + ")");
}

void Stepper::prepare_phases(double dt) {
  if (dt == cached_dt_) return;
  half_phase_.resize(k_.size());
  full_phase_.resize(k_.size());
  for (Index m = 0; m < k_.size(); ++m) {
    const double theta = k_(m) * k_(m) * k_(m) * dt;
    half_phase_(m) = std::polar(1.0, 0.5 * theta);
    full_phase_(m) = std::polar(1.0, theta);
  }
  cached_dt_ = dt;
}

Eigen::ArrayXcd Stepper::nonlinear(const Eigen::ArrayXcd& half) {
  const Index n = grid_.size();
  if (params_.mu == 0.0) return Eigen::ArrayXcd::Zero(half.size());
  padded_.setZero();
  padded_.head(n / 2) = half.head(n / 2);
  // c2r on 2n points divides by 2n; the n-point normalization needs a factor 2.
  physical_ = 2.0 * irfft(padded_, 2 * n);
  physical_ = signed_power(physical_, params_.p);
  const Eigen::ArrayXcd wide = rfft(physical_);
  Eigen::ArrayXcd out = 0.5 * wide.head(n / 2 + 1);
  out *= (Complex(0.0, params_.mu) * k_) * band_;
  return out;
}

void Stepper::advance(Eigen::ArrayXcd& v, double dt) {
  prepare_phases(dt);
  const Eigen::ArrayXcd& E = half_phase_;
  const Eigen::ArrayXcd& E2 = full_phase_;
  const Eigen::ArrayXcd k1 = nonlinear(v);
  const Eigen::ArrayXcd k2 = nonlinear(E * (v + 0.5 * dt * k1));
  const Eigen::ArrayXcd k3 = nonlinear(E * v + 0.5 * dt * k2);
  const Eigen::ArrayXcd k4 = nonlinear(E2 * v + dt * E * k3);
  v = E2 * v + (dt / 6.0) * (E2 * k1 + 2.0 * E * (k2 + k3) + k4);
  v *= band_;
}

Eigen::ArrayXcd Stepper::to_half(const RealField& f) const {
  Eigen::ArrayXcd half = rfft(f.samples());
  half *= band_;
  return half;
}

RealField Stepper::to_field(const Eigen::ArrayXcd& half) const {
  return {grid_, irfft(half, grid_.size())};
}

RealField nonlinear_term(const RealField& f, const EquationParams& params) {
  params.validate();
  require_finite(f, "nonlinear_term");
  const Grid& g = f.grid();
  const Index n = g.size();
  if (params.mu == 0.0) return RealField::zero(g);
  const Eigen::ArrayXcd half = rfft(f.samples());
  Eigen::ArrayXcd padded = Eigen::ArrayXcd::Zero(n + 1);
  padded.head(n / 2) = half.head(n / 2);
  const Eigen::ArrayXd power = signed_power(2.0 * irfft(padded, 2 * n), params.p);
  if (!power.allFinite()) throw NumericError("nonlinear_term: power overflow");
  Eigen::ArrayXcd out = 0.5 * rfft(power).head(n / 2 + 1);
  out *= Complex(0.0, params.mu) * g.half_wavenumbers();
  out(n / 2) = 0.0;
  return {g, irfft(out, n)};
}

SimState step(const SimState& state, double dt, const EquationParams& params, double stability_limit) {
  require_finite(state.field, "step");
  Stepper stepper(state.field.grid(), params, stability_limit);
  stepper.check_step(dt);
  Eigen::ArrayXcd half = stepper.to_half(state.field);
  stepper.advance(half, dt);
  if (!half.allFinite())
    throw BlowupError("non-finite state after step from t = " + std::to_string(state.t), state);
  return {state.t + dt, stepper.to_field(half)};
}

Trajectory simulate(const RealField& initial, const EquationParams& params, double t_end, double dt,
                    int sample_every, const SimulationOptions& options) {
  params.validate();
  if (!(t_end > 0.0)) throw ConfigurationError("t_end must be positive");
  if (sample_every < 1) throw ConfigurationError("sample_every must be >= 1");
  require_finite(initial, "simulate");
  if (options.moment_diagnostics && options.enforce_tail_guard) require_tail_guard(initial, 0.0);

  Stepper stepper(initial.grid(), params, options.stability_limit);
  stepper.check_step(dt);

  Trajectory traj{params, initial.grid(), {}, {}};
  RecordOptions record_options;
  record_options.moments = options.moment_diagnostics;
  record_options.enforce_tail_guard = options.enforce_tail_guard;

  auto record = [&](double t, const RealField& field) {
    traj.records.push_back(compute_record(t, field, params, record_options));
    if (options.keep_states) traj.states.push_back({t, field});
    if (options.observer) options.observer(traj.records.back());
  };

  const long long steps = static_cast<long long>(std::ceil(t_end / dt - 1e-9));
  Eigen::ArrayXcd half = stepper.to_half(initial);
  record(0.0, stepper.to_field(half));
  double t = 0.0;
  for (long long i = 1; i <= steps; ++i) {
    const double h = i == steps ? t_end - static_cast<double>(steps - 1) * dt : dt;
    Eigen::ArrayXcd previous = half;
    stepper.advance(half, h);
    if (!half.allFinite()) {
      throw BlowupError("blowup: non-finite state after t = " + std::to_string(t),
                        SimState{t, stepper.to_field(previous)});
    }
    t = i == steps ? t_end : static_cast<double>(i) * dt;
    if (i % sample_every == 0 || i == steps) record(t, stepper.to_field(half));
  }
  if (!options.keep_states) traj.states.push_back({t, stepper.to_field(half)});

  fill_finite_differences(traj.records);
  if (options.moment_diagnostics) flag_monotonicity(traj.records, params);
  return traj;
}

RealField apply_scaling_symmetry(const RealField& f, double lambda, const EquationParams& params) {
  params.validate();
  if (!(lambda > 0.0)) throw DomainError("scaling factor must be positive");
  const double amplitude = std::pow(lambda, -2.0 / (params.p - 1.0));
  RealField scaled(f.grid().scaled(lambda), amplitude * f.samples());
  require_tail_guard(scaled);
  return scaled;
}

}  // namespace gkdv
