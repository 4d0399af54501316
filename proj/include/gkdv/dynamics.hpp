#pragma once

// Integrating-factor RK4 for u_t + u_xxx = mu (|u|^{p-1} u)_x on the periodic grid.
// The Airy part is propagated exactly in Fourier space; the nonlinearity is
// evaluated on a zero-padded 2n grid, truncated back, and the state is kept on
// the 2/3-rule band |m| <= n/3.

#include "gkdv/diagnostics.hpp"
#include "gkdv/equation.hpp"
#include "gkdv/spectral.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace gkdv {

struct SimState {
  double t = 0.0;
  RealField field;
};

class BlowupError : public NumericError {
 public:
  BlowupError(const std::string& what, SimState last_valid)
      : NumericError(what), last_(std::move(last_valid)) {}
  const SimState& last_valid_state() const noexcept { return last_; }
  double time() const noexcept { return last_.t; }

 private:
  SimState last_;
};

struct Trajectory {
  EquationParams params;
  Grid grid;
  std::vector<SimState> states;
  std::vector<DiagnosticsRecord> records;
};

/// Default bound on dt * k_max^3, k_max the largest wavenumber kept by the 2/3 rule.
inline constexpr double kDefaultStabilityLimit = 10.0;

/// Multiplies mode m by exp(i k_m^3 dt): exact flow of u_t + u_xxx = 0.
SpectralField linear_propagator(const SpectralField& s, double dt);

/// mu d/dx (|u|^{p-1} u), dealiased by 2n zero padding.
RealField nonlinear_term(const RealField& f, const EquationParams& params);

/// Largest wavenumber retained by the 2/3 filter.
double max_retained_wavenumber(const Grid& grid);

class Stepper {
 public:
  Stepper(const Grid& grid, const EquationParams& params,
          double stability_limit = kDefaultStabilityLimit);

  /// Throws ConfigurationError when dt violates the stability guard.
  void check_step(double dt) const;

  /// Advances the half spectrum (raw r2c normalization) by one IF-RK4 step.
  void advance(Eigen::ArrayXcd& half, double dt);

  Eigen::ArrayXcd to_half(const RealField& f) const;
  RealField to_field(const Eigen::ArrayXcd& half) const;

  const Grid& grid() const noexcept { return grid_; }

 private:
  Eigen::ArrayXcd nonlinear(const Eigen::ArrayXcd& half);
  void prepare_phases(double dt);

  Grid grid_;
  EquationParams params_;
  double stability_limit_;
  Eigen::ArrayXd k_;
  Eigen::ArrayXd band_;  // 1 on |m| <= n/3, else 0
  double cached_dt_ = NAN;
  Eigen::ArrayXcd half_phase_;  // exp(i k^3 dt / 2)
  Eigen::ArrayXcd full_phase_;
  // scratch
  Eigen::ArrayXcd padded_;
  Eigen::ArrayXd physical_;
};

SimState step(const SimState& state, double dt, const EquationParams& params,
              double stability_limit = kDefaultStabilityLimit);

struct SimulationOptions {
  double stability_limit = kDefaultStabilityLimit;
  /// Moment diagnostics (and the seam guard they need) at every sample.
  bool moment_diagnostics = true;
  /// Tail guard enforced on the initial data and at sample times when moment diagnostics are on.
  bool enforce_tail_guard = true;
  /// Keep full fields of every sample, not only diagnostics.
  bool keep_states = false;
  /// Called after each sample is recorded.
  std::function<void(const DiagnosticsRecord&)> observer;
};

/// Samples at t = 0, every `sample_every` steps, and at t_end. FD columns and
/// monotonicity flags are filled in after the run.
Trajectory simulate(const RealField& initial, const EquationParams& params, double t_end, double dt,
                    int sample_every, const SimulationOptions& options = {});

/// u_lambda(x) = lambda^{-2/(p-1)} u(x / lambda), sampled on the grid stretched by lambda.
RealField apply_scaling_symmetry(const RealField& f, double lambda, const EquationParams& params);

}  // namespace gkdv
