#pragma once

// Scalar functionals of a single field: conservation laws, centers, the
// interaction functional I(u) = \iint u(x)^2 (x-y)^2 u(y)^2 dx dy, its first
// variation, the (a, b, q, r, s) parametrization of the center-gap rate, and
// the quartile interval.

#include "gkdv/equation.hpp"
#include "gkdv/spectral.hpp"

#include <span>
#include <string>
#include <vector>

namespace gkdv {

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double center_mass = 0.0;
  double center_energy = 0.0;
  double interaction = 0.0;
  double dIdt_fd = NAN;
  double dIdt_alg = 0.0;
  double gap_fd = NAN;   // E M * centered difference of (center_mass - center_energy)
  double gap_alg = 0.0;  // E M * d/dt (center_mass - center_energy) from the quadratic form
  double gap_refined_lb = 0.0;
  double a = 0.0, b = 0.0, q = 0.0, r = 0.0, s = 0.0;
  double gram = 0.0;
  double lp1 = 0.0;  // int |u|^{p+1}
  double J_len = 0.0;
  double tail = 0.0;
  std::string violation_flags;
};

double mass(const RealField& f);
double energy(const RealField& f, const EquationParams& params);

double center_of_mass(const RealField& f);
/// Energy density weight is u_x^2/2 + |u|^{p+1}/(p+1) independent of mu; normalized by E(mu).
double center_of_energy(const RealField& f, const EquationParams& params);

/// O(n) evaluation through I = 2 M int (x - <x>_M)^2 u^2.
double interaction_functional(const RealField& f);
/// Brute-force double Riemann sum; n <= 8192.
double interaction_functional_direct(const RealField& f);

/// Right-hand side of the first-variation identity for I along defocusing gKdV flow:
///   dI/dt = 24 E M (<x>_M - <x>_E) + (8p - 24)/(p + 1) (<x>_M M P - M int x |u|^{p+1}).
double dIdt_algebraic(const RealField& f, const EquationParams& params);

struct TaoQuantities {
  double a, b, q, r, s;
  double gram;  // 1 - q^2 - r^2 - s^2 + 2 q r s
};
TaoQuantities tao_quantities(const RealField& f, const EquationParams& params);

/// Q = 3/2 (1-q^2) a^2 + (2s - (p+3)/(p+1) q r) a b + 1/2 (1 - 4p/(p+1)^2 r^2) b^2.
double gap_quadratic_form(const TaoQuantities& tq, double p);
double gap_quadratic_form(const RealField& f, const EquationParams& params);
/// E M d/dt(<x>_M - <x>_E) = M^2 Q for defocusing flow.
double gap_rate_scaled(const RealField& f, const EquationParams& params);

/// 1/2 - 2p/(p+1)^2.
double refined_prefactor(double p);
/// Lower bound on d/dt(<x>_M - <x>_E):  C_p (int |u|^{p+1})^2 / (E M).
double refined_gap_lower_bound(const RealField& f, const EquationParams& params);

struct QuartileInterval {
  double lo, hi, length;
};
/// 1/4 and 3/4 quantiles of u^2/M, linear interpolation of the cumulative mass.
QuartileInterval quartile_interval(const RealField& f);

/// 2^{-(p+1)} 4^{-(p-1)}.
double holder_chain_constant(double p);
/// c M^{2p} I^{(1-p)/2}, a lower bound for (int |u|^{p+1})^2.
double holder_lower_bound(const RealField& f, double p);

struct RecordOptions {
  bool moments = true;  // centers, I, identities, J (need the tail guard)
  bool enforce_tail_guard = true;
};
DiagnosticsRecord compute_record(double t, const RealField& f, const EquationParams& params,
                                 const RecordOptions& options = {});

/// Centered differences of I and of E M (<x>_M - <x>_E) at interior samples.
void fill_finite_differences(std::span<DiagnosticsRecord> records);

/// Appends "mono" where the FD gap slope drops below the refined bound (p >= sqrt 3, mu = 1).
void flag_monotonicity(std::span<DiagnosticsRecord> records, const EquationParams& params);

}  // namespace gkdv
