#pragma once

// Sharp weighted inequality (x^2 u^2) x (L^{p+1}) >= c_p (L^2), its extremizer and a
// constrained minimizer that recovers it, the (alpha, beta) exponent family,
// the sorted rearrangement, and the uncertainty-principle chain.

#include "gkdv/spectral.hpp"

#include <numbers>
#include <vector>

namespace gkdv {

inline constexpr double kSharpConstantFloor = 1.0 / (2.0 * std::numbers::pi * std::numbers::e);

struct SharpConstant {
  double p;
  double c_p;
  double lower_floor = kSharpConstantFloor;
};

/// Closed form through log-Gamma.
double sharp_constant_cp(double p);
SharpConstant sharp_constant(double p);

/// (1 - x^2)_+^{1/(p-1)}; the grid must put at least 64 cells inside [-1, 1].
RealField extremizer_field(double p, const Grid& grid);

/// a (1 - b^2 x^2)_+^{1/(p-1)} with int u^2 = int x^2 u^2 = 1.
struct NormalizedExtremizer {
  double a, b;
};
NormalizedExtremizer normalized_extremizer(double p);

/// (int (x - <x>_M)^2 u^2) (int |u|^{p+1})^{4/(p-1)} / (int u^2)^{(3p+1)/(p-1)}.
double prop2_ratio(const RealField& f, double p);

struct MinimizerLogEntry {
  int iter;
  double objective;
  double mass_residual;    // int u^2 - 1
  double moment_residual;  // int x^2 u^2 - 1
  double el_residual;      // |u^p - l1 x^2 u - l2 u| / |u^p| on the support
};

struct MinimizerResult {
  RealField field;
  double lambda1;
  double lambda2;
  double objective;  // int |u|^{p+1}
  std::vector<MinimizerLogEntry> log;
};

struct MinimizerOptions {
  int budget = 500;
  double tolerance = 1e-7;  // on the Euler-Lagrange residual
};

/// Minimizes int |u|^{p+1} subject to int u^2 = 1 = int x^2 u^2 starting from a
/// positive even guess. Each iterate is rearranged to be even and decreasing.
MinimizerResult minimize_constrained(double p, const RealField& guess, const MinimizerOptions& options = {});

/// Grid used by the CLI and tests for the minimizer.
Grid minimizer_grid();

/// Sorted |f| placed at x = 0, +dx, -dx, +2dx, ...
RealField symmetric_decreasing_rearrangement(const RealField& f);

struct SymmetricIdentity {
  double lhs;  // I(u)
  double rhs;  // 2 (int x^2 u^2)(int u^2)
};
/// Throws PreconditionError unless f is even to relative 1e-8.
SymmetricIdentity symmetric_identity_check(const RealField& f);

struct ExponentPair {
  double alpha;
  double beta;
};
/// beta = ((4 - alpha) p + 5 alpha - 12) / (p + 3), alpha in [3, 4p/(p-1)].
double prop1_beta(double alpha, double p);
ExponentPair prop1_exponents(double alpha, double p);
/// Proof-chain constant: 1/128 at alpha = 3, 2 c_p (p+1)^{-4/(p-1)} at the upper
/// endpoint, geometric interpolation in between.
double prop1_constant(double alpha, double p);

struct Prop1Check {
  double lhs;  // E^beta I   (defocusing energy)
  double rhs;  // c M^alpha
  bool holds;
};
Prop1Check prop1_evaluate(const RealField& f, double p, double alpha);
bool prop1_endpoint_check(const RealField& f, double p, double alpha);

/// Numerical estimate of the Gagliardo-Nirenberg constant
///   int |u|^{p+1} <= G_p |u|_2^{(p+3)/2} |u_x|_2^{(p-1)/2},
/// from the sech^{2/(p-1)} ground state; cached per p.
double gagliardo_nirenberg_constant(double p);
/// Raises the cached estimate if `ratio` of some field exceeds it.
void observe_gagliardo_nirenberg_ratio(double p, double ratio);
double gagliardo_nirenberg_ratio(const RealField& f, double p);

struct UncertaintyChain {
  double lhs;     // |x u| |u_x|
  double middle;  // G^{-2/(p-1)} |x u| |u|_{p+1}^{(2p+2)/(p-1)} / |u|^{(p+3)/(p-1)}
  double rhs;     // sqrt(c_p) G^{-2/(p-1)} |u|^2
};
UncertaintyChain uncertainty_chain(const RealField& f, double p);

}  // namespace gkdv
