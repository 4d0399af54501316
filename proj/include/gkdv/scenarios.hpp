#pragma once

// Initial data, the seeded random-field generator shared by the batteries, and
// the small-data trapping gate.

#include "gkdv/config.hpp"
#include "gkdv/equation.hpp"
#include "gkdv/spectral.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace gkdv {

struct InitialCondition {
  RealField field;
  /// x0^2 |w|^2 for bump_plus_perturbation.
  std::optional<double> predicted_I0;
};

/// Kinds:
///   gaussian                A exp(-(x - x0)^2 / (2 w^2))
///   two_bump                A g(x + x0) + (A/2) g(x - x0), g the Gaussian of width w, x0 > 0
///   bump_plus_perturbation  A pi^{-1/4} exp(-x^2/2) + w, w a packet at x0 of envelope width
///                           `width` and carrier N, normalized to |w| = perturbation_l2
///   extremizer              A (1 - (x - x0)^2 / w^2)_+^{1/(p-1)}
///   from_file               one sample per line, exactly n lines
///   random                  random_smooth_field(grid, seed) scaled by A
InitialCondition build_initial_condition(const InitialConfig& init, const EquationParams& params, const Grid& grid,
                                         std::uint64_t seed = 0);

/// Uniform in [0, 1) from the top 53 bits; std::mt19937_64 is fully specified, so
/// fields are reproducible across platforms.
class FieldRng {
 public:
  explicit FieldRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  int index(int n) { return static_cast<int>(uniform() * n); }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Gaussian envelope times a random trigonometric series with decaying coefficients,
/// centered within |x| <= 4 and well inside the tail guard for L >= 20.
RealField random_smooth_field(const Grid& grid, FieldRng& rng);

struct Corollary2Gate {
  bool center_gap_ok;  // <x>_E <= <x>_M at t = 0
  bool smallness_ok;   // I <= c M^{(3p-7)/(p-1)} / E
  bool passes;
  double c;
  double interaction;
  double threshold;  // c M^{(3p-7)/(p-1)} / E
  double center_gap;  // <x>_M - <x>_E
  // The same test with the differential-inequality constants carried through exactly,
  // I < c M^3 / E; see README.
  bool lemma3_ok;
  double lemma3_threshold;
};

/// (alpha_hat / beta_hat^2)^{2/(p-1)} with alpha_hat = 24 C_p c_H and
/// beta_hat = |8p - 24| / (p + 1) 2^{(p-3)/4}; infinite at p = 3.
double default_corollary2_constant(double p);

Corollary2Gate corollary2_gate(const RealField& f, const EquationParams& params, std::optional<double> c = {});

}  // namespace gkdv
