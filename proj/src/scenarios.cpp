#include "gkdv/scenarios.hpp"

#include "gkdv/diagnostics.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/variational.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>

namespace gkdv {
namespace {

double gaussian(double x, double center, double width) {
  const double y = (x - center) / width;
  return std::exp(-0.5 * y * y);
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigurationError(std::string(what) + " must be positive");
}

RealField from_file(const std::filesystem::path& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open initial.file " + path.string());
  Eigen::ArrayXd u(grid.size());
  Index j = 0;
  double v;
  while (in >> v) {
    if (j == grid.size()) throw ConfigurationError("initial.file has more than n samples");
    u(j++) = v;
  }
  if (!in.eof()) throw ConfigurationError("initial.file contains a non-numeric entry");
  if (j != grid.size()) throw ConfigurationError("initial.file has " + std::to_string(j) + " samples, expected n");
  return {grid, std::move(u)};
}

}  // namespace

double FieldRng::normal() {
  if (spare_) {
    const double s = *spare_;
    spare_.reset();
    return s;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

RealField random_smooth_field(const Grid& grid, FieldRng& rng) {
  constexpr int kModes = 6;
  const double amplitude = rng.uniform(0.2, 2.0);
  const double center = rng.uniform(-4.0, 4.0);
  const double sigma = rng.uniform(0.7, 2.5);
  const double kappa = rng.uniform(0.3, 1.5);
  double c[kModes + 1], s[kModes + 1];
  for (int k = 0; k <= kModes; ++k) {
    const double decay = std::exp(-0.125 * k * k);
    c[k] = rng.normal() * decay;
    s[k] = rng.normal() * decay;
  }
  c[0] += rng.uniform() < 0.5 ? 1.0 : -1.0;
  return RealField::sample(grid, [&](double x) {
    const double y = x - center;
    double series = 0.0;
    for (int k = 0; k <= kModes; ++k) series += c[k] * std::cos(kappa * k * y) + s[k] * std::sin(kappa * k * y);
    return amplitude * gaussian(x, center, sigma) * series;
  });
}

InitialCondition build_initial_condition(const InitialConfig& init, const EquationParams& params, const Grid& grid,
                                         std::uint64_t seed) {
  params.validate();
  const double A = init.amplitude;
  if (!std::isfinite(A)) throw ConfigurationError("initial.amplitude must be finite");
  InitialCondition ic{RealField::zero(grid), std::nullopt};

  if (init.kind == "gaussian") {
    require_positive(init.width, "initial.width");
    ic.field = RealField::sample(grid, [&](double x) { return A * gaussian(x, init.x0, init.width); });
  } else if (init.kind == "two_bump") {
    require_positive(init.width, "initial.width");
    require_positive(init.x0, "initial.x0 (bump separation / 2)");
    ic.field = RealField::sample(grid, [&](double x) {
      return A * gaussian(x, -init.x0, init.width) + 0.5 * A * gaussian(x, init.x0, init.width);
    });
  } else if (init.kind == "bump_plus_perturbation") {
    require_positive(init.width, "initial.width");
    require_positive(init.carrier_n, "initial.carrier_n");
    if (!(init.perturbation_l2 >= 0.0)) throw ConfigurationError("initial.perturbation_l2 must be >= 0");
    const double bump = A * std::pow(std::numbers::pi, -0.25);
    RealField packet = RealField::sample(
        grid, [&](double x) { return gaussian(x, init.x0, init.width) * std::cos(init.carrier_n * (x - init.x0)); });
    const double norm = std::sqrt(mass(packet));
    const Eigen::ArrayXd w = packet.samples() * (init.perturbation_l2 / norm);
    const Eigen::ArrayXd b = RealField::sample(grid, [&](double x) { return bump * gaussian(x, 0.0, 1.0); }).samples();
    ic.field = RealField(grid, b + w);
    ic.predicted_I0 = init.x0 * init.x0 * init.perturbation_l2 * init.perturbation_l2;
  } else if (init.kind == "extremizer") {
    require_positive(init.width, "initial.width");
    const double g = 1.0 / (params.p - 1.0);
    ic.field = RealField::sample(grid, [&](double x) {
      const double y = (x - init.x0) / init.width;
      return y * y < 1.0 ? A * std::pow(1.0 - y * y, g) : 0.0;
    });
  } else if (init.kind == "from_file") {
    if (init.file.empty()) throw ConfigurationError("initial.kind = from_file needs initial.file");
    ic.field = from_file(init.file, grid);
    ic.field = RealField(grid, A * ic.field.samples());
  } else if (init.kind == "random") {
    FieldRng rng(seed);
    ic.field = RealField(grid, A * random_smooth_field(grid, rng).samples());
  } else {
    throw ConfigurationError("unknown initial.kind '" + init.kind + "'");
  }
  require_finite(ic.field, "initial condition");
  require_tail_guard(ic.field, 0.0);
  return ic;
}

double default_corollary2_constant(double p) {
  if (!(p > 1.0)) throw DomainError("exponent p must exceed 1");
  const double alpha_hat = 24.0 * refined_prefactor(p) * holder_chain_constant(p);
  const double beta_hat = std::abs(8.0 * p - 24.0) / (p + 1.0) * std::pow(2.0, 0.25 * (p - 3.0));
  if (beta_hat == 0.0) return std::numeric_limits<double>::infinity();
  if (!(alpha_hat > 0.0)) return 0.0;
  return std::pow(alpha_hat / (beta_hat * beta_hat), 2.0 / (p - 1.0));
}

Corollary2Gate corollary2_gate(const RealField& f, const EquationParams& params, std::optional<double> c) {
  params.validate();
  if (f.is_zero()) throw DegenerateInputError("trapping gate of a zero field");
  Corollary2Gate gate{};
  gate.c = c ? *c : default_corollary2_constant(params.p);
  const double p = params.p;
  const double M = mass(f);
  const double E = energy(f, params);
  if (!(E > 0.0)) throw DegenerateInputError("trapping gate needs positive energy");
  gate.interaction = interaction_functional(f);
  gate.center_gap = center_of_mass(f) - center_of_energy(f, params);
  // Both centers of an even field are zero up to quadrature roundoff.
  const double slack = 1e-10 * (1.0 + std::sqrt(gate.interaction) / M);
  gate.center_gap_ok = gate.center_gap >= -slack;
  gate.threshold = gate.c * std::pow(M, (3.0 * p - 7.0) / (p - 1.0)) / E;
  gate.smallness_ok = gate.interaction <= gate.threshold;
  gate.passes = gate.center_gap_ok && gate.smallness_ok;
  gate.lemma3_threshold = default_corollary2_constant(p) * M * M * M / E;
  gate.lemma3_ok = gate.center_gap_ok && gate.interaction < gate.lemma3_threshold;
  return gate;
}

}  // namespace gkdv
