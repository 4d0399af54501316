#include "gkdv/diagnostics.hpp"
#include "gkdv/experiment.hpp"
#include "gkdv/scenarios.hpp"
#include "gkdv/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace gkdv {
namespace {

// A field passes an invariant when its margin is >= 0.
struct Tally {
  int checked = 0;
  int failures = 0;
  double worst = std::numeric_limits<double>::infinity();
  int worst_field = -1;

  void add(double margin, int field) {
    ++checked;
    if (!(margin >= 0.0)) ++failures;
    if (!(margin >= worst)) {
      worst = margin;
      worst_field = field;
    }
  }
};

const double kBatteryExponents[] = {1.5, std::sqrt(3.0), 2.0, 3.0, 5.0};

}  // namespace

Json verify_battery(std::uint64_t seed, int count, const BatteryOptions& options) {
  if (count < 1) throw ConfigurationError("battery count must be >= 1");
  const Grid grid = make_grid(options.L, options.n);
  const double dx = grid.dx();
  FieldRng rng(seed);

  std::map<std::string, Tally> tallies;
  std::map<double, double> gn_max;
  for (int i = 0; i < count; ++i) {
    const double p = kBatteryExponents[i % 5];
    const EquationParams defocusing{p, 1.0};
    const RealField f = random_smooth_field(grid, rng);

    const double M = mass(f);
    const double E = energy(f, defocusing);
    const double I = interaction_functional(f);
    const double P = integrate(f.samples().abs().pow(p + 1.0), dx);

    tallies["interaction_oracle"].add(1e-8 - std::abs(I - interaction_functional_direct(f)) / I, i);

    const TaoQuantities tq = tao_quantities(f, defocusing);
    tallies["qrs_open_unit_interval"].add(std::min({tq.q, 1.0 - tq.q, tq.r, 1.0 - tq.r, tq.s, 1.0 - tq.s}), i);
    tallies["gram_nonnegative"].add(tq.gram + 1e-9, i);
    if (p >= std::sqrt(3.0)) {
      const double Q = gap_quadratic_form(tq, p);
      tallies["quadratic_form_positive"].add(Q, i);
      tallies["quadratic_form_refined"].add((Q - refined_prefactor(p) * tq.b * tq.b * tq.r * tq.r) / Q, i);
    }

    const QuartileInterval J = quartile_interval(f);
    tallies["quartile_bound"].add(4.0 * std::sqrt(I) / M + dx - J.length, i);
    tallies["holder_chain"].add(P * P / holder_lower_bound(f, p) - 1.0, i);

    tallies["prop2_ratio"].add(prop2_ratio(f, p) - (sharp_constant_cp(p) - 1e-6), i);
    tallies["lemma4"].add(I * E / (M * M * M / 128.0) - 1.0, i);
    const Prop1Check upper = prop1_evaluate(f, p, 4.0 * p / (p - 1.0));
    tallies["prop1_upper_endpoint"].add(upper.lhs / upper.rhs - 1.0, i);
    const Prop1Check mid = prop1_evaluate(f, p, 0.5 * (3.0 + 4.0 * p / (p - 1.0)));
    tallies["prop1_interior"].add(mid.lhs / mid.rhs - 1.0, i);

    const UncertaintyChain chain = uncertainty_chain(f, p);
    tallies["uncertainty_principle"].add(chain.lhs / (0.5 * M) - 1.0, i);
    tallies["uncertainty_chain"].add(std::min(chain.lhs - chain.middle, chain.middle - chain.rhs * (1.0 - 1e-6)) / chain.lhs, i);
    const double gn = gagliardo_nirenberg_ratio(f, p);
    gn_max[p] = std::max(gn_max[p], gn);
    tallies["gagliardo_nirenberg_soliton_bound"].add(1.0 - gn / gagliardo_nirenberg_constant(p), i);

    const RealField star = symmetric_decreasing_rearrangement(f);
    const double I_star = interaction_functional(star);
    const double slack = 2.0 * M * M * dx * dx;
    tallies["rearrangement_decreases_I"].add((I * (1.0 + 1e-8) + slack - I_star) / I, i);
    tallies["rearrangement_preserves_mass"].add(1e-8 - std::abs(mass(star) - M) / M, i);
    tallies["rearrangement_preserves_lp1"].add(
        1e-8 - std::abs(integrate(star.samples().abs().pow(p + 1.0), dx) - P) / P, i);
  }

  Json report{{"seed", seed}, {"count", count}, {"grid", Json{{"L", options.L}, {"n", options.n}}}};
  Json invariants = Json::array();
  int failures = 0;
  for (const auto& [name, t] : tallies) {
    failures += t.failures;
    invariants.push_back(Json{{"name", name},
                              {"checked", t.checked},
                              {"failures", t.failures},
                              {"worst_margin", t.worst},
                              {"worst_field", t.worst_field}});
  }
  report["invariants"] = invariants;
  Json gn = Json::array();
  for (const auto& [p, ratio] : gn_max)
    gn.push_back(Json{{"p", p}, {"soliton_estimate", gagliardo_nirenberg_constant(p)}, {"battery_max", ratio}});
  report["gagliardo_nirenberg"] = gn;
  report["failures"] = failures;
  report["passed"] = failures == 0;
  return report;
}

}  // namespace gkdv
