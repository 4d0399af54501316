#include "gkdv/experiment.hpp"

#include "gkdv/errors.hpp"
#include "gkdv/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>

namespace gkdv {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return s;
}

void ensure_parent(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
}

void write_json(const std::filesystem::path& path, const Json& j) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw ConfigurationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

double relative_drift(double value, double reference) {
  const double d = std::abs(value - reference);
  if (reference == 0.0) return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return d / std::abs(reference);
}

Json check(const std::string& name, bool pass, double value, double limit) {
  return Json{{"name", name}, {"pass", pass}, {"value", value}, {"limit", limit}};
}

std::string suffixed(const std::filesystem::path& path, const std::string& tag) {
  if (path.empty()) return {};
  std::filesystem::path out = path;
  out.replace_filename(path.stem().string() + "_" + tag + path.extension().string());
  return out.string();
}

}  // namespace

std::string csv_header() {
  return "t,mass,energy,center_mass,center_energy,I,dIdt_fd,dIdt_alg,gap_fd,gap_alg,gap_refined_lb,a,b,q,r,s,gram,"
         "lp1,J_len,tail,violation_flags";
}

std::string csv_row(const DiagnosticsRecord& r) {
  std::string row;
  for (double v : {r.t, r.mass, r.energy, r.center_mass, r.center_energy, r.interaction, r.dIdt_fd, r.dIdt_alg,
                   r.gap_fd, r.gap_alg, r.gap_refined_lb, r.a, r.b, r.q, r.r, r.s, r.gram, r.lp1, r.J_len, r.tail}) {
    row += fmt(v);
    row += ',';
  }
  row += r.violation_flags;
  return row;
}

void write_csv(std::ostream& out, std::span<const DiagnosticsRecord> records,
               const std::optional<std::string>& error_trailer, double error_time) {
  out << csv_header() << '\n';
  for (const auto& r : records) out << csv_row(r) << '\n';
  if (error_trailer) {
    out << fmt(error_time);
    for (int i = 0; i < 19; ++i) out << ",nan";
    out << ",error: " << sanitize(*error_trailer) << '\n';
  }
  out.flush();
}

Json sublevel_table(std::span<const DiagnosticsRecord> records, int count) {
  Json table{{"z", Json::array()}, {"measure", Json::array()}, {"fit", nullptr}};
  if (records.size() < 2) return table;
  std::vector<double> t, f;
  for (const auto& r : records) {
    t.push_back(r.t);
    f.push_back(r.interaction);
  }
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  if (!(*lo > 0.0) || !(*hi > *lo)) return table;
  const auto z = log_spaced(*lo, *hi, count);
  for (double zi : z) {
    table["z"].push_back(zi);
    table["measure"].push_back(sublevel_measure(t, f, zi));
  }
  try {
    const SublevelFit fit = fit_sublevel_exponent(t, f, z);
    table["fit"] = Json{{"exponent", fit.exponent}, {"prefactor", fit.prefactor}, {"points", fit.points}};
  } catch (const DegenerateInputError&) {
  }
  return table;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Grid grid = make_grid(config.L, config.n);
  const EquationParams& params = config.equation;
  const InitialCondition ic = build_initial_condition(config.initial, params, grid, config.seed);

  ExperimentResult result;
  Json& s = result.summary;
  s["run"] = Json{{"kind", config.initial.kind},
                  {"L", config.L},
                  {"n", config.n},
                  {"p", params.p},
                  {"mu", params.mu},
                  {"dt", config.dt},
                  {"t_end", config.t_end},
                  {"sample_every", config.sample_every},
                  {"seed", config.seed},
                  {"initial", Json{{"amplitude", config.initial.amplitude},
                                   {"width", config.initial.width},
                                   {"x0", config.initial.x0},
                                   {"carrier_n", config.initial.carrier_n},
                                   {"perturbation_l2", config.initial.perturbation_l2}}}};

  std::optional<Corollary2Gate> gate;
  if (config.enabled("corollary2") && !ic.field.is_zero()) gate = corollary2_gate(ic.field, params, config.corollary2_c);

  SimulationOptions options;
  options.moment_diagnostics = config.enabled("moments");
  options.observer = [&](const DiagnosticsRecord& r) { result.records.push_back(r); };
  double error_time = NAN;
  try {
    Trajectory traj = simulate(ic.field, params, config.t_end, config.dt, config.sample_every, options);
    result.records = std::move(traj.records);
  } catch (const TruncationError& e) {
    result.error = e.what();
    error_time = e.time();
  } catch (const BlowupError& e) {
    result.error = e.what();
    error_time = e.time();
  } catch (const NumericError& e) {
    result.error = e.what();
  }
  if (result.error) {
    fill_finite_differences(result.records);
    if (options.moment_diagnostics) flag_monotonicity(result.records, params);
    if (std::isnan(error_time) && !result.records.empty()) error_time = result.records.back().t;
  }

  if (!config.csv.empty()) {
    ensure_parent(config.csv);
    std::ofstream out(config.csv);
    if (!out) throw ConfigurationError("cannot write " + config.csv.string());
    write_csv(out, result.records, result.error, error_time);
  }

  const auto& recs = result.records;
  Json checks = Json::array();
  s["samples"] = recs.size();
  if (!recs.empty()) {
    const auto& first = recs.front();
    double mass_drift = 0.0, energy_drift = 0.0;
    for (const auto& r : recs) {
      mass_drift = std::max(mass_drift, relative_drift(r.mass, first.mass));
      energy_drift = std::max(energy_drift, relative_drift(r.energy, first.energy));
    }
    s["conservation"] = Json{{"mass_initial", first.mass},
                             {"mass_final", recs.back().mass},
                             {"mass_max_rel_drift", mass_drift},
                             {"energy_initial", first.energy},
                             {"energy_final", recs.back().energy},
                             {"energy_max_rel_drift", energy_drift}};
    checks.push_back(check("mass_conservation", mass_drift <= 1e-7, mass_drift, 1e-7));
    checks.push_back(check("energy_conservation", energy_drift <= 1e-7, energy_drift, 1e-7));

    int flagged = 0;
    for (const auto& r : recs)
      if (!r.violation_flags.empty() && r.violation_flags != "mono") ++flagged;
    checks.push_back(check("record_invariants", flagged == 0, flagged, 0));
  }

  if (config.enabled("moments") && !recs.empty()) {
    double I_min = recs.front().interaction, I_max = I_min, t_min = 0.0;
    for (const auto& r : recs) {
      if (r.interaction < I_min) {
        I_min = r.interaction;
        t_min = r.t;
      }
      I_max = std::max(I_max, r.interaction);
    }
    s["interaction"] = Json{{"initial", recs.front().interaction}, {"min", I_min}, {"t_min", t_min}, {"max", I_max}};
    if (ic.predicted_I0) {
      s["interaction"]["predicted_initial"] = *ic.predicted_I0;
      s["interaction"]["measured_over_predicted"] = recs.front().interaction / *ic.predicted_I0;
    }

    double dI_err = 0.0, gap_err = 0.0;
    for (const auto& r : recs) {
      if (std::isnan(r.dIdt_fd)) continue;
      if (r.dIdt_alg != 0.0) dI_err = std::max(dI_err, std::abs(r.dIdt_fd - r.dIdt_alg) / std::abs(r.dIdt_alg));
      if (r.gap_alg != 0.0) gap_err = std::max(gap_err, std::abs(r.gap_fd - r.gap_alg) / std::abs(r.gap_alg));
    }
    s["identities"] = Json{{"dIdt_max_rel_err", dI_err}, {"gap_max_rel_err", gap_err}};

    const bool asserted = params.mu == 1.0 && params.p >= std::sqrt(3.0);
    int violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : recs) {
      if (r.violation_flags.find("mono") != std::string::npos) ++violations;
      if (!std::isnan(r.gap_fd) && r.gap_refined_lb > 0.0)
        worst = std::min(worst, r.gap_fd / (r.energy * r.mass) / r.gap_refined_lb - 1.0);
    }
    s["monotonicity"] = Json{{"asserted", asserted},
                             {"violations", violations},
                             {"worst_relative_margin", std::isfinite(worst) ? Json(worst) : Json(nullptr)}};
    if (asserted) checks.push_back(check("refined_monotonicity", violations == 0, violations, 0));
  }

  if (config.enabled("sublevel")) s["sublevel"] = sublevel_table(recs);

  if (gate) {
    double I_inf = std::numeric_limits<double>::infinity();
    for (const auto& r : recs) I_inf = std::min(I_inf, r.interaction);
    const double I0 = recs.empty() ? gate->interaction : recs.front().interaction;
    const bool trapped = !result.error && I_inf >= 0.25 * I0;
    auto finite_or_null = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
    s["corollary2"] = Json{{"c", finite_or_null(gate->c)},
                           {"center_gap", gate->center_gap},
                           {"center_gap_ok", gate->center_gap_ok},
                           {"interaction", gate->interaction},
                           {"threshold", finite_or_null(gate->threshold)},
                           {"smallness_ok", gate->smallness_ok},
                           {"gate_passes", gate->passes},
                           {"lemma3_threshold", finite_or_null(gate->lemma3_threshold)},
                           {"lemma3_ok", gate->lemma3_ok},
                           {"inf_I", I_inf},
                           {"inf_over_initial", I_inf / I0},
                           {"trapped", trapped}};
    if (gate->passes) checks.push_back(check("corollary2_trapping", trapped, I_inf / I0, 0.25));
  }

  if (result.error) s["error"] = Json{{"message", *result.error}, {"t", error_time}};
  bool all = !result.error;
  for (const auto& c : checks) all = all && c["pass"].get<bool>();
  s["checks"] = checks;
  s["passed"] = all;
  result.passed = all;
  if (!config.json.empty()) write_json(config.json, s);
  return result;
}

OdeResult run_ode(const OdeConfig& config) {
  const double dt = config.dt ? *config.dt : ode_max_step(config.params, config.f0);
  OdeRunOptions opts;
  opts.sample_every = config.sample_every;
  OdeResult result{simulate_equality_ode(config.params, config.f0, config.T, dt, opts), {}};
  const auto& traj = result.trajectory;

  if (!config.csv.empty()) {
    ensure_parent(config.csv);
    std::ofstream out(config.csv);
    if (!out) throw ConfigurationError("cannot write " + config.csv.string());
    out << "t,f,F,rhs\n";
    for (const auto& st : traj.states) out << fmt(st.t) << ',' << fmt(st.f) << ',' << fmt(st.F) << ',' << fmt(st.rhs) << '\n';
  }

  const Lemma3Certificate cert = lemma3_certificate(config.params, config.f0, config.T);
  Json& s = result.summary;
  s["params"] = Json{{"alpha", config.params.alpha}, {"beta", config.params.beta}, {"gamma", config.params.gamma},
                     {"p", config.params.p},         {"delta", config.params.delta}, {"f0", config.f0},
                     {"T", config.T},                {"dt", dt}};
  s["floor_crossing"] = traj.floor_crossing ? Json(*traj.floor_crossing) : Json(nullptr);
  s["certificate"] = Json{{"hypothesis_ok", cert.hypothesis_ok}, {"trapped", cert.trapped}, {"inf_f", cert.inf_f},
                          {"threshold", cert.threshold},          {"f0", cert.f0},          {"T", cert.T}};

  const auto t = traj.times();
  const auto f = traj.values();
  Json table{{"z", Json::array()}, {"measure", Json::array()}, {"fit", nullptr}};
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  if (t.size() >= 2 && *hi > *lo) {
    const auto z = log_spaced(*lo, *hi, config.z_count);
    for (double zi : z) {
      table["z"].push_back(zi);
      table["measure"].push_back(sublevel_measure(t, f, zi));
    }
    try {
      const SublevelFit fit = fit_sublevel_exponent(t, f, z);
      table["fit"] = Json{{"exponent", fit.exponent}, {"prefactor", fit.prefactor}, {"points", fit.points}};
    } catch (const DegenerateInputError&) {
    }
  }
  s["sublevel"] = table;
  if (!config.json.empty()) write_json(config.json, s);
  return result;
}

Json run_sweep(const SweepConfig& config) {
  struct Job {
    ExperimentConfig cfg;
    std::string tag;
  };
  std::vector<Job> jobs;
  for (double p : config.p)
    for (const auto& kind : config.kinds)
      for (double amp : config.amplitudes) {
        Job job{config.base, {}};
        job.cfg.equation.p = p;
        job.cfg.initial.kind = kind;
        job.cfg.initial.amplitude = amp;
        job.tag = "p" + fmt(p) + "_" + kind + "_A" + fmt(amp);
        job.cfg.csv = suffixed(config.base.csv, job.tag);
        job.cfg.json = suffixed(config.base.json, job.tag);
        jobs.push_back(std::move(job));
      }

  std::vector<Json> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      Json entry{{"tag", jobs[i].tag}};
      try {
        ExperimentResult r = run_experiment(jobs[i].cfg);
        entry["passed"] = r.passed;
        entry["summary"] = std::move(r.summary);
      } catch (const std::exception& e) {
        entry["passed"] = false;
        entry["error"] = e.what();
      }
      results[i] = std::move(entry);
    }
  };
  unsigned count = config.workers > 0 ? static_cast<unsigned>(config.workers) : std::thread::hardware_concurrency();
  count = std::max(1u, std::min<unsigned>(count, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < count; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  Json out{{"runs", Json::array()}, {"passed", true}};
  for (auto& r : results) {
    if (!r["passed"].get<bool>()) out["passed"] = false;
    out["runs"].push_back(std::move(r));
  }
  return out;
}

}  // namespace gkdv
