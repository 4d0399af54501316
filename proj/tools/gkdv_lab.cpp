// gkdv_lab: command-line front end for simulations, batteries, the minimizer and the ODE model.

#include "gkdv/config.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/experiment.hpp"
#include "gkdv/variational.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

int simulate_cmd(const std::string& path) {
  const gkdv::ExperimentConfig cfg = gkdv::load_experiment_config(path);
  const gkdv::ExperimentResult r = gkdv::run_experiment(cfg);
  if (cfg.json.empty()) std::cout << r.summary.dump(2) << '\n';
  for (const auto& c : r.summary["checks"])
    std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << '\n';
  if (r.error) std::cerr << "run stopped: " << *r.error << '\n';
  std::cout << (r.passed ? "passed" : "failed") << '\n';
  return r.passed ? 0 : 1;
}

int verify_cmd(std::uint64_t seed, int count, const std::string& out) {
  const gkdv::Json report = gkdv::verify_battery(seed, count);
  if (out.empty()) {
    std::cout << report.dump(2) << '\n';
  } else {
    std::ofstream f(out);
    f << report.dump(2) << '\n';
    std::cout << "failures: " << report["failures"].get<int>() << '\n';
  }
  return report["passed"].get<bool>() ? 0 : 1;
}

int minimize_cmd(double p, int budget, double tolerance, const std::string& log_path) {
  const gkdv::Grid grid = gkdv::minimizer_grid();
  const gkdv::RealField guess = gkdv::RealField::sample(grid, [](double x) { return std::exp(-0.5 * x * x); });
  gkdv::MinimizerOptions options;
  options.budget = budget;
  options.tolerance = tolerance;
  const gkdv::MinimizerResult r = gkdv::minimize_constrained(p, guess, options);
  if (!log_path.empty()) {
    std::ofstream log(log_path);
    log << "iter,objective,mass_residual,moment_residual,el_residual\n";
    char buf[160];
    for (const auto& e : r.log) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", e.iter, e.objective, e.mass_residual,
                    e.moment_residual, e.el_residual);
      log << buf;
    }
  }
  const double cp = gkdv::sharp_constant_cp(p);
  const gkdv::Json j{{"p", p},
                     {"iterations", r.log.size()},
                     {"objective", r.objective},
                     {"objective_expected", std::pow(cp, 0.25 * (p - 1.0))},
                     {"c_p", cp},
                     {"c_p_from_minimizer", gkdv::prop2_ratio(r.field, p)},
                     {"lambda1", r.lambda1},
                     {"lambda2", r.lambda2},
                     {"el_residual", r.log.back().el_residual}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

int ode_cmd(const std::string& path) {
  const gkdv::OdeConfig cfg = gkdv::load_ode_config(path);
  const gkdv::OdeResult r = gkdv::run_ode(cfg);
  if (cfg.json.empty()) std::cout << r.summary.dump(2) << '\n';
  const auto& cert = r.summary["certificate"];
  std::cout << "hypothesis_ok " << cert["hypothesis_ok"].get<bool>() << " trapped " << cert["trapped"].get<bool>()
            << " inf_f " << cert["inf_f"].get<double>() << '\n';
  return 0;
}

int sweep_cmd(const std::string& path) {
  const gkdv::SweepConfig cfg = gkdv::load_sweep_config(path);
  const gkdv::Json out = gkdv::run_sweep(cfg);
  for (const auto& r : out["runs"])
    std::cout << (r["passed"].get<bool>() ? "PASS " : "FAIL ") << r["tag"].get<std::string>() << '\n';
  return out["passed"].get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral laboratory for the defocusing gKdV equation"};
  app.require_subcommand(1);

  std::string config;
  auto* sim = app.add_subcommand("simulate", "Run one experiment from a TOML config");
  sim->add_option("config", config, "experiment TOML")->required()->check(CLI::ExistingFile);

  std::uint64_t seed = 42;
  int count = 1000;
  std::string verify_out;
  auto* verify = app.add_subcommand("verify", "Random-field inequality battery");
  verify->add_option("--seed", seed, "RNG seed");
  verify->add_option("--count", count, "number of fields")->check(CLI::PositiveNumber);
  verify->add_option("--out", verify_out, "write the JSON report here instead of stdout");

  double p = 3.0;
  int budget = 500;
  double tolerance = 1e-7;
  std::string log_path;
  auto* minimize = app.add_subcommand("minimize", "Constrained minimizer for the sharp constant");
  minimize->add_option("--p", p, "exponent p > 1")->required();
  minimize->add_option("--budget", budget, "iteration budget");
  minimize->add_option("--tolerance", tolerance, "stop when the Euler-Lagrange residual falls below this");
  minimize->add_option("--log", log_path, "iteration log CSV");

  auto* ode = app.add_subcommand("ode", "Integro-differential equality model");
  ode->add_option("config", config, "ODE TOML")->required()->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand("sweep", "Concurrent parameter sweep");
  sweep->add_option("config", config, "sweep TOML")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return simulate_cmd(config);
    if (*verify) return verify_cmd(seed, count, verify_out);
    if (*minimize) return minimize_cmd(p, budget, tolerance, log_path);
    if (*ode) return ode_cmd(config);
    if (*sweep) return sweep_cmd(config);
  } catch (const gkdv::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (last residual " << e.residual_history().back() << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
