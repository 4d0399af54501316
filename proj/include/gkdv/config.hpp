#pragma once

// TOML experiment, ODE and sweep configurations. Unknown keys are errors.

#include "gkdv/equation.hpp"
#include "gkdv/ode_inequality.hpp"
#include "gkdv/spectral.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gkdv {

struct InitialConfig {
  std::string kind = "gaussian";  // gaussian | two_bump | bump_plus_perturbation | extremizer | from_file | random
  double amplitude = 1.0;
  double width = 1.0;
  double x0 = 0.0;
  double carrier_n = 4.0;
  double perturbation_l2 = 0.1;
  std::filesystem::path file;  // samples for from_file, one value per line
};

struct ExperimentConfig {
  double L = 30.0;
  Index n = 1024;
  EquationParams equation;
  double dt = 1e-4;
  double t_end = 1.0;
  int sample_every = 100;
  InitialConfig initial;
  std::vector<std::string> diagnostics{"moments", "sublevel"};
  std::filesystem::path csv;
  std::filesystem::path json;
  std::optional<double> corollary2_c;
  std::uint64_t seed = 0;

  bool enabled(std::string_view name) const;
  void validate() const;
};

struct OdeConfig {
  OdeParams params;
  double f0 = 0.25;
  double T = 10.0;
  std::optional<double> dt;  // defaults to the largest admissible step
  int sample_every = 10;
  int z_count = 16;
  std::filesystem::path csv;
  std::filesystem::path json;
};

struct SweepConfig {
  ExperimentConfig base;
  std::vector<double> p;
  std::vector<std::string> kinds;
  std::vector<double> amplitudes;
  int workers = 0;  // 0 = hardware concurrency
};

ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
OdeConfig parse_ode_config(std::string_view text, const std::filesystem::path& base_dir = {});
OdeConfig load_ode_config(const std::filesystem::path& path);
SweepConfig parse_sweep_config(std::string_view text, const std::filesystem::path& base_dir = {});
SweepConfig load_sweep_config(const std::filesystem::path& path);

}  // namespace gkdv
