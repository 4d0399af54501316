#pragma once

// Orchestration: simulations with CSV/JSON output, ODE runs, sweeps, and the
// random-field verification battery.

#include "gkdv/config.hpp"
#include "gkdv/dynamics.hpp"
#include "gkdv/ode_inequality.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

namespace gkdv {

using Json = nlohmann::ordered_json;

/// t, mass, energy, center_mass, center_energy, I, dIdt_fd, dIdt_alg, gap_fd, gap_alg,
/// gap_refined_lb, a, b, q, r, s, gram, lp1, J_len, tail, violation_flags
std::string csv_header();
std::string csv_row(const DiagnosticsRecord& rec);
void write_csv(std::ostream& out, std::span<const DiagnosticsRecord> records,
               const std::optional<std::string>& error_trailer = {}, double error_time = NAN);

struct ExperimentResult {
  std::vector<DiagnosticsRecord> records;
  Json summary;
  bool passed = false;
  std::optional<std::string> error;
};

/// Runs one experiment; errors during the run are reported in the result (and as a
/// trailer row in the CSV) rather than thrown. Configuration errors are thrown.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Sublevel table over 16 log-spaced z between min and max I.
Json sublevel_table(std::span<const DiagnosticsRecord> records, int count = 16);

struct OdeResult {
  OdeTrajectory trajectory;
  Json summary;
};
OdeResult run_ode(const OdeConfig& config);

/// One experiment per (p, kind, amplitude) combination, run concurrently.
Json run_sweep(const SweepConfig& config);

struct BatteryOptions {
  double L = 30.0;
  Index n = 512;
};
/// Every field-level invariant on `count` seeded random smooth fields.
Json verify_battery(std::uint64_t seed, int count, const BatteryOptions& options = {});

}  // namespace gkdv
