#include "gkdv/config.hpp"

#include "gkdv/errors.hpp"

#include <toml.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace gkdv {
namespace {

using KeySet = std::set<std::string, std::less<>>;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

toml::table parse_text(std::string_view text) {
  try {
    return toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream ss;
    ss << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
    throw ConfigurationError(ss.str());
  }
}

void check_keys(const toml::table& table, const std::string& where, const KeySet& allowed) {
  for (auto&& [key, node] : table) {
    if (!allowed.contains(key.str()))
      throw ConfigurationError("unknown key '" + std::string(key.str()) + "' in " + where);
  }
}

const toml::table* section(const toml::table& root, std::string_view name) {
  const toml::node* node = root.get(name);
  if (!node) return nullptr;
  const toml::table* t = node->as_table();
  if (!t) throw ConfigurationError("[" + std::string(name) + "] must be a table");
  return t;
}

// Numeric key; integers are accepted where reals are expected.
template <typename T>
void read(const toml::table* t, std::string_view section_name, std::string_view key, T& out) {
  if (!t) return;
  const toml::node* node = t->get(key);
  if (!node) return;
  const std::string where = std::string(section_name) + "." + std::string(key);
  if constexpr (std::is_same_v<T, std::string>) {
    if (!node->is_string()) throw ConfigurationError(where + " must be a string");
    out = *node->value<std::string>();
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!node->is_number()) throw ConfigurationError(where + " must be a number");
    out = *node->value<double>();
  } else {
    if (!node->is_integer()) throw ConfigurationError(where + " must be an integer");
    const auto v = *node->value<std::int64_t>();
    if (v < 0 && std::is_unsigned_v<T>) throw ConfigurationError(where + " must be non-negative");
    out = static_cast<T>(v);
  }
}

template <typename T>
std::vector<T> read_array(const toml::table* t, std::string_view section_name, std::string_view key) {
  std::vector<T> out;
  if (!t) return out;
  const toml::node* node = t->get(key);
  if (!node) return out;
  const std::string where = std::string(section_name) + "." + std::string(key);
  const toml::array* arr = node->as_array();
  if (!arr) throw ConfigurationError(where + " must be an array");
  for (const toml::node& item : *arr) {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!item.is_string()) throw ConfigurationError(where + " entries must be strings");
      out.push_back(*item.value<std::string>());
    } else {
      if (!item.is_number()) throw ConfigurationError(where + " entries must be numbers");
      out.push_back(*item.value<double>());
    }
  }
  return out;
}

const KeySet kExperimentSections{"grid", "equation", "time", "initial", "diagnostics", "output", "corollary2", "seed"};

void fill_experiment(const toml::table& root, const std::filesystem::path& base_dir, ExperimentConfig& cfg) {
  const auto* grid = section(root, "grid");
  if (grid) check_keys(*grid, "[grid]", {"L", "n"});
  read(grid, "grid", "L", cfg.L);
  read(grid, "grid", "n", cfg.n);

  const auto* eq = section(root, "equation");
  if (eq) check_keys(*eq, "[equation]", {"p", "mu"});
  read(eq, "equation", "p", cfg.equation.p);
  read(eq, "equation", "mu", cfg.equation.mu);

  const auto* time = section(root, "time");
  if (time) check_keys(*time, "[time]", {"dt", "t_end", "sample_every"});
  read(time, "time", "dt", cfg.dt);
  read(time, "time", "t_end", cfg.t_end);
  read(time, "time", "sample_every", cfg.sample_every);

  const auto* init = section(root, "initial");
  if (init)
    check_keys(*init, "[initial]", {"kind", "amplitude", "width", "x0", "carrier_n", "perturbation_l2", "file"});
  read(init, "initial", "kind", cfg.initial.kind);
  read(init, "initial", "amplitude", cfg.initial.amplitude);
  read(init, "initial", "width", cfg.initial.width);
  read(init, "initial", "x0", cfg.initial.x0);
  read(init, "initial", "carrier_n", cfg.initial.carrier_n);
  read(init, "initial", "perturbation_l2", cfg.initial.perturbation_l2);
  std::string file;
  read(init, "initial", "file", file);
  if (!file.empty()) {
    std::filesystem::path fp(file);
    cfg.initial.file = fp.is_relative() && !base_dir.empty() ? base_dir / fp : fp;
  }

  const auto* diag = section(root, "diagnostics");
  if (diag) {
    check_keys(*diag, "[diagnostics]", {"enable"});
    if (diag->get("enable")) cfg.diagnostics = read_array<std::string>(diag, "diagnostics", "enable");
  }

  const auto* out = section(root, "output");
  if (out) check_keys(*out, "[output]", {"csv", "json"});
  std::string csv, json;
  read(out, "output", "csv", csv);
  read(out, "output", "json", json);
  cfg.csv = csv;
  cfg.json = json;

  const auto* c2 = section(root, "corollary2");
  if (c2) {
    check_keys(*c2, "[corollary2]", {"c"});
    double c = -1.0;
    read(c2, "corollary2", "c", c);
    if (c2->get("c")) cfg.corollary2_c = c;
    if (!cfg.enabled("corollary2")) cfg.diagnostics.push_back("corollary2");
  }

  if (const toml::node* seed = root.get("seed")) {
    if (!seed->is_integer() || *seed->value<std::int64_t>() < 0)
      throw ConfigurationError("seed must be a non-negative integer");
    cfg.seed = static_cast<std::uint64_t>(*seed->value<std::int64_t>());
  }
}

}  // namespace

bool ExperimentConfig::enabled(std::string_view name) const {
  return std::find(diagnostics.begin(), diagnostics.end(), name) != diagnostics.end();
}

void ExperimentConfig::validate() const {
  make_grid(L, n);
  equation.validate();
  if (!(dt > 0.0)) throw ConfigurationError("time.dt must be positive");
  if (!(t_end > 0.0)) throw ConfigurationError("time.t_end must be positive");
  if (sample_every < 1) throw ConfigurationError("time.sample_every must be >= 1");
  static const KeySet kinds{"gaussian", "two_bump", "bump_plus_perturbation", "extremizer", "from_file", "random"};
  if (!kinds.contains(initial.kind)) throw ConfigurationError("unknown initial.kind '" + initial.kind + "'");
  static const KeySet toggles{"moments", "sublevel", "corollary2"};
  for (const auto& d : diagnostics)
    if (!toggles.contains(d)) throw ConfigurationError("unknown diagnostics entry '" + d + "'");
  if (enabled("sublevel") && !enabled("moments"))
    throw ConfigurationError("diagnostics 'sublevel' needs 'moments'");
  if (enabled("corollary2") && !enabled("moments"))
    throw ConfigurationError("diagnostics 'corollary2' needs 'moments'");
  if (corollary2_c && !(*corollary2_c > 0.0)) throw ConfigurationError("corollary2.c must be positive");
}

ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path& base_dir) {
  const toml::table root = parse_text(text);
  check_keys(root, "top level", kExperimentSections);
  ExperimentConfig cfg;
  fill_experiment(root, base_dir, cfg);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_file(path), path.parent_path());
}

OdeConfig parse_ode_config(std::string_view text, const std::filesystem::path&) {
  const toml::table root = parse_text(text);
  check_keys(root, "top level", {"ode", "output"});
  OdeConfig cfg;
  const auto* ode = section(root, "ode");
  if (!ode) throw ConfigurationError("missing [ode] table");
  check_keys(*ode, "[ode]", {"alpha", "beta", "gamma", "p", "delta", "f0", "T", "dt", "sample_every", "z_count"});
  read(ode, "ode", "alpha", cfg.params.alpha);
  read(ode, "ode", "beta", cfg.params.beta);
  read(ode, "ode", "gamma", cfg.params.gamma);
  read(ode, "ode", "p", cfg.params.p);
  read(ode, "ode", "delta", cfg.params.delta);
  read(ode, "ode", "f0", cfg.f0);
  read(ode, "ode", "T", cfg.T);
  if (ode->get("dt")) {
    double dt = 0.0;
    read(ode, "ode", "dt", dt);
    cfg.dt = dt;
  }
  read(ode, "ode", "sample_every", cfg.sample_every);
  read(ode, "ode", "z_count", cfg.z_count);
  const auto* out = section(root, "output");
  if (out) check_keys(*out, "[output]", {"csv", "json"});
  std::string csv, json;
  read(out, "output", "csv", csv);
  read(out, "output", "json", json);
  cfg.csv = csv;
  cfg.json = json;
  cfg.params.validate();
  if (cfg.sample_every < 1) throw ConfigurationError("ode.sample_every must be >= 1");
  if (cfg.z_count < 5) throw ConfigurationError("ode.z_count must be >= 5");
  return cfg;
}

OdeConfig load_ode_config(const std::filesystem::path& path) {
  return parse_ode_config(read_file(path), path.parent_path());
}

SweepConfig parse_sweep_config(std::string_view text, const std::filesystem::path& base_dir) {
  const toml::table root = parse_text(text);
  KeySet allowed = kExperimentSections;
  allowed.insert("sweep");
  check_keys(root, "top level", allowed);
  SweepConfig cfg;
  fill_experiment(root, base_dir, cfg.base);
  cfg.base.validate();
  const auto* sweep = section(root, "sweep");
  if (!sweep) throw ConfigurationError("missing [sweep] table");
  check_keys(*sweep, "[sweep]", {"p", "kind", "amplitude", "workers"});
  cfg.p = read_array<double>(sweep, "sweep", "p");
  cfg.kinds = read_array<std::string>(sweep, "sweep", "kind");
  cfg.amplitudes = read_array<double>(sweep, "sweep", "amplitude");
  read(sweep, "sweep", "workers", cfg.workers);
  if (cfg.p.empty()) cfg.p.push_back(cfg.base.equation.p);
  if (cfg.kinds.empty()) cfg.kinds.push_back(cfg.base.initial.kind);
  if (cfg.amplitudes.empty()) cfg.amplitudes.push_back(cfg.base.initial.amplitude);
  if (cfg.workers < 0) throw ConfigurationError("sweep.workers must be >= 0");
  return cfg;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  return parse_sweep_config(read_file(path), path.parent_path());
}

}  // namespace gkdv
