/// @file config.hpp
/// @brief Flat key = value configuration files and experiment settings.
///
/// @details A configuration file holds one `key = value` pair per line; blank
///          lines and lines starting with '#' are ignored. List values are
///          comma separated. Command-line overrides are merged on top of the
///          file, so they win.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gridtraffic/core.hpp"

namespace gridtraffic {

enum class ModelKind { model1, model2, model3 };

std::string_view to_string(ModelKind m);

using ConfigMap = std::map<std::string, std::string>;

/// @throw ConfigError when the file cannot be read or a line has no '='.
ConfigMap parse_config_text(const std::string& text, const std::string& origin = "config");
ConfigMap load_config_file(const std::string& path);

/// Later entries replace earlier ones.
void merge_into(ConfigMap& base, const ConfigMap& overrides);

/// Everything one batch of runs needs. The `sim` member carries the shared
/// simulation settings; the grids list the values swept by the experiment.
struct ExperimentConfig {
  ModelKind model = ModelKind::model1;
  SimConfig sim{};

  int replicates = 1;
  std::int64_t steps = 2000;  ///< recorded steps per replicate, after warm-up
  std::vector<double> p_new_grid;
  std::vector<double> p_de_grid;              ///< model1
  std::vector<double> core_fraction_grid;     ///< model2
  std::vector<double> initial_p_de_grid;      ///< model2
  int tau = 500;
  int cycles = 200;   ///< model2: imitation updates per run
  int burn_in = 100;  ///< model2: leading q samples dropped from box summaries
  int conflict_cost = 3;
  int collision_cost = 50;
  HazardMode hazard_mode = HazardMode::discrete_conditional;
  WeibullParams weibull{};

  std::string out_dir = "out";
  bool emit_series = false;
  int snapshot_every = 0;  ///< 0 = no snapshots
  int threads = 1;
  bool check_invariants = false;
  bool paper_scale = false;

  /// Settings as sorted key = value pairs, for echoing into outputs.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Builds the settings of `model` from defaults (desk or paper scale) and the
/// given keys. Unknown keys and malformed values raise ConfigError.
ExperimentConfig make_experiment_config(ModelKind model, const ConfigMap& keys);

/// Simulation settings for one case of the sweep.
SimConfig case_config(const ExperimentConfig& cfg, double p_new, double second, double third);

/// Keys accepted by make_experiment_config.
const std::vector<std::string>& known_keys();

}  // namespace gridtraffic
