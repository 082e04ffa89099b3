#include "gridtraffic/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "gridtraffic/games.hpp"

namespace gridtraffic {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(text.substr(used)) != "") {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  return value;
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::int64_t value = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty()) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return value;
}

int parse_small_int(const std::string& key, const std::string& text) {
  const std::int64_t v = parse_int(key, text);
  if (v < -1'000'000'000 || v > 1'000'000'000) throw ConfigError(key + ": value out of range");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

void check_probabilities(const std::string& key, const std::vector<double>& v) {
  for (const double p : v) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(key + ": values must be in [0, 1]");
  }
}

}  // namespace

std::string_view to_string(ModelKind m) {
  switch (m) {
    case ModelKind::model1: return "model1";
    case ModelKind::model2: return "model2";
    case ModelKind::model3: return "model3";
  }
  return "?";
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "approach_window", "burn_in",         "check_invariants", "collision_cost",
      "conflict_cost",   "core_fraction",   "core_fraction_grid", "crossing_positions",
      "cycles",          "emit_series",     "hazard_mode",      "initial_p_de",
      "initial_p_de_grid", "log_meetings",  "max_vehicles",     "out_dir",
      "p_de",            "p_de_grid",       "p_new",            "p_new_grid",
      "p_slow",          "paper_scale",     "replicates",       "seed",
      "snapshot_every",  "steps",           "street_length",    "tau",
      "threads",         "v_max",           "warmup_steps",     "weibull_a",
      "weibull_b",
  };
  return keys;
}

ConfigMap parse_config_text(const std::string& text, const std::string& origin) {
  ConfigMap out;
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(number) + ": empty key");
    out[key] = trim(t.substr(eq + 1));
  }
  return out;
}

ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

void merge_into(ConfigMap& base, const ConfigMap& overrides) {
  for (const auto& [k, v] : overrides) base[k] = v;
}

ExperimentConfig make_experiment_config(ModelKind model, const ConfigMap& keys) {
  const auto& known = known_keys();
  for (const auto& [k, v] : keys) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      throw ConfigError("unknown configuration key '" + k + "'");
    }
  }
  const auto has = [&](const char* k) { return keys.count(k) > 0; };
  const auto get = [&](const char* k) -> const std::string& { return keys.at(k); };

  ExperimentConfig cfg;
  cfg.model = model;
  if (has("paper_scale")) cfg.paper_scale = parse_bool("paper_scale", get("paper_scale"));

  // Desk-scale defaults, scaled up by paper_scale.
  switch (model) {
    case ModelKind::model1:
      cfg.replicates = cfg.paper_scale ? 10000 : 20;
      cfg.steps = 2000;
      cfg.p_new_grid = {0.3, 0.6};
      cfg.p_de_grid = {0.01, 0.1, 0.25, 0.5, 0.75};
      break;
    case ModelKind::model2:
      cfg.replicates = cfg.paper_scale ? 20 : 5;
      cfg.p_new_grid = {0.3};
      cfg.core_fraction_grid = {0.0, 0.1, 0.3};
      cfg.initial_p_de_grid = {0.25, 0.5, 0.75};
      break;
    case ModelKind::model3:
      cfg.replicates = cfg.paper_scale ? 1 : 10;
      cfg.steps = cfg.paper_scale ? 75000 : 10000;
      cfg.p_new_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
      break;
  }

  SimConfig& sim = cfg.sim;
  if (has("seed")) sim.seed = static_cast<std::uint64_t>(parse_int("seed", get("seed")));
  if (has("replicates")) cfg.replicates = parse_small_int("replicates", get("replicates"));
  if (has("tau")) cfg.tau = parse_small_int("tau", get("tau"));
  if (has("cycles")) cfg.cycles = parse_small_int("cycles", get("cycles"));
  if (has("steps")) {
    cfg.steps = parse_int("steps", get("steps"));
    if (model == ModelKind::model2 && cfg.tau > 0) {
      cfg.cycles = static_cast<int>(cfg.steps / cfg.tau);
    }
  }
  if (model == ModelKind::model2) cfg.steps = static_cast<std::int64_t>(cfg.cycles) * cfg.tau;
  if (has("burn_in")) cfg.burn_in = parse_small_int("burn_in", get("burn_in"));
  if (has("warmup_steps")) sim.warmup_steps = parse_small_int("warmup_steps", get("warmup_steps"));
  if (has("street_length")) sim.street_length = parse_small_int("street_length", get("street_length"));
  if (has("crossing_positions")) {
    const auto v = parse_list("crossing_positions", get("crossing_positions"));
    if (v.size() != sim.crossing_positions.size()) {
      throw ConfigError("crossing_positions: expected 4 values");
    }
    for (std::size_t i = 0; i < v.size(); ++i) sim.crossing_positions[i] = static_cast<int>(v[i]);
  }
  if (has("v_max")) sim.v_max = parse_small_int("v_max", get("v_max"));
  if (has("p_slow")) sim.p_slow = parse_double("p_slow", get("p_slow"));
  if (has("max_vehicles")) sim.max_vehicles = parse_small_int("max_vehicles", get("max_vehicles"));
  if (has("approach_window")) {
    sim.approach_window = parse_small_int("approach_window", get("approach_window"));
  }
  if (has("log_meetings")) sim.log_meetings = parse_bool("log_meetings", get("log_meetings"));

  if (has("p_new_grid")) cfg.p_new_grid = parse_list("p_new_grid", get("p_new_grid"));
  if (has("p_new")) cfg.p_new_grid = {parse_double("p_new", get("p_new"))};
  if (has("p_de_grid")) cfg.p_de_grid = parse_list("p_de_grid", get("p_de_grid"));
  if (has("p_de")) cfg.p_de_grid = {parse_double("p_de", get("p_de"))};
  if (has("core_fraction_grid")) {
    cfg.core_fraction_grid = parse_list("core_fraction_grid", get("core_fraction_grid"));
  }
  if (has("core_fraction")) {
    cfg.core_fraction_grid = {parse_double("core_fraction", get("core_fraction"))};
  }
  if (has("initial_p_de_grid")) {
    cfg.initial_p_de_grid = parse_list("initial_p_de_grid", get("initial_p_de_grid"));
  }
  if (has("initial_p_de")) {
    cfg.initial_p_de_grid = {parse_double("initial_p_de", get("initial_p_de"))};
  }

  if (has("conflict_cost")) cfg.conflict_cost = parse_small_int("conflict_cost", get("conflict_cost"));
  if (has("collision_cost")) {
    cfg.collision_cost = parse_small_int("collision_cost", get("collision_cost"));
  }
  if (has("hazard_mode")) {
    const std::string m = trim(get("hazard_mode"));
    if (m == "discrete_conditional") {
      cfg.hazard_mode = HazardMode::discrete_conditional;
    } else if (m == "raw_clipped") {
      cfg.hazard_mode = HazardMode::raw_clipped;
    } else {
      throw ConfigError("hazard_mode: expected discrete_conditional or raw_clipped, got '" + m + "'");
    }
  }
  if (has("weibull_a")) cfg.weibull.a = parse_double("weibull_a", get("weibull_a"));
  if (has("weibull_b")) cfg.weibull.b = parse_double("weibull_b", get("weibull_b"));

  if (has("out_dir")) cfg.out_dir = get("out_dir");
  if (has("emit_series")) cfg.emit_series = parse_bool("emit_series", get("emit_series"));
  if (has("snapshot_every")) {
    cfg.snapshot_every = parse_small_int("snapshot_every", get("snapshot_every"));
  }
  if (has("threads")) cfg.threads = parse_small_int("threads", get("threads"));
  if (has("check_invariants")) {
    cfg.check_invariants = parse_bool("check_invariants", get("check_invariants"));
  }

  if (cfg.replicates < 1) throw ConfigError("replicates must be at least 1");
  if (cfg.steps < 1) throw ConfigError("steps must be at least 1");
  if (cfg.tau < 1) throw ConfigError("tau must be at least 1");
  if (model == ModelKind::model2 && cfg.cycles < 1) throw ConfigError("cycles must be at least 1");
  if (cfg.burn_in < 0) throw ConfigError("burn_in must be non-negative");
  if (cfg.conflict_cost < 0 || cfg.collision_cost < 0) {
    throw ConfigError("payoff costs must be non-negative");
  }
  if (cfg.snapshot_every < 0) throw ConfigError("snapshot_every must be non-negative");
  if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
  if (cfg.out_dir.empty()) throw ConfigError("out_dir must not be empty");
  check_probabilities("p_new", cfg.p_new_grid);
  check_probabilities("p_de", cfg.p_de_grid);
  check_probabilities("core_fraction", cfg.core_fraction_grid);
  check_probabilities("initial_p_de", cfg.initial_p_de_grid);

  // Validates the shared settings, including the grid geometry.
  for (const double p : cfg.p_new_grid) {
    SimConfig probe = case_config(cfg, p, 0.0, 0.0);
    probe.validate();
    (void)build_grid(probe.street_length, probe.crossing_positions, probe.phase);
  }
  return cfg;
}

SimConfig case_config(const ExperimentConfig& cfg, double p_new, double second, double third) {
  SimConfig sim = cfg.sim;
  sim.p_new = p_new;
  switch (cfg.model) {
    case ModelKind::model1:
      sim.behavior = FixedRatio{1.0 - second};
      sim.payoffs = PayoffTable::fixed_ratio_defaults(cfg.conflict_cost, cfg.collision_cost);
      break;
    case ModelKind::model2:
      sim.behavior = Imitation{third, second, cfg.tau};
      sim.payoffs = PayoffTable::fixed_ratio_defaults(cfg.conflict_cost, cfg.collision_cost);
      break;
    case ModelKind::model3:
      sim.behavior = Impatience{cfg.weibull, cfg.hazard_mode};
      sim.payoffs = PayoffTable::impatience_defaults();
      break;
  }
  return sim;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out = {
      {"model", std::string(to_string(model))},
      {"seed", std::to_string(sim.seed)},
      {"replicates", std::to_string(replicates)},
      {"steps", std::to_string(steps)},
      {"warmup_steps", std::to_string(sim.warmup_steps)},
      {"street_length", std::to_string(sim.street_length)},
      {"crossing_positions",
       format_list({sim.crossing_positions.begin(), sim.crossing_positions.end()})},
      {"v_max", std::to_string(sim.v_max)},
      {"p_slow", format_double(sim.p_slow)},
      {"max_vehicles", std::to_string(sim.max_vehicles)},
      {"approach_window", std::to_string(sim.approach_window)},
      {"p_new_grid", format_list(p_new_grid)},
      {"paper_scale", paper_scale ? "true" : "false"},
  };
  switch (model) {
    case ModelKind::model1:
      out.emplace_back("p_de_grid", format_list(p_de_grid));
      out.emplace_back("conflict_cost", std::to_string(conflict_cost));
      out.emplace_back("collision_cost", std::to_string(collision_cost));
      out.emplace_back("log_meetings", sim.log_meetings ? "true" : "false");
      break;
    case ModelKind::model2:
      out.emplace_back("core_fraction_grid", format_list(core_fraction_grid));
      out.emplace_back("initial_p_de_grid", format_list(initial_p_de_grid));
      out.emplace_back("tau", std::to_string(tau));
      out.emplace_back("cycles", std::to_string(cycles));
      out.emplace_back("burn_in", std::to_string(burn_in));
      out.emplace_back("conflict_cost", std::to_string(conflict_cost));
      out.emplace_back("collision_cost", std::to_string(collision_cost));
      break;
    case ModelKind::model3:
      out.emplace_back("hazard_mode", std::string(to_string(hazard_mode)));
      out.emplace_back("weibull_a", format_double(weibull.a));
      out.emplace_back("weibull_b", format_double(weibull.b));
      break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gridtraffic
