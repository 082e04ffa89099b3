// gridtraffic: experiment runner for the intersection-grid traffic models.
//
// Exit codes: 0 success, 1 configuration or input error, 2 invariant violation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

#include "CLI11.hpp"
#include "gridtraffic/config.hpp"
#include "gridtraffic/engine.hpp"
#include "gridtraffic/estimation.hpp"
#include "gridtraffic/experiments.hpp"
#include "gridtraffic/snapshot.hpp"

namespace gt = gridtraffic;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitInvariant = 2;

// Command-line settings shared by the simulation subcommands. Each one that is
// given overrides the matching configuration key.
struct CommonFlags {
  std::string config_path;
  std::map<std::string, std::string> overrides;
  bool paper_scale = false;
  bool emit_series = false;
  bool check_invariants = false;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    const auto key = [&](const char* flag, const char* name, const char* help) {
      app.add_option_function<std::string>(
          flag, [this, name](const std::string& v) { overrides[name] = v; }, help);
    };
    key("--seed", "seed", "master seed");
    key("--replicates", "replicates", "replicates per case");
    key("--steps", "steps", "recorded steps per replicate (after warm-up)");
    key("--p-new", "p_new", "entry probability (replaces the p_new grid)");
    key("--p-de", "p_de", "model1: DE probability (replaces the p_de grid)");
    key("--core-fraction", "core_fraction", "model2: core share (replaces the grid)");
    key("--initial-p-de", "initial_p_de", "model2: initial DE probability (replaces the grid)");
    key("--tau", "tau", "model2: steps per imitation cycle");
    key("--p-slow", "p_slow", "random slowdown probability");
    key("--max-vehicles", "max_vehicles", "fleet size");
    key("--collision-cost", "collision_cost", "cost of a DE-DE meeting");
    key("--conflict-cost", "conflict_cost", "cost of a DE-left, CO-right meeting");
    key("--hazard-mode", "hazard_mode", "discrete_conditional or raw_clipped");
    key("--out-dir", "out_dir", "output directory");
    key("--snapshot-every", "snapshot_every", "write a lattice snapshot every N recorded steps");
    key("--threads", "threads", "worker threads for replicates");
    app.add_flag("--paper-scale", paper_scale, "paper-scale replicate and step counts");
    app.add_flag("--emit-series", emit_series, "also write per-step series");
    app.add_flag("--check-invariants", check_invariants, "check state invariants every step");
  }

  gt::ConfigMap keys() const {
    gt::ConfigMap m;
    if (!config_path.empty()) m = gt::load_config_file(config_path);
    gt::merge_into(m, overrides);
    if (paper_scale) m["paper_scale"] = "true";
    if (emit_series) m["emit_series"] = "true";
    if (check_invariants) m["check_invariants"] = "true";
    return m;
  }
};

int run_model(gt::ModelKind model, const CommonFlags& flags) {
  const gt::ExperimentConfig cfg = gt::make_experiment_config(model, flags.keys());
  const gt::ExperimentResult result = gt::run_experiment(cfg);
  for (const auto& p : gt::write_outputs(result, cfg.out_dir)) std::cout << p.string() << '\n';
  return 0;
}

// One row of the meeting log, grouped by its (p_new, p_de) case.
using CaseId = std::pair<std::string, std::string>;

std::map<CaseId, gt::ObservationBatch> read_meeting_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw gt::ConfigError("cannot read meeting log '" + path + "'");
  std::map<CaseId, gt::ObservationBatch> batches;
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (header.empty()) {
      header = cells;
      continue;
    }
    const auto col = [&](const char* name) -> const std::string& {
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name && i < cells.size()) return cells[i];
      }
      throw gt::ConfigError(std::string("meeting log: missing column ") + name);
    };
    const auto flag = [&](const char* name) {
      const std::string& v = col(name);
      if (v != "0" && v != "1") throw gt::ConfigError(std::string("meeting log: bad ") + name);
      return v == "1" ? 1 : 0;
    };
    batches[{col("p_new"), col("p_de")}].add({flag("eta_left"), flag("eta_right")});
  }
  if (header.empty()) throw gt::ConfigError("meeting log '" + path + "' has no header");
  return batches;
}

void print_estimates(const std::map<CaseId, gt::ObservationBatch>& batches, double prior_a,
                     double prior_b) {
  std::cout << "p_new,p_de,n,sigma_xi,minimax_p_co,bayes_p_co\n";
  for (const auto& [id, batch] : batches) {
    std::cout << id.first << ',' << id.second << ',' << batch.n << ',' << batch.sigma_xi << ','
              << gt::csv_number(gt::minimax_estimate(batch)) << ','
              << gt::csv_number(gt::bayes_estimate(batch, prior_a, prior_b)) << '\n';
  }
}

int run_estimate(const std::string& input, const CommonFlags& flags, double prior_a,
                 double prior_b) {
  if (!input.empty()) {
    const auto batches = read_meeting_log(input);
    if (batches.empty()) throw gt::NoDataError("meeting log has no meetings");
    print_estimates(batches, prior_a, prior_b);
    return 0;
  }
  // No log given: simulate model1 and estimate from its meetings.
  gt::ConfigMap keys = flags.keys();
  keys["log_meetings"] = "true";
  if (!keys.count("replicates")) keys["replicates"] = "1";
  gt::ExperimentConfig cfg = gt::make_experiment_config(gt::ModelKind::model1, keys);
  const gt::ExperimentResult result = gt::run_experiment(cfg);
  std::map<CaseId, gt::ObservationBatch> batches;
  for (const gt::CaseResult& c : result.cases) {
    auto& batch = batches[{gt::csv_number(c.key.p_new), gt::csv_number(c.key.p_de)}];
    for (const gt::ReplicateResult& r : c.replicates) {
      const gt::ObservationBatch b = gt::harvest_observations(r.meetings);
      batch.n += b.n;
      batch.sigma_xi += b.sigma_xi;
    }
  }
  print_estimates(batches, prior_a, prior_b);
  return 0;
}

int run_snapshot(int model_number, const CommonFlags& flags) {
  const auto model = model_number == 2   ? gt::ModelKind::model2
                     : model_number == 3 ? gt::ModelKind::model3
                                         : gt::ModelKind::model1;
  gt::ConfigMap keys = flags.keys();
  if (!keys.count("steps")) keys["steps"] = "200";
  const gt::ExperimentConfig cfg = gt::make_experiment_config(model, keys);
  const auto cases = gt::expand_cases(cfg);
  const gt::CaseKey& key = cases.front();
  gt::SimConfig sim_cfg = model == gt::ModelKind::model2
                              ? gt::case_config(cfg, key.p_new, key.core_fraction, key.initial_p_de)
                              : gt::case_config(cfg, key.p_new, key.p_de, 0.0);
  sim_cfg.seed = gt::replicate_seed(cfg.sim.seed, 0, 0);
  gt::Simulation sim(sim_cfg);
  sim.run(sim_cfg.warmup_steps + cfg.steps);
  if (cfg.check_invariants) {
    if (const auto bad = gt::check_invariants(sim.state())) throw gt::InvariantViolation(*bad);
  }
  std::cout << gt::render_snapshot(sim.state());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cellular-automaton traffic on a grid of unsignalled intersections"};
  app.require_subcommand(1);

  CommonFlags m1, m2, m3, est, snap;
  auto* model1 = app.add_subcommand("model1", "fixed driver-type ratio (speeds by type)");
  m1.attach(*model1);
  auto* model2 = app.add_subcommand("model2", "imitation with a core of compliant drivers");
  m2.attach(*model2);
  auto* model3 = app.add_subcommand("model3", "Weibull impatience while waiting");
  m3.attach(*model3);

  auto* estimate = app.add_subcommand("estimate", "estimate the CO share from meetings");
  std::string input;
  double prior_a = 1.0;
  double prior_b = 1.0;
  estimate->add_option("input", input, "meeting-log CSV written by model1 (log_meetings = true)");
  estimate->add_option("--prior-alpha", prior_a, "Beta prior alpha for the Bayes estimate");
  estimate->add_option("--prior-beta", prior_b, "Beta prior beta for the Bayes estimate");
  est.attach(*estimate);

  auto* snapshot = app.add_subcommand("snapshot", "print the lattice after a short run");
  int model_number = 1;
  snapshot->add_option("--model", model_number, "1, 2 or 3")->check(CLI::Range(1, 3));
  snap.attach(*snapshot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*model1) return run_model(gt::ModelKind::model1, m1);
    if (*model2) return run_model(gt::ModelKind::model2, m2);
    if (*model3) return run_model(gt::ModelKind::model3, m3);
    if (*estimate) return run_estimate(input, est, prior_a, prior_b);
    if (*snapshot) return run_snapshot(model_number, snap);
  } catch (const gt::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const gt::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
