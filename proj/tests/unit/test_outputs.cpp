#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "gridtraffic/config.hpp"
#include "gridtraffic/engine.hpp"
#include "gridtraffic/experiments.hpp"
#include "gridtraffic/snapshot.hpp"

using namespace gridtraffic;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gridtraffic_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() != '#') out.push_back(line);
  }
  return out;
}

std::size_t columns(const std::string& line) {
  return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

}  // namespace

TEST_CASE("config text: comments, blanks, trimming") {
  const ConfigMap m = parse_config_text("# note\n\n  seed = 9 \np_new_grid=0.1, 0.2\n");
  CHECK(m.size() == 2);
  CHECK(m.at("seed") == "9");
  CHECK(m.at("p_new_grid") == "0.1, 0.2");
  CHECK_THROWS_AS(parse_config_text("seed 9\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(" = 3\n"), ConfigError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/gridtraffic.cfg"), ConfigError);
}

TEST_CASE("overrides win over the file") {
  ConfigMap base = parse_config_text("seed = 1\nreplicates = 4\n");
  merge_into(base, {{"seed", "5"}});
  CHECK(base.at("seed") == "5");
  CHECK(base.at("replicates") == "4");
}

TEST_CASE("desk-scale defaults per model") {
  const ExperimentConfig m1 = make_experiment_config(ModelKind::model1, {});
  CHECK(m1.p_new_grid == std::vector<double>{0.3, 0.6});
  CHECK(m1.sim.max_vehicles == 350);
  CHECK(m1.sim.warmup_steps == 50);
  CHECK(m1.sim.street_length == 50);
  CHECK(m1.conflict_cost == 3);
  CHECK(m1.collision_cost == 50);
  CHECK(std::find(m1.p_de_grid.begin(), m1.p_de_grid.end(), 0.01) != m1.p_de_grid.end());

  const ExperimentConfig m2 = make_experiment_config(ModelKind::model2, {});
  CHECK(m2.tau == 500);
  CHECK(m2.cycles == 200);
  CHECK(m2.burn_in == 100);
  CHECK(m2.steps == 200 * 500);
  CHECK(m2.core_fraction_grid == std::vector<double>{0.0, 0.1, 0.3});
  CHECK(m2.initial_p_de_grid == std::vector<double>{0.25, 0.5, 0.75});

  const ExperimentConfig m3 = make_experiment_config(ModelKind::model3, {});
  CHECK(m3.p_new_grid.size() == 9);
  CHECK(m3.steps == 10000);
  CHECK(m3.weibull.a == 30.0);
  CHECK(m3.weibull.b == 2.92);
  CHECK(m3.hazard_mode == HazardMode::discrete_conditional);

  const ExperimentConfig big = make_experiment_config(ModelKind::model3, {{"paper_scale", "true"}});
  CHECK(big.steps == 75000);
  const ExperimentConfig big1 = make_experiment_config(ModelKind::model1, {{"paper_scale", "1"}});
  CHECK(big1.replicates == 10000);
}

TEST_CASE("scalar keys replace the grids; model2 steps set the cycle count") {
  const ExperimentConfig c = make_experiment_config(
      ModelKind::model2, {{"core_fraction", "0.2"}, {"tau", "100"}, {"steps", "3000"}});
  CHECK(c.core_fraction_grid == std::vector<double>{0.2});
  CHECK(c.cycles == 30);
  CHECK(c.steps == 3000);
  CHECK(expand_cases(c).size() == 3);
}

TEST_CASE("bad configurations are rejected") {
  CHECK_THROWS_AS(make_experiment_config(ModelKind::model1, {{"bogus", "1"}}), ConfigError);
  CHECK_THROWS_AS(make_experiment_config(ModelKind::model1, {{"p_new", "1.5"}}), ConfigError);
  CHECK_THROWS_AS(make_experiment_config(ModelKind::model1, {{"seed", "abc"}}), ConfigError);
  CHECK_THROWS_AS(make_experiment_config(ModelKind::model1, {{"replicates", "0"}}), ConfigError);
  CHECK_THROWS_AS(make_experiment_config(ModelKind::model3, {{"hazard_mode", "linear"}}),
                  ConfigError);
  CHECK_THROWS_AS(make_experiment_config(ModelKind::model1, {{"crossing_positions", "39,9,19,29"}}),
                  ConfigError);
  CHECK_THROWS_AS(make_experiment_config(ModelKind::model1, {{"p_slow", "0.1x"}}), ConfigError);
  CHECK_THROWS_AS(make_experiment_config(ModelKind::model1, {{"emit_series", "maybe"}}),
                  ConfigError);
}

TEST_CASE("case settings per model") {
  const ExperimentConfig m1 = make_experiment_config(ModelKind::model1, {});
  const SimConfig a = case_config(m1, 0.3, 0.25, 0.0);
  CHECK(std::get<FixedRatio>(a.behavior).p_co == 0.75);
  CHECK(a.p_new == 0.3);
  CHECK(a.payoffs.at(DriverType::de, DriverType::de).left == 50);

  const ExperimentConfig m2 = make_experiment_config(ModelKind::model2, {});
  const Imitation im = std::get<Imitation>(case_config(m2, 0.3, 0.1, 0.75).behavior);
  CHECK(im.core_fraction == 0.1);
  CHECK(im.initial_p_de == 0.75);
  CHECK(im.tau == 500);

  const ExperimentConfig m3 = make_experiment_config(ModelKind::model3, {});
  const SimConfig c = case_config(m3, 0.5, 0.0, 0.0);
  CHECK(std::holds_alternative<Impatience>(c.behavior));
  CHECK_FALSE(c.payoffs.costs_are_crossing_inclusive());
}

TEST_CASE("replicate seeds depend only on master, case and replicate") {
  CHECK(replicate_seed(1, 0, 0) == replicate_seed(1, 0, 0));
  CHECK(replicate_seed(1, 0, 1) != replicate_seed(1, 1, 0));
  CHECK(replicate_seed(1, 2, 3) != replicate_seed(2, 2, 3));
}

TEST_CASE("model2 runs give one q sample per cycle; a full core pins q to 0") {
  const ExperimentConfig c = make_experiment_config(
      ModelKind::model2, {{"core_fraction_grid", "0,1"}, {"initial_p_de", "0.75"}, {"tau", "50"},
                          {"cycles", "12"}, {"replicates", "2"}, {"burn_in", "4"}});
  const ExperimentResult r = run_experiment(c);
  REQUIRE(r.cases.size() == 2);
  for (const CaseResult& cr : r.cases) {
    for (const ReplicateResult& rep : cr.replicates) CHECK(rep.summary.q_series.size() == 12);
    REQUIRE(cr.aggregate.q_box);
    CHECK(cr.aggregate.q_box->n == 2 * 8);
  }
  for (const ReplicateResult& rep : r.cases[1].replicates) {
    for (double q : rep.summary.q_series) CHECK(q == 0.0);
  }
}

TEST_CASE("outputs: header, config echo and documented shapes") {
  const fs::path dir = scratch("shapes");
  const ExperimentConfig m3 = make_experiment_config(
      ModelKind::model3, {{"steps", "300"}, {"replicates", "2"}, {"out_dir", dir.string()}});
  const auto files = write_outputs(run_experiment(m3), dir);
  REQUIRE(files.size() == 3);
  const std::string table = slurp(dir / "model3_table.csv");
  CHECK(table.rfind("# gridtraffic model3\n", 0) == 0);
  CHECK(table.find("# weibull_b = 2.9199999999999999\n") != std::string::npos);
  const auto lines = data_lines(table);
  REQUIRE(lines.size() == 9);
  CHECK(lines[0] == "statistic,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9");
  for (const auto& l : lines) CHECK(columns(l) == 10);
  CHECK(lines[1].rfind("total_type_changes,", 0) == 0);

  const ExperimentConfig m1 = make_experiment_config(
      ModelKind::model1, {{"steps", "200"}, {"replicates", "2"}, {"log_meetings", "true"},
                          {"p_new", "0.3"}, {"p_de_grid", "0.25,0.75"}});
  const auto files1 = write_outputs(run_experiment(m1), dir);
  REQUIRE(files1.size() == 3);
  const auto summary = data_lines(slurp(dir / "model1_summary.csv"));
  REQUIRE(summary.size() == 3);
  CHECK(columns(summary[0]) == 16);
  CHECK(summary[1].rfind("0.3,0.25,0.75,2,400,", 0) == 0);
  const auto meetings = data_lines(slurp(dir / "model1_meetings.csv"));
  CHECK(meetings.size() > 1);
  CHECK(meetings[0] == "p_new,p_de,replicate,step,intersection_id,left_type,right_type,eta_left,"
                       "eta_right,xi");
  fs::remove_all(dir);
}

TEST_CASE("absent means are written as empty cells") {
  CHECK(csv_number(std::optional<double>{}).empty());
  CHECK(csv_number(0.1) == "0.1");
  CHECK(csv_number(2.0) == "2");
}

TEST_CASE("same config and seed: byte-identical files, sequential or parallel") {
  const auto run = [](int threads, const std::string& tag) {
    const fs::path dir = scratch(tag);
    const ExperimentConfig c = make_experiment_config(
        ModelKind::model1, {{"steps", "300"}, {"replicates", "3"}, {"threads", std::to_string(threads)},
                            {"emit_series", "true"}, {"snapshot_every", "100"}});
    const auto files = write_outputs(run_experiment(c), dir);
    std::vector<std::string> out;
    for (const auto& f : files) out.push_back(f.filename().string() + "\n" + slurp(f));
    fs::remove_all(dir);
    return out;
  };
  const auto a = run(1, "det_a");
  const auto b = run(1, "det_b");
  const auto c = run(3, "det_c");
  CHECK(a.size() > 4);
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("invariant checking passes on a normal run") {
  const ExperimentConfig c = make_experiment_config(
      ModelKind::model2, {{"tau", "100"}, {"cycles", "5"}, {"replicates", "1"},
                          {"check_invariants", "true"}, {"core_fraction", "0.1"},
                          {"initial_p_de", "0.5"}});
  CHECK_NOTHROW(run_experiment(c));
}

TEST_CASE("snapshot of an empty network: streets and intersection marks only") {
  SimConfig cfg;
  SimState s(cfg);
  const std::string text = render_snapshot(s);
  const auto lines = data_lines(text);
  REQUIRE(lines.size() == 50);
  for (const auto& l : lines) CHECK(l.size() == 50);
  CHECK(std::count(text.begin(), text.end(), '+') == 16);
  CHECK(std::count(text.begin(), text.end(), '.') == 8 * 50 - 32);
  CHECK(text.find('C') == std::string::npos);
  CHECK(lines[9][9] == '+');
  CHECK(lines[9][0] == '.');
  CHECK(lines[0][9] == '.');
  CHECK(lines[0][0] == ' ');
}

TEST_CASE("snapshot shows one CO car where it is") {
  SimConfig cfg;
  SimState s(cfg, false);
  s.place_vehicle(1, 3, DriverType::co);
  const std::string text = render_snapshot(s);
  CHECK(std::count(text.begin(), text.end(), 'C') == 1);
  const GridPoint p = s.network.point_of(1, 3);
  // Street 1 runs west along row 19, so cell 3 is column 46.
  CHECK(p.row == 19);
  CHECK(p.col == 46);
  CHECK(data_lines(text)[static_cast<std::size_t>(p.row)][static_cast<std::size_t>(p.col)] == 'C');

  s.place_vehicle(5, 10, DriverType::de);
  const std::string with_de = render_snapshot(s);
  CHECK(std::count(with_de.begin(), with_de.end(), 'D') == 1);
  CHECK(std::count(with_de.begin(), with_de.end(), '+') == 15);
}

TEST_CASE("identical states render identically") {
  SimConfig cfg;
  cfg.seed = 6;
  Simulation a(cfg), b(cfg);
  a.run(300);
  b.run(300);
  CHECK(render_snapshot(a.state()) == render_snapshot(b.state()));
}
