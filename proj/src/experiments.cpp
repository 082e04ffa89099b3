#include "gridtraffic/experiments.hpp"

#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "gridtraffic/engine.hpp"
#include "gridtraffic/rng.hpp"
#include "gridtraffic/snapshot.hpp"

namespace gridtraffic {

std::string csv_number(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

std::string csv_number(const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); }

std::string config_echo_block(const ExperimentConfig& cfg) {
  std::string out = "# gridtraffic " + std::string(to_string(cfg.model)) + "\n";
  for (const auto& [k, v] : cfg.echo()) out += "# " + k + " = " + v + "\n";
  return out;
}

std::vector<CaseKey> expand_cases(const ExperimentConfig& cfg) {
  std::vector<CaseKey> out;
  for (const double p_new : cfg.p_new_grid) {
    switch (cfg.model) {
      case ModelKind::model1:
        for (const double p_de : cfg.p_de_grid) out.push_back({p_new, p_de, 0.0, 0.0});
        break;
      case ModelKind::model2:
        for (const double core : cfg.core_fraction_grid) {
          for (const double init : cfg.initial_p_de_grid) out.push_back({p_new, 0.0, core, init});
        }
        break;
      case ModelKind::model3:
        out.push_back({p_new, 0.0, 0.0, 0.0});
        break;
    }
  }
  return out;
}

std::uint64_t replicate_seed(std::uint64_t master, std::size_t case_index, std::size_t rep) {
  return derive_seed(derive_seed(master, case_index), rep);
}

ReplicateResult run_case_replicate(const ExperimentConfig& cfg, const CaseKey& key,
                                   std::uint64_t seed, bool take_snapshots) {
  SimConfig sim_cfg = cfg.model == ModelKind::model2
                          ? case_config(cfg, key.p_new, key.core_fraction, key.initial_p_de)
                          : case_config(cfg, key.p_new, key.p_de, 0.0);
  sim_cfg.seed = seed;

  ReplicateResult out;
  out.seed = seed;
  Simulation sim(sim_cfg, cfg.emit_series);
  const std::int64_t total = sim_cfg.warmup_steps + cfg.steps;
  const bool snapshots = take_snapshots && cfg.snapshot_every > 0;
  for (std::int64_t i = 0; i < total; ++i) {
    sim.step();
    const SimState& st = sim.state();
    if (cfg.check_invariants) {
      if (const auto bad = check_invariants(st)) {
        throw InvariantViolation("step " + std::to_string(st.step) + " (seed " +
                                 std::to_string(seed) + "): " + *bad);
      }
    }
    if (snapshots && st.step > sim_cfg.warmup_steps &&
        (st.step - sim_cfg.warmup_steps) % cfg.snapshot_every == 0) {
      out.snapshots.push_back({st.step, render_snapshot(st)});
    }
  }
  out.summary = sim.summary();
  // Per-step speeds only feed the model III box data.
  if (cfg.model != ModelKind::model3) out.summary.speed_samples.clear();
  out.meetings = std::move(sim.state().meeting_log);
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result;
  result.config = cfg;
  const std::vector<CaseKey> cases = expand_cases(cfg);
  const auto reps = static_cast<std::size_t>(cfg.replicates);
  result.cases.resize(cases.size());
  for (std::size_t c = 0; c < cases.size(); ++c) {
    result.cases[c].key = cases[c];
    result.cases[c].replicates.resize(reps);
  }

  const std::size_t tasks = cases.size() * reps;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const std::size_t c = t / reps;
      const std::size_t r = t % reps;
      try {
        result.cases[c].replicates[r] =
            run_case_replicate(cfg, cases[c], replicate_seed(cfg.sim.seed, c, r), r == 0);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks;
      }
    }
  };

  const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), tasks);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (CaseResult& cr : result.cases) {
    std::vector<RunSummary> runs;
    runs.reserve(cr.replicates.size());
    for (const ReplicateResult& r : cr.replicates) runs.push_back(r.summary);
    cr.aggregate = aggregate_replicates(runs, static_cast<std::size_t>(cfg.burn_in));
  }
  return result;
}

namespace {

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const ExperimentConfig& cfg, const std::string& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << config_echo_block(cfg) << header << '\n';
  }
  void cells(const std::vector<std::string>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
    out_ << '\n';
  }
  template <typename... Ts>
  void row(const Ts&... cells) {
    std::size_t i = 0;
    ((out_ << (i++ ? "," : "") << cell(cells)), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return csv_number(v); }
  static std::string cell(const std::optional<double>& v) { return csv_number(v); }
  template <typename T>
  static std::string cell(const T& v) requires std::is_integral_v<T> {
    return std::to_string(v);
  }

  std::ofstream out_;
};

std::optional<double> mean_of(const std::optional<MeanWithError>& m) {
  return m ? std::optional<double>(m->mean) : std::nullopt;
}
std::optional<double> se_of(const std::optional<MeanWithError>& m) {
  return m ? std::optional<double>(m->std_error) : std::nullopt;
}

std::string case_tag(std::size_t index) {
  std::string s = std::to_string(index);
  return "case" + std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

void write_box_cells(std::vector<std::string>& cells, const std::optional<BoxSummary>& b) {
  if (!b) {
    cells.emplace_back("0");
    for (int i = 0; i < 5; ++i) cells.emplace_back();
    return;
  }
  cells.push_back(std::to_string(b->n));
  for (const double v : {b->min, b->q1, b->median, b->q3, b->max}) cells.push_back(csv_number(v));
}

}  // namespace

std::vector<std::filesystem::path> write_outputs(const ExperimentResult& result,
                                                 const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const ExperimentConfig& cfg = result.config;
  fs::create_directories(dir);
  std::vector<fs::path> written;
  const std::string prefix(to_string(cfg.model));
  const auto path = [&](const std::string& name) {
    written.push_back(dir / (prefix + "_" + name + ".csv"));
    return written.back();
  };

  switch (cfg.model) {
    case ModelKind::model1: {
      CsvFile summary(path("summary"), cfg,
                      "p_new,p_de,p_co,replicates,recorded_steps,mean_speed_all,se_speed_all,"
                      "mean_speed_co,se_speed_co,mean_speed_de,se_speed_de,total_meetings,"
                      "total_conflicts,conflict_frequency,avg_de_ratio,avg_wait");
      for (const CaseResult& c : result.cases) {
        const AggregateSummary& a = c.aggregate;
        summary.row(c.key.p_new, c.key.p_de, 1.0 - c.key.p_de, a.replicates, a.recorded_steps,
                    mean_of(a.mean_speed_all), se_of(a.mean_speed_all), mean_of(a.mean_speed_co),
                    se_of(a.mean_speed_co), mean_of(a.mean_speed_de), se_of(a.mean_speed_de),
                    a.total_meetings, a.total_conflicts, a.conflict_frequency,
                    mean_of(a.avg_de_ratio), mean_of(a.avg_wait));
      }
      CsvFile speeds(path("speeds"), cfg,
                     "p_new,p_de,replicate,seed,mean_speed_all,mean_speed_co,mean_speed_de");
      for (const CaseResult& c : result.cases) {
        for (std::size_t r = 0; r < c.replicates.size(); ++r) {
          const RunSummary& s = c.replicates[r].summary;
          speeds.row(c.key.p_new, c.key.p_de, r, std::to_string(c.replicates[r].seed),
                     s.mean_speed_all, s.mean_speed_co, s.mean_speed_de);
        }
      }
      if (cfg.sim.log_meetings) {
        CsvFile meetings(path("meetings"), cfg,
                         "p_new,p_de,replicate,step,intersection_id,left_type,right_type,"
                         "eta_left,eta_right,xi");
        for (const CaseResult& c : result.cases) {
          for (std::size_t r = 0; r < c.replicates.size(); ++r) {
            for (const MeetingRecord& m : c.replicates[r].meetings) {
              const int el = m.left_type == DriverType::co ? 1 : 0;
              const int er = m.right_type == DriverType::co ? 1 : 0;
              meetings.row(c.key.p_new, c.key.p_de, r, m.step, m.intersection_id,
                           std::string(to_string(m.left_type)), std::string(to_string(m.right_type)),
                           el, er, el + er);
            }
          }
        }
      }
      break;
    }
    case ModelKind::model2: {
      CsvFile summary(path("summary"), cfg,
                      "core_fraction,initial_p_de,p_new,replicates,recorded_steps,mean_speed_all,"
                      "mean_speed_co,mean_speed_de,total_type_changes,change_frequency,"
                      "total_conflicts,conflict_frequency,avg_de_ratio,q_stabilized_mean");
      for (const CaseResult& c : result.cases) {
        const AggregateSummary& a = c.aggregate;
        summary.row(c.key.core_fraction, c.key.initial_p_de, c.key.p_new, a.replicates,
                    a.recorded_steps, mean_of(a.mean_speed_all), mean_of(a.mean_speed_co),
                    mean_of(a.mean_speed_de), a.total_type_changes, a.change_frequency,
                    a.total_conflicts, a.conflict_frequency, mean_of(a.avg_de_ratio),
                    a.q_stabilized_mean);
      }
      CsvFile series(path("q_series"), cfg, "core_fraction,initial_p_de,replicate,seed,cycle,q");
      for (const CaseResult& c : result.cases) {
        for (std::size_t r = 0; r < c.replicates.size(); ++r) {
          const auto& q = c.replicates[r].summary.q_series;
          for (std::size_t k = 0; k < q.size(); ++k) {
            series.row(c.key.core_fraction, c.key.initial_p_de, r,
                       std::to_string(c.replicates[r].seed), k + 1, q[k]);
          }
        }
      }
      CsvFile box(path("q_box"), cfg,
                  "core_fraction,initial_p_de,replicates,burn_in,n,min,q1,median,q3,max,mean");
      for (const CaseResult& c : result.cases) {
        std::vector<std::string> cells = {csv_number(c.key.core_fraction),
                                          csv_number(c.key.initial_p_de),
                                          std::to_string(c.aggregate.replicates),
                                          std::to_string(cfg.burn_in)};
        write_box_cells(cells, c.aggregate.q_box);
        cells.push_back(csv_number(c.aggregate.q_stabilized_mean));
        box.cells(cells);
      }
      break;
    }
    case ModelKind::model3: {
      // One row per statistic, one column per p_new.
      {
        std::string header = "statistic";
        for (const CaseResult& c : result.cases) header += "," + csv_number(c.key.p_new);
        CsvFile table(path("table"), cfg, header);
        const auto line = [&](const char* name, auto value_of) {
          std::vector<std::string> cells = {name};
          for (const CaseResult& c : result.cases) cells.push_back(value_of(c.aggregate));
          table.cells(cells);
        };
        line("total_type_changes", [](const AggregateSummary& a) { return std::to_string(a.total_type_changes); });
        line("change_frequency", [](const AggregateSummary& a) { return csv_number(a.change_frequency); });
        line("total_conflicts", [](const AggregateSummary& a) { return std::to_string(a.total_conflicts); });
        line("conflict_frequency", [](const AggregateSummary& a) { return csv_number(a.conflict_frequency); });
        line("avg_de_ratio", [](const AggregateSummary& a) { return csv_number(mean_of(a.avg_de_ratio)); });
        line("avg_wait", [](const AggregateSummary& a) { return csv_number(mean_of(a.avg_wait)); });
        line("mean_speed", [](const AggregateSummary& a) { return csv_number(mean_of(a.mean_speed_all)); });
        line("recorded_steps", [](const AggregateSummary& a) { return std::to_string(a.recorded_steps); });
      }
      CsvFile runs(path("runs"), cfg,
                   "p_new,replicate,seed,recorded_steps,total_type_changes,change_frequency,"
                   "total_conflicts,conflict_frequency,avg_de_ratio,avg_wait,mean_speed_all");
      for (const CaseResult& c : result.cases) {
        for (std::size_t r = 0; r < c.replicates.size(); ++r) {
          const RunSummary& s = c.replicates[r].summary;
          runs.row(c.key.p_new, r, std::to_string(c.replicates[r].seed), s.recorded_steps,
                   s.total_type_changes, s.change_frequency, s.total_conflicts,
                   s.conflict_frequency, s.avg_de_ratio, s.avg_wait, s.mean_speed_all);
        }
      }
      CsvFile box(path("speed_box"), cfg, "p_new,n,min,q1,median,q3,max");
      for (const CaseResult& c : result.cases) {
        std::vector<std::string> cells = {csv_number(c.key.p_new)};
        write_box_cells(cells, c.aggregate.speed_box);
        box.cells(cells);
      }
      break;
    }
  }

  if (cfg.emit_series) {
    CsvFile series(path("series"), cfg,
                   "case,p_new,p_de,core_fraction,initial_p_de,replicate,step,n_vehicles,n_co,"
                   "n_de,mean_speed_all,mean_speed_co,mean_speed_de,ratio_q,n_conflicts,"
                   "n_type_changes,n_meetings,n_waiting,mean_wait");
    for (std::size_t ci = 0; ci < result.cases.size(); ++ci) {
      const CaseResult& c = result.cases[ci];
      for (std::size_t r = 0; r < c.replicates.size(); ++r) {
        for (const StepMetrics& m : c.replicates[r].summary.series) {
          series.row(ci, c.key.p_new, c.key.p_de, c.key.core_fraction, c.key.initial_p_de, r,
                     m.step, m.n_vehicles, m.n_co, m.n_de, m.mean_speed_all, m.mean_speed_co,
                     m.mean_speed_de, m.ratio_q, m.n_conflicts_step, m.n_type_changes_step,
                     m.n_meetings_step, m.n_waiting, m.mean_wait);
        }
      }
    }
  }

  if (cfg.snapshot_every > 0) {
    const fs::path snap_dir = dir / "snapshots";
    fs::create_directories(snap_dir);
    for (std::size_t ci = 0; ci < result.cases.size(); ++ci) {
      const CaseResult& c = result.cases[ci];
      if (c.replicates.empty()) continue;
      for (const Snapshot& s : c.replicates.front().snapshots) {
        const fs::path p =
            snap_dir / (prefix + "_" + case_tag(ci) + "_step" + std::to_string(s.step) + ".txt");
        std::ofstream out(p, std::ios::binary);
        out << s.text;
        written.push_back(p);
      }
    }
  }
  return written;
}

}  // namespace gridtraffic
