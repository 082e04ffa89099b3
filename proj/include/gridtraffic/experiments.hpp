/// @file experiments.hpp
/// @brief Seeded replicate batches over parameter grids, and their CSV outputs.
///
/// @details Every (case, replicate) pair is an independent task with its own
///          seed, derived from the master seed, the case index and the
///          replicate index. Tasks may run on several threads; results are
///          stored by index, so the output never depends on scheduling.

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gridtraffic/config.hpp"
#include "gridtraffic/statistics.hpp"

namespace gridtraffic {

class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Swept parameters of one case. Values that the model does not use are 0.
struct CaseKey {
  double p_new = 0.0;
  double p_de = 0.0;
  double core_fraction = 0.0;
  double initial_p_de = 0.0;
};

struct Snapshot {
  std::int64_t step = 0;
  std::string text;
};

struct ReplicateResult {
  std::uint64_t seed = 0;
  RunSummary summary;
  std::vector<MeetingRecord> meetings;  ///< only with log_meetings
  std::vector<Snapshot> snapshots;      ///< only replicate 0, with snapshot_every
};

struct CaseResult {
  CaseKey key;
  std::vector<ReplicateResult> replicates;
  AggregateSummary aggregate;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<CaseResult> cases;
};

/// Cases of the sweep in output order.
std::vector<CaseKey> expand_cases(const ExperimentConfig& cfg);

/// Seed of replicate `rep` of case `case_index`.
std::uint64_t replicate_seed(std::uint64_t master, std::size_t case_index, std::size_t rep);

/// Runs one replicate of one case.
/// @throw InvariantViolation when cfg.check_invariants is set and a step breaks one.
ReplicateResult run_case_replicate(const ExperimentConfig& cfg, const CaseKey& key,
                                   std::uint64_t seed, bool take_snapshots);

/// Runs the whole sweep on cfg.threads threads.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes the CSV files of `result` into `dir` (created if needed) and returns
/// the paths written, in order.
std::vector<std::filesystem::path> write_outputs(const ExperimentResult& result,
                                                 const std::filesystem::path& dir);

/// Formats a value for CSV: shortest round-trip decimal, empty when absent.
std::string csv_number(double v);
std::string csv_number(const std::optional<double>& v);

/// `# key = value` lines of the configuration echo.
std::string config_echo_block(const ExperimentConfig& cfg);

}  // namespace gridtraffic
