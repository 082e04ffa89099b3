/// @file statistics.hpp
/// @brief Per-step metrics, per-run summaries and cross-replicate aggregation.
///
/// @details Means over an empty group are absent (std::nullopt), never zero.
///          Quartiles use linear interpolation between order statistics at
///          rank p(n + 1), clamped to the sample range.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gridtraffic/core.hpp"

namespace gridtraffic {

struct StepMetrics {
  std::int64_t step = 0;
  int n_vehicles = 0;
  int n_co = 0;
  int n_de = 0;
  std::optional<double> mean_speed_all;
  std::optional<double> mean_speed_co;
  std::optional<double> mean_speed_de;
  std::optional<double> ratio_q;
  int n_conflicts_step = 0;
  int n_type_changes_step = 0;
  int n_meetings_step = 0;
  int n_co_participants_step = 0;
  int n_waiting = 0;
  /// Mean accumulated waiting time of the vehicles waiting this step.
  std::optional<double> mean_wait;
};

struct BoxSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  std::size_t n = 0;
};

struct RunSummary {
  std::uint64_t seed = 0;
  std::int64_t recorded_steps = 0;
  std::int64_t total_type_changes = 0;
  std::int64_t total_conflicts = 0;
  std::int64_t total_meetings = 0;
  /// Number of CO participants over all recorded meetings.
  std::int64_t co_participants = 0;
  double change_frequency = 0.0;
  double conflict_frequency = 0.0;
  std::optional<double> mean_speed_all;
  std::optional<double> mean_speed_co;
  std::optional<double> mean_speed_de;
  std::optional<double> avg_de_ratio;
  std::optional<double> avg_wait;
  /// Population-wide DE share sampled after each imitation update.
  std::vector<double> q_series;
  /// Per-step network mean speed.
  std::vector<double> speed_samples;
  /// Full per-step series, only when requested.
  std::vector<StepMetrics> series;
};

/// DE share; nullopt for an empty population.
std::optional<double> ratio_q(int n_de, int n_co);

/// Metrics of the step that just completed, over vehicles on the lattice.
StepMetrics collect_step(const SimState& state);

/// Running sums over the recorded steps of one run.
class RunRecorder {
 public:
  explicit RunRecorder(bool keep_series = false) : keep_series_(keep_series) {}

  void add(const StepMetrics& m);
  void add_q_sample(double q) { q_series_.push_back(q); }
  RunSummary finish(std::uint64_t seed) const;

 private:
  struct Mean {
    double sum = 0.0;
    std::int64_t n = 0;
    void add(const std::optional<double>& x) {
      if (x) sum += *x, ++n;
    }
    std::optional<double> value() const {
      return n > 0 ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt;
    }
  };

  bool keep_series_;
  std::int64_t steps_ = 0;
  std::int64_t changes_ = 0;
  std::int64_t conflicts_ = 0;
  std::int64_t meetings_ = 0;
  std::int64_t co_participants_ = 0;
  Mean speed_all_, speed_co_, speed_de_, ratio_, wait_;
  std::vector<double> q_series_;
  std::vector<double> speed_samples_;
  std::vector<StepMetrics> series_;
};

/// Quantile at probability p using rank p(n + 1) with linear interpolation.
/// `sorted` must be non-empty and ascending.
double quantile(std::span<const double> sorted, double p);

/// @throw std::invalid_argument for an empty sample.
BoxSummary five_number_summary(std::span<const double> values);

struct MeanWithError {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Mean and standard error of the present values.
std::optional<MeanWithError> mean_with_error(std::span<const std::optional<double>> values);

struct AggregateSummary {
  std::size_t replicates = 0;
  std::int64_t recorded_steps = 0;
  std::int64_t total_type_changes = 0;
  std::int64_t total_conflicts = 0;
  std::int64_t total_meetings = 0;
  std::int64_t co_participants = 0;
  double change_frequency = 0.0;
  double conflict_frequency = 0.0;
  std::optional<MeanWithError> mean_speed_all;
  std::optional<MeanWithError> mean_speed_co;
  std::optional<MeanWithError> mean_speed_de;
  std::optional<MeanWithError> avg_de_ratio;
  std::optional<MeanWithError> avg_wait;
  /// Pooled imitation samples after dropping `burn_in` leading samples of every run.
  std::optional<BoxSummary> q_box;
  std::optional<double> q_stabilized_mean;
  /// Pooled per-step network mean speeds.
  std::optional<BoxSummary> speed_box;
};

/// Combines independent replicates. Totals are summed and frequencies are
/// pooled totals over pooled recorded steps; means are averaged over replicates.
/// @throw std::invalid_argument when `runs` is empty.
AggregateSummary aggregate_replicates(std::span<const RunSummary> runs, std::size_t burn_in = 100);

}  // namespace gridtraffic
