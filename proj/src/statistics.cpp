#include "gridtraffic/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gridtraffic {

std::optional<double> ratio_q(int n_de, int n_co) {
  const int total = n_de + n_co;
  if (total <= 0) return std::nullopt;
  return static_cast<double>(n_de) / static_cast<double>(total);
}

StepMetrics collect_step(const SimState& state) {
  StepMetrics m;
  m.step = state.step;
  std::int64_t speed_co = 0;
  std::int64_t speed_de = 0;
  std::int64_t wait_sum = 0;
  for (const Vehicle& v : state.fleet) {
    if (!v.on_lattice()) continue;
    if (v.driver_type == DriverType::co) {
      ++m.n_co;
      speed_co += v.speed;
    } else {
      ++m.n_de;
      speed_de += v.speed;
    }
    if (v.waited_this_step) {
      ++m.n_waiting;
      wait_sum += v.waiting_time;
    }
  }
  m.n_vehicles = m.n_co + m.n_de;
  if (m.n_vehicles > 0) {
    m.mean_speed_all = static_cast<double>(speed_co + speed_de) / m.n_vehicles;
  }
  if (m.n_co > 0) m.mean_speed_co = static_cast<double>(speed_co) / m.n_co;
  if (m.n_de > 0) m.mean_speed_de = static_cast<double>(speed_de) / m.n_de;
  m.ratio_q = ratio_q(m.n_de, m.n_co);
  if (m.n_waiting > 0) m.mean_wait = static_cast<double>(wait_sum) / m.n_waiting;
  m.n_conflicts_step = state.events.conflicts;
  m.n_type_changes_step = state.events.type_changes;
  m.n_meetings_step = state.events.meetings;
  m.n_co_participants_step = state.events.co_participants;
  return m;
}

void RunRecorder::add(const StepMetrics& m) {
  ++steps_;
  changes_ += m.n_type_changes_step;
  conflicts_ += m.n_conflicts_step;
  meetings_ += m.n_meetings_step;
  co_participants_ += m.n_co_participants_step;
  speed_all_.add(m.mean_speed_all);
  speed_co_.add(m.mean_speed_co);
  speed_de_.add(m.mean_speed_de);
  ratio_.add(m.ratio_q);
  wait_.add(m.mean_wait);
  if (m.mean_speed_all) speed_samples_.push_back(*m.mean_speed_all);
  if (keep_series_) series_.push_back(m);
}

RunSummary RunRecorder::finish(std::uint64_t seed) const {
  RunSummary s;
  s.seed = seed;
  s.recorded_steps = steps_;
  s.total_type_changes = changes_;
  s.total_conflicts = conflicts_;
  s.total_meetings = meetings_;
  s.co_participants = co_participants_;
  if (steps_ > 0) {
    s.change_frequency = static_cast<double>(changes_) / static_cast<double>(steps_);
    s.conflict_frequency = static_cast<double>(conflicts_) / static_cast<double>(steps_);
  }
  s.mean_speed_all = speed_all_.value();
  s.mean_speed_co = speed_co_.value();
  s.mean_speed_de = speed_de_.value();
  s.avg_de_ratio = ratio_.value();
  s.avg_wait = wait_.value();
  s.q_series = q_series_;
  s.speed_samples = speed_samples_;
  s.series = series_;
  return s;
}

double quantile(std::span<const double> sorted, double p) {
  const auto n = static_cast<double>(sorted.size());
  const double rank = std::clamp(p * (n + 1.0), 1.0, n);  // 1-based
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const double frac = rank - static_cast<double>(lo);
  if (lo >= sorted.size()) return sorted.back();
  return sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1]);
}

BoxSummary five_number_summary(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("five_number_summary: empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return {sorted.front(), quantile(sorted, 0.25), quantile(sorted, 0.5), quantile(sorted, 0.75),
          sorted.back(), sorted.size()};
}

std::optional<MeanWithError> mean_with_error(std::span<const std::optional<double>> values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) sum += *v, ++n;
  }
  if (n == 0) return std::nullopt;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const auto& v : values) {
    if (v) ss += (*v - mean) * (*v - mean);
  }
  const double se = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return MeanWithError{mean, se, n};
}

AggregateSummary aggregate_replicates(std::span<const RunSummary> runs, std::size_t burn_in) {
  if (runs.empty()) throw std::invalid_argument("aggregate_replicates: no replicates");
  AggregateSummary a;
  a.replicates = runs.size();
  std::vector<std::optional<double>> all, co, de, ratio, wait;
  std::vector<double> q_pool, speed_pool;
  for (const RunSummary& r : runs) {
    a.recorded_steps += r.recorded_steps;
    a.total_type_changes += r.total_type_changes;
    a.total_conflicts += r.total_conflicts;
    a.total_meetings += r.total_meetings;
    a.co_participants += r.co_participants;
    all.push_back(r.mean_speed_all);
    co.push_back(r.mean_speed_co);
    de.push_back(r.mean_speed_de);
    ratio.push_back(r.avg_de_ratio);
    wait.push_back(r.avg_wait);
    if (r.q_series.size() > burn_in) {
      q_pool.insert(q_pool.end(), r.q_series.begin() + static_cast<std::ptrdiff_t>(burn_in),
                    r.q_series.end());
    }
    speed_pool.insert(speed_pool.end(), r.speed_samples.begin(), r.speed_samples.end());
  }
  if (a.recorded_steps > 0) {
    const auto steps = static_cast<double>(a.recorded_steps);
    a.change_frequency = static_cast<double>(a.total_type_changes) / steps;
    a.conflict_frequency = static_cast<double>(a.total_conflicts) / steps;
  }
  a.mean_speed_all = mean_with_error(all);
  a.mean_speed_co = mean_with_error(co);
  a.mean_speed_de = mean_with_error(de);
  a.avg_de_ratio = mean_with_error(ratio);
  a.avg_wait = mean_with_error(wait);
  if (!q_pool.empty()) {
    a.q_box = five_number_summary(q_pool);
    double sum = 0.0;
    for (double q : q_pool) sum += q;
    a.q_stabilized_mean = sum / static_cast<double>(q_pool.size());
  }
  if (!speed_pool.empty()) a.speed_box = five_number_summary(speed_pool);
  return a;
}

}  // namespace gridtraffic
