/// @file engine.hpp
/// @brief Nagel-Schreckenberg update of the street network.
///
/// @details One network step:
///          1. draw a random order of the eight streets and move each street,
///          2. detect and resolve intersection meetings in a random order,
///          3. apply impatience type changes (Model III),
///          4. feed the entry cells from the queue in the same street order,
///          5. run the imitation update when a cycle ends (Model II),
///          6. record metrics once past warm-up.
///
///          Within a street all vehicles move simultaneously: gaps are measured
///          against the leader's position before the step. Across streets the
///          update is sequential, so a point left by one street this step is free
///          for the streets updated after it.

#pragma once

#include <cstdint>

#include "gridtraffic/core.hpp"
#include "gridtraffic/statistics.hpp"

namespace gridtraffic {

/// min(v + 1, v_max, gap)
constexpr int accelerate_brake(int v, int v_max, int gap) {
  const int up = v + 1 < v_max ? v + 1 : v_max;
  return up < gap ? up : gap;
}

/// Slows down by one with probability p_slow, never below zero.
constexpr int random_slowdown(int v, double p_slow, double draw) {
  if (draw < p_slow) return v > 0 ? v - 1 : 0;
  return v;
}

/// Cell after moving `v` cells in travel order; may lie past the end of the street.
constexpr int advance(int cell, int v) { return cell + v; }

/// Moves every vehicle on one street. Vehicles that run off the end are recycled.
void step_street(SimState& state, int street);

/// One full network step; metrics go to `recorder` when it is set and the
/// step is past warm-up.
void step_network(SimState& state, RunRecorder* recorder = nullptr);

/// A state plus its recorder.
class Simulation {
 public:
  explicit Simulation(SimConfig config, bool keep_series = false)
      : state_(std::move(config)), recorder_(keep_series) {}

  void step() { step_network(state_, &recorder_); }
  void run(std::int64_t steps) {
    for (std::int64_t i = 0; i < steps; ++i) step();
  }
  RunSummary summary() const { return recorder_.finish(state_.config.seed); }

  SimState& state() { return state_; }
  const SimState& state() const { return state_; }

 private:
  SimState state_;
  RunRecorder recorder_;
};

/// Runs warm-up plus `recorded_steps` steps and returns the summary.
RunSummary run_replicate(const SimConfig& config, std::int64_t recorded_steps,
                         bool keep_series = false);

}  // namespace gridtraffic
