#include "gridtraffic/engine.hpp"

#include <array>
#include <climits>
#include <numeric>

#include "gridtraffic/games.hpp"

namespace gridtraffic {

namespace {

bool is_crossing(const GridNetwork& net, int street, int cell) {
  return net.cell_to_intersection(street, cell).has_value();
}

// DE share over the whole fleet, lattice and queue.
double population_q(const SimState& state) {
  int de = 0;
  for (const Vehicle& v : state.fleet) de += v.driver_type == DriverType::de ? 1 : 0;
  return state.fleet.empty() ? 0.0 : static_cast<double>(de) / static_cast<double>(state.fleet.size());
}

// A grantee whose hold has run out but whose exit beyond the point is taken
// does not block its partner, so no cycle of waits can form across streets.
bool grantee_stuck(const SimState& state, int grantee) {
  const Vehicle& g = state.fleet[static_cast<std::size_t>(grantee)];
  if (g.hold_steps > 0) return false;
  const int beyond = g.cell + 2;
  if (!g.on_lattice() || beyond >= state.network.street_length()) return false;
  return state.occupant(g.street, beyond) != kNoVehicle;
}

enum class Entry { open, blocked, cross_occupied };

// Whether vehicle `id` may move onto intersection point `cell` of its street.
// The occupancy seen is the current one, so a point or exit cell vacated
// earlier in this step counts as free.
Entry point_entry(const SimState& state, int street, int cell, int x, int id) {
  const GridNetwork& net = state.network;
  const int occ = state.occupant(street, cell);
  if (occ != kNoVehicle) {
    return state.fleet[static_cast<std::size_t>(occ)].street == street ? Entry::blocked
                                                                      : Entry::cross_occupied;
  }
  const int granted = state.grant[static_cast<std::size_t>(x)];
  if (granted != kNoVehicle && granted != id && !grantee_stuck(state, granted)) {
    return Entry::blocked;
  }
  // Keep the box clear while cross traffic is waiting: do not stop on the point.
  const int beyond = cell + 1;
  if (beyond < net.street_length() && state.occupant(street, beyond) != kNoVehicle) {
    const Intersection& in = net.intersection(x);
    const bool horizontal = in.h_street == street;
    const int cross = horizontal ? in.v_street : in.h_street;
    const int cross_cell = horizontal ? in.v_cell : in.h_cell;
    if (cross_cell > 0 && state.own_occupant(cross, cross_cell - 1) != kNoVehicle) {
      return Entry::blocked;
    }
  }
  return Entry::open;
}

// Moves `v` by `speed` cells and does the per-step bookkeeping. Returns false
// when the vehicle ran off the end of its street.
bool move_vehicle(SimState& state, Vehicle& v, int speed, bool impatience) {
  const GridNetwork& net = state.network;
  const int length = net.street_length();
  const int street = v.street;
  const int old = v.cell;
  const int target = advance(old, speed);

  state.occupancy[static_cast<std::size_t>(net.slot(street, old))] = kNoVehicle;
  for (int c = old + 1; c <= target && c < length; ++c) {
    if (const auto x = net.cell_to_intersection(street, c)) {
      v.waiting_time = 0;
      auto& granted = state.grant[static_cast<std::size_t>(*x)];
      if (granted == v.vehicle_id) granted = kNoVehicle;
    }
  }
  if (impatience && target > old) {
    bool passed = is_crossing(net, street, old);
    for (int c = old + 1; c < target && c < length && !passed; ++c) {
      passed = is_crossing(net, street, c);
    }
    if (passed) v.driver_type = DriverType::co;
  }

  v.speed = speed;
  v.speed_history.push(speed);
  if (target >= length) return false;
  v.cell = target;
  state.occupancy[static_cast<std::size_t>(net.slot(street, target))] = v.vehicle_id;

  if (speed == 0) {
    const int ahead = net.cells_before_next_crossing(street, target);
    const bool approaching = ahead >= 0 && ahead < state.config.approach_window;
    if (approaching || jam_check(v.speed_history.values())) {
      ++v.waiting_time;
      v.waited_this_step = true;
    }
  }
  return true;
}

// Second chance for approachers whose point was still held by a cross-street
// vehicle that had not moved yet when their street was updated.
void late_entries(SimState& state) {
  const bool impatience = std::holds_alternative<Impatience>(state.config.behavior);
  for (const int id : state.deferred) {
    Vehicle& v = state.fleet[static_cast<std::size_t>(id)];
    const int cell = v.cell + 1;
    const auto x = state.network.cell_to_intersection(v.street, cell);
    int speed = 0;
    if (x && point_entry(state, v.street, cell, *x, id) == Entry::open) {
      speed = accelerate_brake(v.speed, state.config.v_max, 1);
    }
    speed = random_slowdown(speed, state.config.p_slow, state.rng.uniform());
    move_vehicle(state, v, speed, impatience);
  }
  state.deferred.clear();
}

}  // namespace

void step_street(SimState& state, int street) {
  const GridNetwork& net = state.network;
  const int length = net.street_length();
  const int v_max = state.config.v_max;
  const bool impatience = std::holds_alternative<Impatience>(state.config.behavior);

  std::vector<int> ids;
  for (int c = length - 1; c >= 0; --c) {
    if (const int id = state.own_occupant(street, c); id != kNoVehicle) ids.push_back(id);
  }

  std::vector<int> exited;
  int leader_cell = INT_MAX;  // leader position before this step
  for (const int id : ids) {
    Vehicle& v = state.fleet[static_cast<std::size_t>(id)];
    const int old = v.cell;

    int speed = 0;
    if (v.hold_steps > 0) {
      --v.hold_steps;
    } else {
      int gap = 0;
      bool defer = false;
      for (int c = old + 1; c <= old + v_max; ++c) {
        if (c >= length) {
          ++gap;  // open exit
          continue;
        }
        if (c >= leader_cell) break;
        if (const auto x = net.cell_to_intersection(street, c)) {
          const Entry e = point_entry(state, street, c, *x, id);
          defer = e == Entry::cross_occupied && c == old + 1;
          if (e != Entry::open) break;
        } else if (state.occupant(street, c) != kNoVehicle) {
          break;
        }
        ++gap;
      }
      if (defer) {
        state.deferred.push_back(id);
        leader_cell = old;
        continue;
      }
      speed = accelerate_brake(v.speed, v_max, gap);
      speed = random_slowdown(speed, state.config.p_slow, state.rng.uniform());
    }
    leader_cell = old;
    if (!move_vehicle(state, v, speed, impatience)) exited.push_back(id);
  }

  for (const int id : exited) recycle_vehicle(state, id);
}

void step_network(SimState& state, RunRecorder* recorder) {
  state.events = {};
  for (Vehicle& v : state.fleet) v.waited_this_step = false;

  std::array<int, kStreetCount> order{};
  std::iota(order.begin(), order.end(), 0);
  state.rng.shuffle(std::span<int>(order));
  state.deferred.clear();
  for (const int s : order) step_street(state, s);
  late_entries(state);

  const std::vector<Meeting> meetings = detect_meetings(state);
  std::vector<MeetingOutcome> outcomes;
  outcomes.reserve(meetings.size());
  for (const Meeting& m : meetings) {
    outcomes.push_back(resolve_meeting(
        state.config.payoffs, state.fleet[static_cast<std::size_t>(m.left_vehicle)].driver_type,
        state.fleet[static_cast<std::size_t>(m.right_vehicle)].driver_type));
  }
  apply_outcomes(state, meetings, outcomes);

  state.events.type_changes += impatience_step(state);
  spawn_from_queue(state, order);

  const std::int64_t completed = state.step + 1;
  std::optional<double> q_sample;
  if (const auto* imitation = std::get_if<Imitation>(&state.config.behavior);
      imitation != nullptr && state.recording() && completed % imitation->tau == 0) {
    state.events.type_changes += imitation_update(state);
    q_sample = population_q(state);
  }

  if (recorder != nullptr && state.recording()) {
    recorder->add(collect_step(state));
    if (q_sample) recorder->add_q_sample(*q_sample);
  }
  state.step = completed;
}

RunSummary run_replicate(const SimConfig& config, std::int64_t recorded_steps, bool keep_series) {
  Simulation sim(config, keep_series);
  sim.run(config.warmup_steps + recorded_steps);
  return sim.summary();
}

}  // namespace gridtraffic
