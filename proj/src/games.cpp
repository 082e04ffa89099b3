#include "gridtraffic/games.hpp"

#include <algorithm>
#include <numeric>

#include "gridtraffic/core.hpp"

namespace gridtraffic {

namespace {

Observed observed(DriverType t) { return t == DriverType::co ? Observed::saw_co : Observed::saw_de; }

}  // namespace

PayoffTable::PayoffTable(TimeLoss co_co, TimeLoss co_de, TimeLoss de_co, TimeLoss de_de,
                         bool costs_are_crossing_inclusive)
    : entries_{{{co_co, co_de}, {de_co, de_de}}},
      crossing_inclusive_(costs_are_crossing_inclusive) {}

void PayoffTable::set(DriverType left, DriverType right, TimeLoss loss) {
  entries_[static_cast<std::size_t>(left)][static_cast<std::size_t>(right)] = loss;
}

PayoffTable PayoffTable::fixed_ratio_defaults(int conflict_cost, int collision_cost) {
  return PayoffTable({2, 1}, {2, 1}, {conflict_cost, conflict_cost},
                     {collision_cost, collision_cost}, true);
}

PayoffTable PayoffTable::impatience_defaults() {
  return PayoffTable({2, 0}, {2, 0}, {0, 2}, {3, 1}, false);
}

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::both_co: return "both_co";
    case Scenario::left_co_right_de: return "left_co_right_de";
    case Scenario::left_de_right_co: return "left_de_right_co";
    case Scenario::both_de: return "both_de";
  }
  return "?";
}

MeetingOutcome resolve_meeting(const PayoffTable& payoffs, DriverType left, DriverType right) {
  const TimeLoss& cost = payoffs.at(left, right);
  const int crossing = payoffs.costs_are_crossing_inclusive() ? 1 : 0;
  MeetingOutcome out;
  out.left_hold = std::max(cost.left - crossing, 0);
  out.right_hold = std::max(cost.right - crossing, 0);
  out.is_conflict = left == DriverType::de && right == DriverType::de;
  if (left == DriverType::co) {
    out.scenario = right == DriverType::co ? Scenario::both_co : Scenario::left_co_right_de;
  } else {
    out.scenario = right == DriverType::co ? Scenario::left_de_right_co : Scenario::both_de;
  }
  out.right_goes_first = out.right_hold <= out.left_hold;
  return out;
}

std::vector<Meeting> detect_meetings(SimState& state) {
  std::array<int, kIntersectionCount> order{};
  std::iota(order.begin(), order.end(), 0);
  state.rng.shuffle(std::span<int>(order));

  std::vector<Meeting> meetings;
  for (const int id : order) {
    const Intersection& x = state.network.intersection(id);
    if (state.grant[static_cast<std::size_t>(id)] != kNoVehicle) continue;
    if (state.occupancy[static_cast<std::size_t>(id)] != kNoVehicle) continue;
    if (x.h_cell == 0 || x.v_cell == 0) continue;
    const int h = state.own_occupant(x.h_street, x.h_cell - 1);
    const int v = state.own_occupant(x.v_street, x.v_cell - 1);
    if (h == kNoVehicle || v == kNoVehicle) continue;
    // Only drivers free to move this step can meet.
    if (state.fleet[static_cast<std::size_t>(h)].hold_steps > 0 ||
        state.fleet[static_cast<std::size_t>(v)].hold_steps > 0) {
      continue;
    }

    const Direction dh = state.network.street(x.h_street).direction;
    const Direction dv = state.network.street(x.v_street).direction;
    const bool h_priority = right_of_way(dh, dv) == Priority::a_has_priority;
    meetings.push_back({id, h_priority ? v : h, h_priority ? h : v});
  }
  return meetings;
}

void apply_outcomes(SimState& state, std::span<const Meeting> meetings,
                    std::span<const MeetingOutcome> outcomes) {
  const bool imitation = std::holds_alternative<Imitation>(state.config.behavior);
  for (std::size_t i = 0; i < meetings.size() && i < outcomes.size(); ++i) {
    const Meeting& m = meetings[i];
    const MeetingOutcome& o = outcomes[i];
    Vehicle& left = state.fleet[static_cast<std::size_t>(m.left_vehicle)];
    Vehicle& right = state.fleet[static_cast<std::size_t>(m.right_vehicle)];

    left.hold_steps = std::max(left.hold_steps, o.left_hold);
    right.hold_steps = std::max(right.hold_steps, o.right_hold);
    state.grant[static_cast<std::size_t>(m.intersection_id)] =
        o.right_goes_first ? m.right_vehicle : m.left_vehicle;

    ++state.events.meetings;
    state.events.co_participants += (left.driver_type == DriverType::co ? 1 : 0) +
                                    (right.driver_type == DriverType::co ? 1 : 0);
    if (o.is_conflict) ++state.events.conflicts;
    if (state.config.log_meetings) {
      state.meeting_log.push_back({state.step, m.intersection_id, left.driver_type,
                                   right.driver_type});
    }

    if (imitation && state.recording()) {
      // A yielding CO driver never learns what its opponent would have done.
      record_interaction(left.observations, left.driver_type == DriverType::co
                                                ? Observed::ambiguous
                                                : observed(right.driver_type));
      record_interaction(right.observations, observed(left.driver_type));
    }
  }
}

}  // namespace gridtraffic
