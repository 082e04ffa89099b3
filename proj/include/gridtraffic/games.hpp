/// @file games.hpp
/// @brief Meetings at intersections and their payoff-table resolution.
///
/// @details A meeting happens when both approach cells of a free intersection
///          point are occupied at the end of the movement phase. The yielding
///          ("left") and priority ("right") roles follow the right-hand rule.
///          The table maps the pair of driver types to time losses, which become
///          hold penalties. After a meeting the pair is settled: one of the two
///          is granted the point and the other may not enter before it.

#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "gridtraffic/driver.hpp"

namespace gridtraffic {

struct SimState;

struct TimeLoss {
  int left = 0;
  int right = 0;
  friend bool operator==(const TimeLoss&, const TimeLoss&) = default;
};

class PayoffTable {
 public:
  PayoffTable() = default;
  /// Entries indexed [left type][right type].
  PayoffTable(TimeLoss co_co, TimeLoss co_de, TimeLoss de_co, TimeLoss de_de,
              bool costs_are_crossing_inclusive);

  const TimeLoss& at(DriverType left, DriverType right) const {
    return entries_[static_cast<std::size_t>(left)][static_cast<std::size_t>(right)];
  }
  void set(DriverType left, DriverType right, TimeLoss loss);

  /// When true a cost includes the step spent crossing, so the hold is cost - 1.
  bool costs_are_crossing_inclusive() const { return crossing_inclusive_; }
  void set_crossing_inclusive(bool value) { crossing_inclusive_ = value; }

  /// Left CO yields at cost (2, 1); DE-left vs CO-right costs both `conflict_cost`;
  /// two DE pay `collision_cost` each. Crossing-inclusive.
  static PayoffTable fixed_ratio_defaults(int conflict_cost = 3, int collision_cost = 50);
  /// Left CO waits 2; DE-left forces CO-right to wait 2; two DE wait 3 and 1. Direct holds.
  static PayoffTable impatience_defaults();

 private:
  std::array<std::array<TimeLoss, 2>, 2> entries_{};
  bool crossing_inclusive_ = true;
};

struct Meeting {
  int intersection_id = 0;
  int left_vehicle = 0;   ///< must yield under the right-hand rule
  int right_vehicle = 0;  ///< has priority
};

enum class Scenario {
  both_co,          ///< CO yields to CO
  left_co_right_de, ///< CO yields to DE
  left_de_right_co, ///< DE refuses to yield
  both_de,          ///< conflict
};

std::string_view to_string(Scenario s);

struct MeetingOutcome {
  int left_hold = 0;
  int right_hold = 0;
  bool is_conflict = false;
  Scenario scenario = Scenario::both_co;
  /// The participant granted the point first. Smaller hold wins; ties go right.
  bool right_goes_first = true;
};

MeetingOutcome resolve_meeting(const PayoffTable& payoffs, DriverType left, DriverType right);

/// Intersections are scanned in a fresh random order each call.
std::vector<Meeting> detect_meetings(SimState& state);

/// Applies holds (max with any existing hold), grants, conflict and meeting
/// tallies, imitation observations and the optional meeting log.
void apply_outcomes(SimState& state, std::span<const Meeting> meetings,
                    std::span<const MeetingOutcome> outcomes);

}  // namespace gridtraffic
