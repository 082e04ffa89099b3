/// @file core.hpp
/// @brief Mutable simulation state: drivers, lattice occupancy, entry queue, RNG.
///
/// @details The population is a fixed fleet of `max_vehicles` drivers. A driver is
///          either on the lattice or waiting in the FIFO entry queue. Leaving the
///          end of a street sends the driver back to the queue, from which it may
///          enter any street; this is the periodic boundary of the network.

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <span>
#include <vector>

#include "gridtraffic/behavior.hpp"
#include "gridtraffic/driver.hpp"
#include "gridtraffic/games.hpp"
#include "gridtraffic/network.hpp"
#include "gridtraffic/rng.hpp"

namespace gridtraffic {

inline constexpr int kNoVehicle = -1;
inline constexpr int kSpeedHistoryLength = 5;

/// Last five speeds of a vehicle, oldest overwritten first.
class SpeedHistory {
 public:
  void push(int speed) {
    values_[next_] = speed;
    next_ = (next_ + 1) % kSpeedHistoryLength;
    if (size_ < kSpeedHistoryLength) ++size_;
  }
  void clear() { size_ = 0, next_ = 0; }
  /// Order is unspecified once the buffer has wrapped.
  std::span<const int> values() const { return {values_.data(), size_}; }

 private:
  std::array<int, kSpeedHistoryLength> values_{};
  std::size_t size_ = 0;
  std::size_t next_ = 0;
};

struct Vehicle {
  int vehicle_id = 0;
  int street = -1;  ///< -1 while queued
  int cell = 0;
  int speed = 0;
  DriverType driver_type = DriverType::co;
  bool is_core = false;
  int hold_steps = 0;
  int waiting_time = 0;
  bool waited_this_step = false;
  SpeedHistory speed_history;
  ObservationCounts observations;

  bool on_lattice() const { return street >= 0; }
};

struct SimConfig {
  int street_length = kDefaultStreetLength;
  std::array<int, kCrossingsPerStreet> crossing_positions = kDefaultCrossingPositions;
  DirectionPhase phase{};

  int v_max = 1;
  double p_slow = 0.1;
  double p_new = 0.3;
  int max_vehicles = 350;
  int warmup_steps = 50;
  /// A stopped vehicle this many cells or fewer before a crossing counts as waiting.
  int approach_window = 1;
  BehaviorModel behavior = FixedRatio{};
  PayoffTable payoffs = PayoffTable::fixed_ratio_defaults();
  std::uint64_t seed = 1;
  /// Streets new vehicles may enter; all by default.
  std::array<bool, kStreetCount> entry_streets{true, true, true, true, true, true, true, true};
  bool log_meetings = false;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Counters for the step in progress; cleared at the start of every step.
struct StepEvents {
  int conflicts = 0;
  int type_changes = 0;
  int meetings = 0;
  int co_participants = 0;  ///< CO drivers among this step's meeting participants
};

struct MeetingRecord {
  std::int64_t step = 0;
  int intersection_id = 0;
  DriverType left_type = DriverType::co;
  DriverType right_type = DriverType::co;
};

struct SimState {
  SimState(SimConfig config, bool fill_queue = true);

  SimConfig config;
  GridNetwork network;
  std::vector<Vehicle> fleet;   ///< indexed by vehicle_id
  std::deque<int> queue;        ///< vehicle ids, FIFO
  std::vector<int> occupancy;   ///< slot -> vehicle id or kNoVehicle
  /// Per intersection: vehicle granted the point by the last meeting, if it has not entered yet.
  std::vector<int> grant;
  /// Approachers stopped this step only by a cross-street vehicle on the point.
  std::vector<int> deferred;
  std::int64_t step = 0;
  Rng rng;
  StepEvents events;
  std::vector<MeetingRecord> meeting_log;

  int occupant(int street, int cell) const {
    return occupancy[static_cast<std::size_t>(network.slot(street, cell))];
  }
  /// Vehicle at (street, cell) that travels on `street`, ignoring a cross-street
  /// vehicle that sits on a shared intersection point.
  int own_occupant(int street, int cell) const {
    const int id = occupant(street, cell);
    return id != kNoVehicle && fleet[static_cast<std::size_t>(id)].street == street ? id
                                                                                   : kNoVehicle;
  }
  /// Population on the lattice plus the queue.
  int population() const;
  int on_lattice_count() const;

  /// Adds a new driver to the fleet and puts it on the lattice. Test and tooling hook.
  /// @throw std::invalid_argument if the cell is taken or the fleet is full.
  int place_vehicle(int street, int cell, DriverType type, int speed = 0);
  /// Adds a new driver to the back of the queue.
  int enqueue_new(DriverType type, bool is_core = false);

  bool recording() const { return step >= config.warmup_steps; }
};

/// For each street in `street_order` whose entry cell is free, with probability
/// p_new moves the head of the queue onto that cell with speed 0.
void spawn_from_queue(SimState& state, std::span<const int> street_order);

/// Takes a vehicle that ran past the end of its street off the lattice and
/// appends it to the queue, resetting its type per the behaviour model.
void recycle_vehicle(SimState& state, int vehicle_id);

/// Empty when every state invariant holds, otherwise a description of the first violation.
std::optional<std::string> check_invariants(const SimState& state);

}  // namespace gridtraffic
