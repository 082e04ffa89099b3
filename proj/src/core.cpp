#include "gridtraffic/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gridtraffic {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

DriverType initial_type(const BehaviorModel& model, Rng& rng) {
  if (const auto* fixed = std::get_if<FixedRatio>(&model)) {
    return assign_type_fixed(fixed->p_co, rng.uniform());
  }
  if (const auto* imitation = std::get_if<Imitation>(&model)) {
    return rng.bernoulli(imitation->initial_p_de) ? DriverType::de : DriverType::co;
  }
  return DriverType::co;
}

}  // namespace

void SimConfig::validate() const {
  if (v_max < 1) throw ConfigError("v_max must be at least 1");
  if (!is_probability(p_slow)) throw ConfigError("p_slow must be in [0, 1]");
  if (!is_probability(p_new)) throw ConfigError("p_new must be in [0, 1]");
  if (max_vehicles < 1) throw ConfigError("max_vehicles must be positive");
  if (warmup_steps < 0) throw ConfigError("warmup_steps must be non-negative");
  if (approach_window < 0) throw ConfigError("approach_window must be non-negative");
  for (DriverType l : {DriverType::co, DriverType::de}) {
    for (DriverType r : {DriverType::co, DriverType::de}) {
      const TimeLoss& t = payoffs.at(l, r);
      if (t.left < 0 || t.right < 0) throw ConfigError("payoff costs must be non-negative");
    }
  }
  gridtraffic::validate(behavior);
}

SimState::SimState(SimConfig cfg, bool fill_queue)
    : config(std::move(cfg)),
      network(build_grid(config.street_length, config.crossing_positions, config.phase)),
      rng(config.seed) {
  config.validate();
  occupancy.assign(static_cast<std::size_t>(network.slot_count()), kNoVehicle);
  grant.assign(kIntersectionCount, kNoVehicle);
  fleet.reserve(static_cast<std::size_t>(config.max_vehicles));
  if (!fill_queue) return;

  const int n = config.max_vehicles;
  std::vector<bool> core(static_cast<std::size_t>(n), false);
  if (const auto* imitation = std::get_if<Imitation>(&config.behavior)) {
    // Exactly ceil(c * n) core drivers, so the DE share can never exceed 1 - c.
    const auto core_count = static_cast<int>(
        std::min<double>(n, std::ceil(imitation->core_fraction * n - 1e-9)));
    std::vector<int> ids(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < core_count; ++i) {
      const auto j = static_cast<std::size_t>(i) +
                     static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n - i)));
      std::swap(ids[static_cast<std::size_t>(i)], ids[j]);
      core[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])] = true;
    }
  }
  for (int i = 0; i < n; ++i) {
    const bool is_core = core[static_cast<std::size_t>(i)];
    const DriverType type = is_core ? DriverType::co : initial_type(config.behavior, rng);
    enqueue_new(type, is_core);
  }
}

int SimState::population() const {
  return on_lattice_count() + static_cast<int>(queue.size());
}

int SimState::on_lattice_count() const {
  return static_cast<int>(std::count_if(fleet.begin(), fleet.end(),
                                        [](const Vehicle& v) { return v.on_lattice(); }));
}

int SimState::enqueue_new(DriverType type, bool is_core) {
  if (static_cast<int>(fleet.size()) >= config.max_vehicles) {
    throw std::invalid_argument("fleet is already at max_vehicles");
  }
  Vehicle v;
  v.vehicle_id = static_cast<int>(fleet.size());
  v.driver_type = type;
  v.is_core = is_core;
  fleet.push_back(v);
  queue.push_back(v.vehicle_id);
  return v.vehicle_id;
}

int SimState::place_vehicle(int street, int cell, DriverType type, int speed) {
  if (street < 0 || street >= kStreetCount || cell < 0 || cell >= config.street_length) {
    throw std::invalid_argument("place_vehicle: position outside the network");
  }
  if (speed < 0 || speed > config.v_max) {
    throw std::invalid_argument("place_vehicle: speed outside [0, v_max]");
  }
  if (occupant(street, cell) != kNoVehicle) {
    throw std::invalid_argument("place_vehicle: cell already occupied");
  }
  const int id = enqueue_new(type);
  queue.pop_back();
  Vehicle& v = fleet[static_cast<std::size_t>(id)];
  v.street = street;
  v.cell = cell;
  v.speed = speed;
  occupancy[static_cast<std::size_t>(network.slot(street, cell))] = id;
  return id;
}

void spawn_from_queue(SimState& state, std::span<const int> street_order) {
  for (const int s : street_order) {
    if (state.queue.empty()) return;
    if (!state.config.entry_streets[static_cast<std::size_t>(s)]) continue;
    if (state.occupant(s, 0) != kNoVehicle) continue;
    if (const auto x = state.network.cell_to_intersection(s, 0);
        x && state.grant[static_cast<std::size_t>(*x)] != kNoVehicle) {
      continue;
    }
    if (!state.rng.bernoulli(state.config.p_new)) continue;

    const int id = state.queue.front();
    state.queue.pop_front();
    Vehicle& v = state.fleet[static_cast<std::size_t>(id)];
    v.street = s;
    v.cell = 0;
    v.speed = 0;
    state.occupancy[static_cast<std::size_t>(state.network.slot(s, 0))] = id;
  }
}

void recycle_vehicle(SimState& state, int vehicle_id) {
  Vehicle& v = state.fleet[static_cast<std::size_t>(vehicle_id)];
  if (v.on_lattice() && v.cell < state.config.street_length) {
    auto& slot = state.occupancy[static_cast<std::size_t>(state.network.slot(v.street, v.cell))];
    if (slot == vehicle_id) slot = kNoVehicle;
  }
  v.street = -1;
  v.cell = 0;
  v.speed = 0;
  v.hold_steps = 0;
  v.waiting_time = 0;
  v.waited_this_step = false;
  v.speed_history.clear();

  if (const auto* fixed = std::get_if<FixedRatio>(&state.config.behavior)) {
    v.driver_type = assign_type_fixed(fixed->p_co, state.rng.uniform());
  } else if (std::holds_alternative<Impatience>(state.config.behavior)) {
    v.driver_type = DriverType::co;
  }
  // Imitation drivers keep type, core flag and tallies.
  state.queue.push_back(vehicle_id);
}

std::optional<std::string> check_invariants(const SimState& state) {
  std::vector<int> seen(state.occupancy.size(), kNoVehicle);
  int on_lattice = 0;
  for (const Vehicle& v : state.fleet) {
    if (v.speed < 0 || v.speed > state.config.v_max) {
      return "vehicle " + std::to_string(v.vehicle_id) + " speed out of range";
    }
    if (v.is_core && v.driver_type != DriverType::co) {
      return "core vehicle " + std::to_string(v.vehicle_id) + " is not CO";
    }
    if (!v.on_lattice()) continue;
    ++on_lattice;
    const auto slot = static_cast<std::size_t>(state.network.slot(v.street, v.cell));
    if (seen[slot] != kNoVehicle) {
      return "vehicles " + std::to_string(seen[slot]) + " and " + std::to_string(v.vehicle_id) +
             " share a lattice point";
    }
    seen[slot] = v.vehicle_id;
    if (state.occupancy[slot] != v.vehicle_id) {
      return "occupancy table out of sync for vehicle " + std::to_string(v.vehicle_id);
    }
  }
  const auto marked = std::count_if(state.occupancy.begin(), state.occupancy.end(),
                                    [](int id) { return id != kNoVehicle; });
  if (marked != on_lattice) return "occupancy table has stale entries";
  if (on_lattice + static_cast<int>(state.queue.size()) != static_cast<int>(state.fleet.size())) {
    return "population not conserved";
  }
  if (static_cast<int>(state.fleet.size()) > state.config.max_vehicles) {
    return "population exceeds max_vehicles";
  }
  return std::nullopt;
}

}  // namespace gridtraffic
