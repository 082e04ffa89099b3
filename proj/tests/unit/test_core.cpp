#include <algorithm>
#include <array>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "gridtraffic/core.hpp"
#include "gridtraffic/engine.hpp"

using namespace gridtraffic;

namespace {

std::array<int, kStreetCount> all_streets() {
  std::array<int, kStreetCount> order{};
  std::iota(order.begin(), order.end(), 0);
  return order;
}

}  // namespace

TEST_CASE("rng: same seed, same stream") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    differs = differs || x != c.next();
  }
  CHECK(differs);
}

TEST_CASE("rng: uniform in [0, 1) and below() in range") {
  Rng r(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(7) < 7u);
  }
}

TEST_CASE("rng: shuffle is a permutation") {
  Rng r(3);
  std::array<int, 8> v{};
  std::iota(v.begin(), v.end(), 0);
  r.shuffle(std::span<int>(v));
  std::array<int, 8> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 8; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("rng: derived seeds differ by index and by master") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t m = 0; m < 4; ++m) {
    for (std::uint64_t i = 0; i < 64; ++i) seen.insert(derive_seed(m, i));
  }
  CHECK(seen.size() == 4 * 64);
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
}

TEST_CASE("queue starts full and the lattice empty") {
  SimConfig cfg;
  cfg.max_vehicles = 20;
  SimState s(cfg);
  CHECK(s.queue.size() == 20);
  CHECK(s.on_lattice_count() == 0);
  CHECK(s.population() == 20);
  CHECK_FALSE(check_invariants(s).has_value());
}

TEST_CASE("spawn with p_new = 0 changes nothing") {
  SimConfig cfg;
  cfg.p_new = 0.0;
  SimState s(cfg);
  const auto order = all_streets();
  spawn_from_queue(s, order);
  CHECK(s.on_lattice_count() == 0);
  CHECK(s.queue.size() == static_cast<std::size_t>(cfg.max_vehicles));
}

TEST_CASE("spawn with p_new = 1 fills every entry cell") {
  SimConfig cfg;
  cfg.p_new = 1.0;
  SimState s(cfg);
  const auto order = all_streets();
  const int head = s.queue.front();
  spawn_from_queue(s, order);
  CHECK(s.on_lattice_count() == 8);
  for (int st = 0; st < 8; ++st) {
    const int id = s.occupant(st, 0);
    REQUIRE(id != kNoVehicle);
    CHECK(s.fleet[static_cast<std::size_t>(id)].speed == 0);
  }
  // FIFO: the first street in the order got the head of the queue.
  CHECK(s.occupant(order[0], 0) == head);
  CHECK_FALSE(check_invariants(s).has_value());
}

TEST_CASE("spawn skips a street whose entry cell is taken") {
  SimConfig cfg;
  cfg.p_new = 1.0;
  SimState s(cfg, false);
  const int blocker = s.place_vehicle(3, 0, DriverType::co);
  for (int i = 0; i < 5; ++i) s.enqueue_new(DriverType::co);
  const std::array<int, 1> only{3};
  spawn_from_queue(s, only);
  CHECK(s.occupant(3, 0) == blocker);
  CHECK(s.queue.size() == 5);
}

TEST_CASE("spawn respects entry_streets") {
  SimConfig cfg;
  cfg.p_new = 1.0;
  cfg.entry_streets.fill(false);
  cfg.entry_streets[5] = true;
  SimState s(cfg);
  const auto order = all_streets();
  spawn_from_queue(s, order);
  CHECK(s.on_lattice_count() == 1);
  CHECK(s.occupant(5, 0) != kNoVehicle);
}

TEST_CASE("recycle under impatience re-queues a DE driver as CO with no wait") {
  SimConfig cfg;
  cfg.behavior = Impatience{};
  cfg.payoffs = PayoffTable::impatience_defaults();
  SimState s(cfg, false);
  const int id = s.place_vehicle(2, 30, DriverType::de, 1);
  Vehicle& v = s.fleet[static_cast<std::size_t>(id)];
  v.waiting_time = 12;
  v.hold_steps = 3;
  const int before = s.population();
  recycle_vehicle(s, id);
  CHECK(v.driver_type == DriverType::co);
  CHECK(v.waiting_time == 0);
  CHECK(v.hold_steps == 0);
  CHECK_FALSE(v.on_lattice());
  CHECK(s.queue.back() == id);
  CHECK(s.population() == before);
  CHECK_FALSE(check_invariants(s).has_value());
}

TEST_CASE("recycle under imitation keeps core flag, type and tallies") {
  SimConfig cfg;
  cfg.behavior = Imitation{0.5, 0.0, 500};
  SimState s(cfg, false);
  const int core = s.place_vehicle(0, 20, DriverType::co);
  s.fleet[static_cast<std::size_t>(core)].is_core = true;
  const int plain = s.place_vehicle(1, 20, DriverType::de);
  s.fleet[static_cast<std::size_t>(plain)].observations = {1.5, 2.0};
  recycle_vehicle(s, core);
  recycle_vehicle(s, plain);
  CHECK(s.fleet[static_cast<std::size_t>(core)].is_core);
  CHECK(s.fleet[static_cast<std::size_t>(core)].driver_type == DriverType::co);
  CHECK(s.fleet[static_cast<std::size_t>(plain)].driver_type == DriverType::de);
  CHECK(s.fleet[static_cast<std::size_t>(plain)].observations.co == 1.5);
  CHECK(s.fleet[static_cast<std::size_t>(plain)].observations.de == 2.0);
}

TEST_CASE("recycle under a fixed ratio redraws the type") {
  SimConfig cfg;
  cfg.behavior = FixedRatio{0.0};
  SimState s(cfg, false);
  const int id = s.place_vehicle(0, 20, DriverType::co);
  recycle_vehicle(s, id);
  CHECK(s.fleet[static_cast<std::size_t>(id)].driver_type == DriverType::de);
}

TEST_CASE("place_vehicle rejects taken cells, including a shared point") {
  SimConfig cfg;
  SimState s(cfg, false);
  s.place_vehicle(0, 9, DriverType::co);
  const Intersection& x = s.network.intersection(0);
  CHECK_THROWS_AS(s.place_vehicle(x.v_street, x.v_cell, DriverType::co), std::invalid_argument);
  CHECK_THROWS_AS(s.place_vehicle(0, 9, DriverType::co), std::invalid_argument);
  CHECK_THROWS_AS(s.place_vehicle(0, 50, DriverType::co), std::invalid_argument);
  CHECK_THROWS_AS(s.place_vehicle(0, 3, DriverType::co, 2), std::invalid_argument);
}

TEST_CASE("invariant checker spots a doubled point") {
  SimConfig cfg;
  SimState s(cfg, false);
  const int a = s.place_vehicle(0, 5, DriverType::co);
  s.place_vehicle(0, 6, DriverType::co);
  s.fleet[static_cast<std::size_t>(a)].cell = 6;
  CHECK(check_invariants(s).has_value());
}

TEST_CASE("bad configuration values are rejected") {
  SimConfig cfg;
  cfg.p_slow = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.p_new = -0.1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.max_vehicles = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.behavior = Imitation{0.5, 0.0, 0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.behavior = Impatience{WeibullParams{0.0, 2.0}, HazardMode::discrete_conditional};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.payoffs.set(DriverType::co, DriverType::co, {-1, 0});
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("population fills toward max_vehicles and then stays put") {
  for (const BehaviorModel& model :
       {BehaviorModel{FixedRatio{0.75}}, BehaviorModel{Imitation{0.5, 0.1, 100}},
        BehaviorModel{Impatience{}}}) {
    SimConfig cfg;
    cfg.behavior = model;
    if (std::holds_alternative<Impatience>(model)) cfg.payoffs = PayoffTable::impatience_defaults();
    cfg.p_new = 0.5;
    cfg.seed = 11;
    SimState s(cfg);
    for (int i = 0; i < 1500; ++i) {
      step_network(s);
      REQUIRE(s.population() == cfg.max_vehicles);
      REQUIRE_FALSE(check_invariants(s).has_value());
    }
  }
}
