#include "gridtraffic/network.hpp"

#include <algorithm>

namespace gridtraffic {

namespace {

struct Vec2 {
  int x;
  int y;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

// North is up, east is right.
Vec2 heading(Direction d) {
  switch (d) {
    case Direction::east: return {1, 0};
    case Direction::west: return {-1, 0};
    case Direction::north: return {0, 1};
    case Direction::south: return {0, -1};
  }
  return {0, 0};
}

bool reversed(Direction d) { return d == Direction::west || d == Direction::north; }

}  // namespace

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::east: return "east";
    case Direction::west: return "west";
    case Direction::north: return "north";
    case Direction::south: return "south";
  }
  return "?";
}

Orientation orientation_of(Direction d) {
  return (d == Direction::east || d == Direction::west) ? Orientation::horizontal
                                                         : Orientation::vertical;
}

Priority right_of_way(Direction a, Direction b) {
  if (orientation_of(a) == orientation_of(b)) {
    throw DomainError("right_of_way: parallel directions never meet");
  }
  // A vehicle approaching with heading h sits at -h relative to the junction.
  // B has priority when it sits on A's right-hand side.
  const Vec2 ha = heading(a);
  const Vec2 hb = heading(b);
  const Vec2 right_of_a{ha.y, -ha.x};
  const Vec2 b_position{-hb.x, -hb.y};
  return b_position == right_of_a ? Priority::b_has_priority : Priority::a_has_priority;
}

std::optional<int> GridNetwork::cell_to_intersection(int street, int cell) const {
  if (street < 0 || street >= kStreetCount || cell < 0 || cell >= length_) return std::nullopt;
  const int id = crossing_of_[index(street, cell)];
  if (id < 0) return std::nullopt;
  return id;
}

GridPoint GridNetwork::point_of(int street, int cell) const {
  const StreetSpec& s = this->street(street);
  const int along = reversed(s.direction) ? length_ - 1 - cell : cell;
  if (s.orientation == Orientation::horizontal) {
    return {positions_[static_cast<std::size_t>(street)], along};
  }
  // Vertical: "along" counts rows from the top.
  return {along, positions_[static_cast<std::size_t>(street - kCrossingsPerStreet)]};
}

GridNetwork build_grid(int street_length, std::span<const int> crossing_positions,
                       DirectionPhase phase) {
  if (street_length <= 0) throw ConfigError("street length must be positive");
  if (crossing_positions.size() != kCrossingsPerStreet) {
    throw ConfigError("exactly 4 crossing positions are required");
  }
  for (std::size_t i = 0; i < crossing_positions.size(); ++i) {
    const int p = crossing_positions[i];
    if (p < 0 || p >= street_length) throw ConfigError("crossing position out of range");
    if (i > 0 && p <= crossing_positions[i - 1]) {
      throw ConfigError("crossing positions must be strictly increasing");
    }
  }

  GridNetwork net;
  net.length_ = street_length;
  net.positions_.assign(crossing_positions.begin(), crossing_positions.end());

  for (int i = 0; i < kStreetCount; ++i) {
    StreetSpec s;
    s.street_id = i;
    s.length = street_length;
    if (i < kCrossingsPerStreet) {
      s.orientation = Orientation::horizontal;
      const bool east = (i % 2 == 0) == phase.first_horizontal_east;
      s.direction = east ? Direction::east : Direction::west;
    } else {
      s.orientation = Orientation::vertical;
      const bool south = ((i - kCrossingsPerStreet) % 2 == 0) == phase.first_vertical_south;
      s.direction = south ? Direction::south : Direction::north;
    }
    for (int k = 0; k < kCrossingsPerStreet; ++k) {
      const int p = net.positions_[static_cast<std::size_t>(k)];
      s.crossing_cells[static_cast<std::size_t>(k)] =
          reversed(s.direction) ? street_length - 1 - p : p;
    }
    std::sort(s.crossing_cells.begin(), s.crossing_cells.end());
    net.streets_.push_back(s);
  }

  const auto cell_at = [&](const StreetSpec& s, int position) {
    return reversed(s.direction) ? street_length - 1 - position : position;
  };
  for (int h = 0; h < kCrossingsPerStreet; ++h) {
    for (int v = 0; v < kCrossingsPerStreet; ++v) {
      Intersection x;
      x.intersection_id = h * kCrossingsPerStreet + v;
      x.h_street = h;
      x.v_street = kCrossingsPerStreet + v;
      // The horizontal street runs along row positions[h] and meets the vertical
      // street at column positions[v].
      x.h_cell = cell_at(net.streets_[static_cast<std::size_t>(x.h_street)],
                         net.positions_[static_cast<std::size_t>(v)]);
      x.v_cell = cell_at(net.streets_[static_cast<std::size_t>(x.v_street)],
                         net.positions_[static_cast<std::size_t>(h)]);
      net.intersections_.push_back(x);
    }
  }

  const std::size_t cells = static_cast<std::size_t>(kStreetCount) *
                            static_cast<std::size_t>(street_length);
  net.crossing_of_.assign(cells, -1);
  net.slots_.assign(cells, -1);
  for (const Intersection& x : net.intersections_) {
    net.crossing_of_[net.index(x.h_street, x.h_cell)] = x.intersection_id;
    net.crossing_of_[net.index(x.v_street, x.v_cell)] = x.intersection_id;
    net.slots_[net.index(x.h_street, x.h_cell)] = x.intersection_id;
    net.slots_[net.index(x.v_street, x.v_cell)] = x.intersection_id;
  }
  int next_slot = kIntersectionCount;
  for (std::size_t i = 0; i < cells; ++i) {
    if (net.slots_[i] < 0) net.slots_[i] = next_slot++;
  }
  net.slot_count_ = next_slot;

  net.next_crossing_gap_.assign(cells, -1);
  for (int s = 0; s < kStreetCount; ++s) {
    int next = -1;
    for (int c = street_length - 1; c >= 0; --c) {
      net.next_crossing_gap_[net.index(s, c)] = next < 0 ? -1 : next - c - 1;
      if (net.crossing_of_[net.index(s, c)] >= 0) next = c;
    }
  }
  return net;
}

}  // namespace gridtraffic
