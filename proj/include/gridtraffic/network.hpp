/// @file network.hpp
/// @brief Grid topology of one-way single-lane streets and the right-hand rule.
///
/// @details Four horizontal and four vertical streets cross each other at
///          sixteen unsignalized intersections. Each intersection is a single
///          lattice point shared by the two streets, so one occupancy slot
///          covers both.

#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gridtraffic {

/// Thrown for invalid run parameters (bad crossing positions, probabilities, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a query has no geometric meaning (e.g. right of way between parallel streets).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Orientation { horizontal, vertical };
enum class Direction { east, west, north, south };
enum class Priority { a_has_priority, b_has_priority };

std::string_view to_string(Direction d);
Orientation orientation_of(Direction d);

/// Which of two vehicles on perpendicular approaches may go first: the one
/// whose partner appears on its left.
/// @throw DomainError if the directions are parallel.
Priority right_of_way(Direction a, Direction b);

inline constexpr int kStreetCount = 8;
inline constexpr int kCrossingsPerStreet = 4;
inline constexpr int kIntersectionCount = 16;

struct StreetSpec {
  int street_id = 0;
  Orientation orientation = Orientation::horizontal;
  Direction direction = Direction::east;
  int length = 0;
  /// Cell indices in travel order, strictly increasing.
  std::array<int, kCrossingsPerStreet> crossing_cells{};
};

struct Intersection {
  int intersection_id = 0;
  int h_street = 0;
  int h_cell = 0;
  int v_street = 0;
  int v_cell = 0;
};

/// Screen coordinates of a lattice point, row 0 at the top (north), column 0 at the left (west).
struct GridPoint {
  int row = 0;
  int col = 0;
  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

/// Direction phase of the alternating pattern. With the defaults, horizontal
/// streets top-to-bottom run east, west, east, west and vertical streets
/// left-to-right run south, north, south, north.
struct DirectionPhase {
  bool first_horizontal_east = true;
  bool first_vertical_south = true;
};

class GridNetwork {
 public:
  const std::vector<StreetSpec>& streets() const { return streets_; }
  const std::vector<Intersection>& intersections() const { return intersections_; }
  const StreetSpec& street(int id) const { return streets_.at(static_cast<std::size_t>(id)); }
  const Intersection& intersection(int id) const {
    return intersections_.at(static_cast<std::size_t>(id));
  }
  int street_length() const { return length_; }
  std::span<const int> crossing_positions() const { return positions_; }

  std::optional<int> cell_to_intersection(int street, int cell) const;

  /// Dense occupancy index. Intersection points come first (slot == intersection id),
  /// the remaining cells follow, so both streets meeting at a point share one slot.
  int slot(int street, int cell) const { return slots_[index(street, cell)]; }
  int slot_count() const { return slot_count_; }

  /// Free cells between `cell` and the next crossing ahead; 0 when the very next
  /// cell is a crossing, -1 when no crossing lies ahead.
  int cells_before_next_crossing(int street, int cell) const {
    return next_crossing_gap_[index(street, cell)];
  }

  GridPoint point_of(int street, int cell) const;

 private:
  friend GridNetwork build_grid(int, std::span<const int>, DirectionPhase);

  std::size_t index(int street, int cell) const {
    return static_cast<std::size_t>(street) * static_cast<std::size_t>(length_) +
           static_cast<std::size_t>(cell);
  }

  int length_ = 0;
  std::vector<int> positions_;
  std::vector<StreetSpec> streets_;
  std::vector<Intersection> intersections_;
  std::vector<int> crossing_of_;  // street*length+cell -> intersection id or -1
  std::vector<int> slots_;
  std::vector<int> next_crossing_gap_;
  int slot_count_ = 0;
};

/// Builds the 8-street, 16-intersection lattice.
///
/// `crossing_positions` are the west-to-east (and north-to-south) coordinates of the
/// four perpendicular streets. Streets travelling west or north see the same points
/// mirrored, so their crossing cells are `length - 1 - p`.
///
/// @throw ConfigError for non-increasing or out-of-range positions.
GridNetwork build_grid(int street_length, std::span<const int> crossing_positions,
                       DirectionPhase phase = {});

inline constexpr std::array<int, kCrossingsPerStreet> kDefaultCrossingPositions{9, 19, 29, 39};
inline constexpr int kDefaultStreetLength = 50;

}  // namespace gridtraffic
