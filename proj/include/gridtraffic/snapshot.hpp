#pragma once

#include <string>

#include "gridtraffic/core.hpp"

namespace gridtraffic {

/// Glyphs used by render_snapshot.
struct SnapshotGlyphs {
  char off_street = ' ';
  char empty = '.';
  char intersection = '+';
  char co = 'C';
  char de = 'D';
};

/// ASCII picture of the lattice, north at the top: one character per cell,
/// `street_length` rows of `street_length` columns, each row ending in '\n'.
/// A vehicle on an intersection point is drawn instead of the '+'.
std::string render_snapshot(const SimState& state, const SnapshotGlyphs& glyphs = {});

}  // namespace gridtraffic
