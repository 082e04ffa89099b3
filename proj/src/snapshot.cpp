#include "gridtraffic/snapshot.hpp"

namespace gridtraffic {

std::string render_snapshot(const SimState& state, const SnapshotGlyphs& glyphs) {
  const GridNetwork& net = state.network;
  const int n = net.street_length();
  const auto width = static_cast<std::size_t>(n) + 1;
  std::string out(width * static_cast<std::size_t>(n), glyphs.off_street);
  const auto at = [&](GridPoint p) -> char& {
    return out[static_cast<std::size_t>(p.row) * width + static_cast<std::size_t>(p.col)];
  };
  for (int r = 0; r < n; ++r) out[static_cast<std::size_t>(r) * width + static_cast<std::size_t>(n)] = '\n';

  for (const StreetSpec& s : net.streets()) {
    for (int c = 0; c < n; ++c) {
      at(net.point_of(s.street_id, c)) =
          net.cell_to_intersection(s.street_id, c) ? glyphs.intersection : glyphs.empty;
    }
  }
  for (const Vehicle& v : state.fleet) {
    if (!v.on_lattice()) continue;
    at(net.point_of(v.street, v.cell)) = v.driver_type == DriverType::co ? glyphs.co : glyphs.de;
  }
  return out;
}

}  // namespace gridtraffic
