#pragma once

#include <limits>
#include <span>
#include <vector>

#include "blowbot/grid.hpp"

namespace blowbot {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// 8-connected shortest-path distances in meters; +inf marks blocked or
/// unreachable cells.
struct DistanceField {
  Grid<double> distance;
  double resolution = kDefaultResolution;

  double at(const Cell& c) const { return distance(c.row, c.col); }
  bool reachable(const Cell& c) const { return std::isfinite(at(c)); }

  /// Bilinear interpolation over cell centres, skipping non-finite corners.
  /// Returns +inf when every corner is non-finite.
  double sample(const Vec2& p) const;
};

/// Dijkstra from `sources` with axial step cost `resolution` and diagonal step
/// cost `resolution * sqrt(2)`. Occupied cells (and unknown cells when
/// `unknown_as == Occupied`) are +inf and block paths; occupied sources are
/// ignored.
DistanceField distance_field(const Grid<Occupancy>& occupancy, std::span<const Cell> sources, UnknownAs unknown_as,
                             double resolution = kDefaultResolution);

using Path = std::vector<Cell>;

/// Greedy descent of the `to`-sourced distance field starting at `from`
/// (unknown cells block). Ties go to the lowest flat index. When `to` is
/// unreachable the path ends at the reachable cell closest to `to`.
Path plan_path(const Grid<Occupancy>& occupancy, const Cell& from, const Cell& to,
               double resolution = kDefaultResolution);

}  // namespace blowbot
