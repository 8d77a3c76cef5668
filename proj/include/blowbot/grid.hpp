#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "blowbot/common.hpp"
#include "blowbot/env.hpp"

namespace blowbot {

/// Dense 2D grid addressed as (row, col). Row-major storage so that the flat
/// index row * cols + col is also the memory order.
template <typename T>
using Grid = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kDefaultResolution = 0.02;

/// Overhead cell contents as seen by the agent.
enum class CellContent : std::uint8_t { Unobserved = 0, Free, Wall, Object, Receptacle };

enum class Occupancy : std::uint8_t { Unknown = 0, Free, Occupied };

enum class UnknownAs { Free, Occupied };

/// Maps world coordinates onto the cell lattice covering [0, width] x [0, height].
struct GridGeometry {
  int rows = 0;
  int cols = 0;
  double resolution = kDefaultResolution;

  static GridGeometry for_env(const EnvSpec& env, double resolution = kDefaultResolution);

  bool in_bounds(const Cell& c) const { return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols; }
  Cell cell_of(const Vec2& p) const {
    return {static_cast<int>(std::floor(p.y() / resolution)), static_cast<int>(std::floor(p.x() / resolution))};
  }
  Vec2 center_of(const Cell& c) const { return {(c.col + 0.5) * resolution, (c.row + 0.5) * resolution}; }
  int flat(const Cell& c) const { return c.row * cols + c.col; }
  Cell unflat(int index) const { return {index / cols, index % cols}; }
};

/// Ground-truth static raster of an environment: walls, receptacle, free floor.
Grid<CellContent> rasterize_static(const EnvSpec& env, const GridGeometry& geom);

std::vector<Cell> receptacle_cells(const EnvSpec& env, const GridGeometry& geom);

/// Occupancy derived from overhead contents (walls occupied, everything observed
/// otherwise free, unobserved unknown).
Grid<Occupancy> occupancy_from_overhead(const Grid<CellContent>& overhead);

/// Marks every cell within `radius_cells` (Chebyshev) of an occupied cell, or of
/// the grid border, as occupied. Unknown cells are left untouched.
Grid<Occupancy> inflate(const Grid<Occupancy>& occupancy, int radius_cells);

}  // namespace blowbot
