#include "blowbot/grid.hpp"

#include <algorithm>

namespace blowbot {

GridGeometry GridGeometry::for_env(const EnvSpec& env, double resolution) {
  GridGeometry g;
  g.resolution = resolution;
  g.rows = static_cast<int>(std::lround(env.height / resolution));
  g.cols = static_cast<int>(std::lround(env.width / resolution));
  return g;
}

Grid<CellContent> rasterize_static(const EnvSpec& env, const GridGeometry& geom) {
  Grid<CellContent> grid(geom.rows, geom.cols);
  for (int r = 0; r < geom.rows; ++r) {
    for (int c = 0; c < geom.cols; ++c) {
      const Vec2 p = geom.center_of({r, c});
      CellContent v = CellContent::Free;
      if (env.receptacle.contains(p)) v = CellContent::Receptacle;
      for (const Box& w : env.walls) {
        if (w.contains(p)) v = CellContent::Wall;
      }
      grid(r, c) = v;
    }
  }
  return grid;
}

std::vector<Cell> receptacle_cells(const EnvSpec& env, const GridGeometry& geom) {
  std::vector<Cell> cells;
  for (int r = 0; r < geom.rows; ++r) {
    for (int c = 0; c < geom.cols; ++c) {
      if (env.receptacle.contains(geom.center_of({r, c}))) cells.push_back({r, c});
    }
  }
  return cells;
}

Grid<Occupancy> occupancy_from_overhead(const Grid<CellContent>& overhead) {
  return overhead.unaryExpr([](CellContent v) {
    switch (v) {
      case CellContent::Unobserved: return Occupancy::Unknown;
      case CellContent::Wall: return Occupancy::Occupied;
      default: return Occupancy::Free;
    }
  });
}

Grid<Occupancy> inflate(const Grid<Occupancy>& occupancy, int radius_cells) {
  Grid<Occupancy> out = occupancy;
  const int rows = static_cast<int>(occupancy.rows());
  const int cols = static_cast<int>(occupancy.cols());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (out(r, c) != Occupancy::Free) continue;
      bool blocked = r < radius_cells || c < radius_cells || r >= rows - radius_cells || c >= cols - radius_cells;
      for (int dr = -radius_cells; dr <= radius_cells && !blocked; ++dr) {
        for (int dc = -radius_cells; dc <= radius_cells && !blocked; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr >= 0 && rr < rows && cc >= 0 && cc < cols && occupancy(rr, cc) == Occupancy::Occupied) blocked = true;
        }
      }
      if (blocked) out(r, c) = Occupancy::Occupied;
    }
  }
  return out;
}

}  // namespace blowbot
