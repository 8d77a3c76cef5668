#include "blowbot/mapping.hpp"

#include <algorithm>

namespace blowbot {
namespace {

bool in_cone(const Vec2& origin, double heading, const Vec2& point, const SensorParams& sensor) {
  const Vec2 v = point - origin;
  const double d = v.norm();
  if (d == 0.0) return true;
  if (d > sensor.range) return false;
  return std::abs(wrap_angle(std::atan2(v.y(), v.x()) - heading)) <= 0.5 * sensor.fov;
}

}  // namespace

Grid<CellContent> true_overhead(const WorldState& world, const GridGeometry& geom) {
  Grid<CellContent> grid = rasterize_static(world.env, geom);
  for (const RigidObject& o : world.objects) {
    if (o.removed) continue;
    const Cell c = geom.cell_of(o.position);
    if (geom.in_bounds(c) && grid(c.row, c.col) != CellContent::Wall) grid(c.row, c.col) = CellContent::Object;
  }
  return grid;
}

Observation sense(const WorldState& world, const GridGeometry& geom, const SensorParams& sensor) {
  const Grid<CellContent> truth = true_overhead(world, geom);
  const Vec2 origin = world.robot.position();
  const double heading = world.robot.theta;
  const double res = geom.resolution;
  const Eigen::Vector2d o(origin.x() / res, origin.y() / res);  // (x, y) in cell units
  const Cell home = geom.cell_of(origin);

  Grid<std::uint8_t> seen = Grid<std::uint8_t>::Zero(geom.rows, geom.cols);
  if (geom.in_bounds(home)) seen(home.row, home.col) = 1;

  const int half = static_cast<int>(std::ceil(sensor.range / res)) + 2;
  const double max_t = sensor.range / res + 2.0;
  const double margin = 0.25;

  auto cast = [&](const Cell& target) {
    Eigen::Vector2d dir((target.col + 0.5) - o.x(), (target.row + 0.5) - o.y());
    const double len = dir.norm();
    if (len == 0.0) return;
    dir /= len;
    if (std::abs(wrap_angle(std::atan2(dir.y(), dir.x()) - heading)) > 0.5 * sensor.fov + margin) return;

    // Amanatides-Woo grid traversal.
    int col = home.col;
    int row = home.row;
    const int step_c = dir.x() > 0 ? 1 : -1;
    const int step_r = dir.y() > 0 ? 1 : -1;
    const double inf = kInfinity;
    double t_max_c = dir.x() != 0.0 ? ((dir.x() > 0 ? (col + 1) - o.x() : o.x() - col) / std::abs(dir.x())) : inf;
    double t_max_r = dir.y() != 0.0 ? ((dir.y() > 0 ? (row + 1) - o.y() : o.y() - row) / std::abs(dir.y())) : inf;
    const double t_delta_c = dir.x() != 0.0 ? 1.0 / std::abs(dir.x()) : inf;
    const double t_delta_r = dir.y() != 0.0 ? 1.0 / std::abs(dir.y()) : inf;
    double t = 0.0;
    while (t <= max_t) {
      const Cell c{row, col};
      if (!geom.in_bounds(c)) return;
      if (in_cone(origin, heading, geom.center_of(c), sensor)) seen(row, col) = 1;
      if (truth(row, col) == CellContent::Wall) return;
      if (t_max_c < t_max_r) {
        t = t_max_c;
        t_max_c += t_delta_c;
        col += step_c;
      } else {
        t = t_max_r;
        t_max_r += t_delta_r;
        row += step_r;
      }
    }
  };

  for (int i = -half; i <= half; ++i) {
    cast({home.row - half, home.col + i});
    cast({home.row + half, home.col + i});
    if (i != -half && i != half) {
      cast({home.row + i, home.col - half});
      cast({home.row + i, home.col + half});
    }
  }

  Observation obs;
  for (int r = 0; r < geom.rows; ++r) {
    for (int c = 0; c < geom.cols; ++c) {
      if (seen(r, c)) obs.cells.emplace_back(Cell{r, c}, truth(r, c));
    }
  }
  return obs;
}

GlobalMaps GlobalMaps::blank(const GridGeometry& geom) {
  return {geom, Grid<CellContent>::Constant(geom.rows, geom.cols, CellContent::Unobserved),
          Grid<Occupancy>::Constant(geom.rows, geom.cols, Occupancy::Unknown)};
}

void fuse(GlobalMaps& maps, const Observation& obs) {
  for (const auto& [cell, content] : obs.cells) {
    maps.overhead(cell.row, cell.col) = content;
    maps.occupancy(cell.row, cell.col) = content == CellContent::Wall ? Occupancy::Occupied : Occupancy::Free;
  }
}

float overhead_value(CellContent v) {
  switch (v) {
    case CellContent::Unobserved: return 0.0f;
    case CellContent::Free: return 0.25f;
    case CellContent::Receptacle: return 0.5f;
    case CellContent::Wall: return 0.75f;
    case CellContent::Object: return 1.0f;
  }
  return 0.0f;
}

Vec2 crop_cell_to_world(int row, int col, const Pose& pose, int crop_size, double resolution) {
  const int centre = crop_size / 2;
  const Vec2 h = pose.heading();
  const Vec2 right(h.y(), -h.x());
  const double forward = (centre - row) * resolution;
  const double side = (col - centre) * resolution;
  return pose.position() + forward * h + side * right;
}

std::pair<int, int> world_to_crop_cell(const Vec2& p, const Pose& pose, int crop_size, double resolution) {
  const int centre = crop_size / 2;
  const Vec2 h = pose.heading();
  const Vec2 right(h.y(), -h.x());
  const Vec2 v = p - pose.position();
  const long forward = std::lround(v.dot(h) / resolution);
  const long side = std::lround(v.dot(right) / resolution);
  return {centre - static_cast<int>(forward), centre + static_cast<int>(side)};
}

StateTensor egocentric_state(const GlobalMaps& maps, const Pose& pose, std::span<const Cell> receptacle,
                             const EgocentricParams& params) {
  const GridGeometry& geom = maps.geom;
  const int n = params.crop_size;
  const int centre = n / 2;
  StateTensor st(n, n);

  const DistanceField to_receptacle = distance_field(maps.occupancy, receptacle, UnknownAs::Free, geom.resolution);
  const Cell agent = geom.cell_of(pose.position());
  Grid<Occupancy> occ = maps.occupancy;
  if (geom.in_bounds(agent)) occ(agent.row, agent.col) = Occupancy::Free;
  const DistanceField from_agent = distance_field(occ, std::span<const Cell>(&agent, 1), UnknownAs::Occupied,
                                                  geom.resolution);

  auto normalized = [&](double d) {
    return std::isfinite(d) ? static_cast<float>(std::min(d / params.normalization, 1.0)) : 1.0f;
  };

  const Vec2 h = pose.heading();
  const Vec2 right(h.y(), -h.x());
  const Vec2 origin = pose.position();
  const float wall = overhead_value(CellContent::Wall);
  const double footprint = params.robot_radius / geom.resolution;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const Vec2 p = origin + ((centre - r) * geom.resolution) * h + ((c - centre) * geom.resolution) * right;
      const Cell cell = geom.cell_of(p);
      const int col_index = r * n + c;
      if (geom.in_bounds(cell)) {
        st.data(StateTensor::kOverhead, col_index) = overhead_value(maps.overhead(cell.row, cell.col));
        st.data(StateTensor::kReceptacleDistance, col_index) = normalized(to_receptacle.at(cell));
        st.data(StateTensor::kAgentDistance, col_index) = normalized(from_agent.at(cell));
      } else {
        st.data(StateTensor::kOverhead, col_index) = wall;
        st.data(StateTensor::kReceptacleDistance, col_index) = 1.0f;
        st.data(StateTensor::kAgentDistance, col_index) = 1.0f;
      }
      const double dr = r - centre;
      const double dc = c - centre;
      st.data(StateTensor::kAgent, col_index) = dr * dr + dc * dc <= footprint * footprint ? 1.0f : 0.0f;
    }
  }
  return st;
}

}  // namespace blowbot
