#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "blowbot/distance_field.hpp"
#include "blowbot/grid.hpp"
#include "blowbot/world.hpp"

namespace blowbot {

struct SensorParams {
  double fov = 0.5 * kPi;
  double range = 1.0;
};

/// Cells seen by one sensor sweep, with their true contents at sensing time.
struct Observation {
  std::vector<std::pair<Cell, CellContent>> cells;
};

/// Ground-truth overhead raster of the current world (static geometry plus
/// the cells holding active object centres).
Grid<CellContent> true_overhead(const WorldState& world, const GridGeometry& geom);

/// 2D ray-cast visibility cone: one ray per perimeter cell of the sensing
/// square. A cell is observed when a ray reaches it before any wall cell and
/// its centre lies within range and the field of view. Walls occlude; objects
/// do not. The robot's own cell is always observed.
Observation sense(const WorldState& world, const GridGeometry& geom, const SensorParams& sensor = {});

/// Agent's fused global maps. Cells stay Unobserved/Unknown until first seen.
struct GlobalMaps {
  GridGeometry geom;
  Grid<CellContent> overhead;
  Grid<Occupancy> occupancy;

  static GlobalMaps blank(const GridGeometry& geom);
};

/// Overwrites observed cells with their sensed contents; every other cell is
/// left untouched, so moved objects leave stale marks until re-observed.
void fuse(GlobalMaps& maps, const Observation& obs);

/// Overhead channel encoding.
float overhead_value(CellContent v);

/// 4 x H x W egocentric state. Column (r * W + c) of `data` holds the four
/// channel values of crop cell (r, c); row 0 of the crop is straight ahead.
struct StateTensor {
  static constexpr int kChannels = 4;
  enum Channel { kOverhead = 0, kAgent = 1, kReceptacleDistance = 2, kAgentDistance = 3 };

  int height = 0;
  int width = 0;
  Eigen::Matrix<float, kChannels, Eigen::Dynamic> data;

  StateTensor() = default;
  StateTensor(int h, int w) : height(h), width(w), data(kChannels, h * w) { data.setZero(); }

  float at(int channel, int row, int col) const { return data(channel, row * width + col); }
  float& at(int channel, int row, int col) { return data(channel, row * width + col); }
  bool operator==(const StateTensor& o) const { return height == o.height && width == o.width && data == o.data; }
};

struct EgocentricParams {
  int crop_size = 96;
  double robot_radius = 0.04;
  double normalization = 1.0;  // distances are divided by this (environment diagonal)
};

/// Egocentric crop centred on the robot with its heading pointing up.
/// Out-of-bounds cells read as wall (and as unreachable in distance channels).
StateTensor egocentric_state(const GlobalMaps& maps, const Pose& pose, std::span<const Cell> receptacle,
                             const EgocentricParams& params);

/// Egocentric crop offsets <-> world coordinates. Crop cell (H/2, W/2) is the
/// robot position; decreasing row moves forward, increasing column moves right.
Vec2 crop_cell_to_world(int row, int col, const Pose& pose, int crop_size, double resolution);
std::pair<int, int> world_to_crop_cell(const Vec2& p, const Pose& pose, int crop_size, double resolution);

}  // namespace blowbot
