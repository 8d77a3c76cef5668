#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "blowbot/grid.hpp"
#include "blowbot/mapping.hpp"
#include "blowbot/world.hpp"

namespace blowbot {

/// Per-pixel, per-channel Q-values: A rows by (H * W) columns, column
/// r * W + c for crop cell (r, c).
struct ActionMap {
  int height = 0;
  int width = 0;
  Eigen::MatrixXf values;

  ActionMap() = default;
  ActionMap(int channels, int h, int w) : height(h), width(w), values(Eigen::MatrixXf::Zero(channels, h * w)) {}

  int channels() const { return static_cast<int>(values.rows()); }
  int size() const { return channels() * height * width; }
  float at(int channel, int row, int col) const { return values(channel, row * width + col); }
  float& at(int channel, int row, int col) { return values(channel, row * width + col); }
};

struct Action {
  int channel = 0;
  int row = 0;
  int col = 0;
  Vec2 world_target = Vec2::Zero();

  /// Channel-major, then row-major flat index.
  int flat(int height, int width) const { return (channel * height + row) * width + col; }
  static Action from_flat(int index, int height, int width);
  friend bool operator==(const Action& a, const Action& b) {
    return a.channel == b.channel && a.row == b.row && a.col == b.col;
  }
};

enum class RobotVariant { BlowingTurn, BlowingMove, SideBlower, Pushing };

std::string to_string(RobotVariant v);
std::optional<RobotVariant> parse_robot_variant(std::string_view name);

inline int num_channels(RobotVariant v) { return v == RobotVariant::Pushing ? 1 : 2; }
inline bool has_blower(RobotVariant v) { return v != RobotVariant::Pushing; }
inline BlowerMount blower_mount(RobotVariant v) {
  return v == RobotVariant::SideBlower ? BlowerMount::Right : BlowerMount::Front;
}

/// Global argmax over all entries; ties go to the lowest flat index. NaN is a
/// hard fault.
Action decode(const ActionMap& qmap);

struct PrimitiveContext {
  int crop_size = 96;
  double robot_radius = 0.04;
};

/// Turns a decoded pixel into an executable primitive. The target is mapped
/// from the crop through the pose and clamped into the environment; moves are
/// planned on the agent's occupancy map inflated by the robot radius. A move
/// with no known route becomes a turn towards the target.
Primitive to_primitive(const Action& action, const Pose& pose, const GlobalMaps& maps, RobotVariant variant,
                       const PrimitiveContext& ctx);

/// World point of an action's crop cell, clamped into the environment bounds.
Vec2 action_target(const Action& action, const Pose& pose, const GridGeometry& geom, int crop_size);

}  // namespace blowbot
