#include "blowbot/action_space.hpp"

#include <algorithm>

#include "blowbot/distance_field.hpp"

namespace blowbot {
namespace {

bool line_clear(const Grid<Occupancy>& occ, const GridGeometry& geom, const Vec2& a, const Vec2& b) {
  const double len = (b - a).norm();
  const int samples = std::max(1, static_cast<int>(std::ceil(4.0 * len / geom.resolution)));
  for (int i = 0; i <= samples; ++i) {
    const Cell c = geom.cell_of(a + (b - a) * (static_cast<double>(i) / samples));
    if (!geom.in_bounds(c) || occ(c.row, c.col) != Occupancy::Free) return false;
  }
  return true;
}

// Drops intermediate cells that are in direct line of sight on `occ`.
std::vector<Vec2> shortcut(const Path& path, const Grid<Occupancy>& occ, const GridGeometry& geom) {
  std::vector<Vec2> waypoints;
  std::size_t anchor = 0;
  while (anchor + 1 < path.size()) {
    std::size_t next = anchor + 1;
    for (std::size_t j = path.size() - 1; j > anchor + 1; --j) {
      if (line_clear(occ, geom, geom.center_of(path[anchor]), geom.center_of(path[j]))) {
        next = j;
        break;
      }
    }
    waypoints.push_back(geom.center_of(path[next]));
    anchor = next;
  }
  return waypoints;
}

}  // namespace

std::string to_string(RobotVariant v) {
  switch (v) {
    case RobotVariant::BlowingTurn: return "blowing_turn";
    case RobotVariant::BlowingMove: return "blowing_move";
    case RobotVariant::SideBlower: return "side_blower";
    case RobotVariant::Pushing: return "pushing";
  }
  return "unknown";
}

std::optional<RobotVariant> parse_robot_variant(std::string_view name) {
  for (RobotVariant v : {RobotVariant::BlowingTurn, RobotVariant::BlowingMove, RobotVariant::SideBlower,
                         RobotVariant::Pushing}) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

Action Action::from_flat(int index, int height, int width) {
  Action a;
  const int plane = height * width;
  a.channel = index / plane;
  a.row = (index % plane) / width;
  a.col = index % width;
  return a;
}

Action decode(const ActionMap& qmap) {
  const int plane = qmap.height * qmap.width;
  int best_channel = 0;
  int best_pos = 0;
  float best = -std::numeric_limits<float>::infinity();
  bool first = true;
  for (int ch = 0; ch < qmap.channels(); ++ch) {
    for (int pos = 0; pos < plane; ++pos) {
      const float v = qmap.values(ch, pos);
      if (std::isnan(v)) fault("decode: NaN in Q-value map");
      if (first || v > best) {
        best = v;
        best_channel = ch;
        best_pos = pos;
        first = false;
      }
    }
  }
  return Action::from_flat(best_channel * plane + best_pos, qmap.height, qmap.width);
}

Vec2 action_target(const Action& action, const Pose& pose, const GridGeometry& geom, int crop_size) {
  const Vec2 p = crop_cell_to_world(action.row, action.col, pose, crop_size, geom.resolution);
  const double eps = 1e-6;
  return {std::clamp(p.x(), eps, geom.cols * geom.resolution - eps),
          std::clamp(p.y(), eps, geom.rows * geom.resolution - eps)};
}

Primitive to_primitive(const Action& action, const Pose& pose, const GlobalMaps& maps, RobotVariant variant,
                       const PrimitiveContext& ctx) {
  const GridGeometry& geom = maps.geom;
  const Vec2 target = action_target(action, pose, geom, ctx.crop_size);

  const bool blowing_channel = action.channel == 1 && has_blower(variant);
  if (blowing_channel && variant != RobotVariant::BlowingMove) return TurnInPlace{target, true};

  const int inflation = static_cast<int>(std::ceil(ctx.robot_radius / geom.resolution));
  const Grid<Occupancy> occ = inflate(maps.occupancy, inflation);
  Grid<Occupancy> planning = occ;
  const Cell start = geom.cell_of(pose.position());
  const Cell goal = geom.cell_of(target);
  if (!geom.in_bounds(start)) return MoveTo{{}, blowing_channel};
  planning(start.row, start.col) = Occupancy::Free;
  const Path path = plan_path(planning, start, goal, geom.resolution);
  std::vector<Vec2> waypoints = shortcut(path, planning, geom);
  // Nowhere to go on the known map: at least face the selected location.
  if (waypoints.empty() && goal != start) return TurnInPlace{target, blowing_channel};
  return MoveTo{std::move(waypoints), blowing_channel};
}

}  // namespace blowbot
