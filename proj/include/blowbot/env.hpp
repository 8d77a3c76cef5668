#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blowbot/common.hpp"

namespace blowbot {

enum class EnvKind { SmallEmpty, LargeEmpty, LargeDoor, LargeCenter };

std::string to_string(EnvKind kind);
std::optional<EnvKind> parse_env_kind(std::string_view name);

/// Axis-aligned box [lo, hi].
struct Box {
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Zero();

  bool contains(const Vec2& p) const {
    return p.x() >= lo.x() && p.x() < hi.x() && p.y() >= lo.y() && p.y() < hi.y();
  }
  Vec2 center() const { return 0.5 * (lo + hi); }
  Vec2 closest_point(const Vec2& p) const { return p.cwiseMax(lo).cwiseMin(hi); }
};

/// Static environment geometry. The outer boundary is implicit ([0, width] x
/// [0, height]); interior obstacles are thick axis-aligned wall segments.
struct EnvSpec {
  EnvKind kind = EnvKind::SmallEmpty;
  double width = 1.0;
  double height = 0.5;
  std::vector<Box> walls;
  Box receptacle;
  int initial_object_count = 50;

  Vec2 extents() const { return {width, height}; }
  double diagonal() const { return std::hypot(width, height); }
};

namespace geometry {
inline constexpr double kSmallWidth = 1.0;
inline constexpr double kSmallHeight = 0.5;
inline constexpr double kLargeSide = 1.0;
inline constexpr double kReceptacleSide = 0.15;
inline constexpr double kDoorGap = 0.25;
inline constexpr double kDividerThickness = 0.04;
}  // namespace geometry

EnvSpec build_env(EnvKind kind);

/// Distance from p to the nearest wall surface (boundary or obstacle); negative
/// when p lies inside an obstacle.
double wall_clearance(const EnvSpec& env, const Vec2& p);

/// True when a disc of the given radius overlaps any wall or leaves the bounds.
bool disc_hits_wall(const EnvSpec& env, const Vec2& center, double radius);

}  // namespace blowbot
