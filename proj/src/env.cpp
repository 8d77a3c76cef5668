#include "blowbot/env.hpp"

#include <algorithm>

namespace blowbot {

std::string to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::SmallEmpty: return "SmallEmpty";
    case EnvKind::LargeEmpty: return "LargeEmpty";
    case EnvKind::LargeDoor: return "LargeDoor";
    case EnvKind::LargeCenter: return "LargeCenter";
  }
  return "unknown";
}

std::optional<EnvKind> parse_env_kind(std::string_view name) {
  for (EnvKind k : {EnvKind::SmallEmpty, EnvKind::LargeEmpty, EnvKind::LargeDoor, EnvKind::LargeCenter}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

EnvSpec build_env(EnvKind kind) {
  using namespace geometry;
  EnvSpec env;
  env.kind = kind;
  if (kind == EnvKind::SmallEmpty) {
    env.width = kSmallWidth;
    env.height = kSmallHeight;
    env.initial_object_count = 50;
  } else {
    env.width = kLargeSide;
    env.height = kLargeSide;
    env.initial_object_count = 100;
  }

  const Vec2 corner(env.width, env.height);
  env.receptacle = Box{corner - Vec2::Constant(kReceptacleSide), corner};

  if (kind == EnvKind::LargeCenter) {
    const Vec2 c = 0.5 * corner;
    env.receptacle = Box{c - Vec2::Constant(0.5 * kReceptacleSide), c + Vec2::Constant(0.5 * kReceptacleSide)};
  }

  if (kind == EnvKind::LargeDoor) {
    // Horizontal divider at mid-height with a centred door gap.
    const double y0 = 0.5 * env.height - 0.5 * kDividerThickness;
    const double y1 = 0.5 * env.height + 0.5 * kDividerThickness;
    const double gap_lo = 0.5 * env.width - 0.5 * kDoorGap;
    const double gap_hi = 0.5 * env.width + 0.5 * kDoorGap;
    env.walls.push_back(Box{{0.0, y0}, {gap_lo, y1}});
    env.walls.push_back(Box{{gap_hi, y0}, {env.width, y1}});
  }
  return env;
}

double wall_clearance(const EnvSpec& env, const Vec2& p) {
  double clearance = std::min({p.x(), env.width - p.x(), p.y(), env.height - p.y()});
  for (const Box& w : env.walls) {
    const Vec2 q = w.closest_point(p);
    const double d = (p - q).norm();
    if (d > 0.0) {
      clearance = std::min(clearance, d);
    } else {
      const double inside = std::min({p.x() - w.lo.x(), w.hi.x() - p.x(), p.y() - w.lo.y(), w.hi.y() - p.y()});
      clearance = std::min(clearance, -inside);
    }
  }
  return clearance;
}

bool disc_hits_wall(const EnvSpec& env, const Vec2& center, double radius) {
  return wall_clearance(env, center) < radius;
}

}  // namespace blowbot
