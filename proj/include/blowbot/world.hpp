#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "blowbot/common.hpp"
#include "blowbot/distance_field.hpp"
#include "blowbot/env.hpp"

namespace blowbot {

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // [-pi, pi)

  Vec2 position() const { return {x, y}; }
  Vec2 heading() const { return {std::cos(theta), std::sin(theta)}; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

struct RigidObject {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  double radius = 0.005;
  double mass = 0.001;
  bool removed = false;
};

struct Particle {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  double remaining_life = 0.0;
  double travelled = 0.0;
};

enum class BlowerMount { Front, Right };

/// Every tunable constant of the 2D world.
struct PhysicsParams {
  double dt = 1.0 / 120.0;

  double robot_radius = 0.04;
  double linear_speed = 0.2;     // m/s
  double angular_speed = kPi;    // rad/s

  // Blower.
  double blow_force = 0.35;
  BlowerMount mount = BlowerMount::Front;
  double cone_half_angle = 15.0 * kPi / 180.0;
  int particles_per_substep = 5;
  double v_ref = 2.0;            // particle speed at unit force, m/s
  double particle_mass = 0.0002; // kg
  double particle_radius = 0.0025;
  double particle_life = 0.5;    // s
  double particle_range = 0.6;   // m
  double particle_restitution = 0.6;
  double impulse_gain = 0.04;    // k_f
  double min_blow_time = 0.25;   // s; blower-on primitives last at least this long

  // Objects.
  double object_radius = 0.005;
  double object_mass = 0.001;
  double drag = 1.5;             // 1/s, linear
  double velocity_floor = 0.01;  // m/s
  double object_restitution = 0.5;
  double max_object_speed = 2.0;

  // Settling after each primitive.
  double max_settle_time = 3.0;

  int placement_attempts = 10000;
};

struct WorldState {
  EnvSpec env;
  PhysicsParams params;
  Pose robot;
  Vec2 robot_velocity = Vec2::Zero();
  std::vector<RigidObject> objects;
  std::vector<Particle> particles;
  Rng rng;
  double sim_time = 0.0;
  std::int64_t substeps = 0;
  int removed_count = 0;
  /// Static free-space distance to the receptacle, shared across copies.
  std::shared_ptr<const DistanceField> receptacle_distance;

  int active_count() const { return static_cast<int>(objects.size()) - removed_count; }
  /// Shortest-path distance of an object to the receptacle (0 once removed).
  double object_distance(const RigidObject& o) const;
  Vec2 nozzle_direction() const;
};

bool operator==(const WorldState& a, const WorldState& b);

struct StepEvents {
  int objects_entered_receptacle = 0;
  std::vector<double> distance_deltas;  // per object index, meters (after - before)
  bool robot_collision = false;
  std::int64_t substeps = 0;
};

struct TurnInPlace {
  Vec2 target = Vec2::Zero();
  bool blower_on = false;
};

struct MoveTo {
  std::vector<Vec2> path;  // waypoints, excluding the start position
  bool blower_on = false;
};

using Primitive = std::variant<TurnInPlace, MoveTo>;

inline bool blows(const Primitive& p) {
  return std::visit([](const auto& q) { return q.blower_on; }, p);
}

struct RewardConfig {
  double success_reward = 1.0;
  double partial_coefficient = 1.0;  // per meter of distance reduction
  double collision_penalty = 0.25;
  bool collision_penalty_enabled = true;
};

/// The robot is placed at a uniform collision-free pose, then the objects
/// uniformly in free space outside the receptacle and clear of the robot.
/// Throws ConfigError when placement fails within params.placement_attempts
/// samples.
WorldState reset(const EnvSpec& spec, std::uint64_t seed, const PhysicsParams& params = {});

/// Spawns one substep's worth of blower particles. force == 0 is a no-op.
void emit_blow(WorldState& state, double force);

/// Advances the world by one substep.
StepEvents step_physics(WorldState& state, double dt);

StepEvents execute_primitive(WorldState& state, const Primitive& primitive);

double compute_reward(const StepEvents& events, const RewardConfig& cfg);

}  // namespace blowbot
