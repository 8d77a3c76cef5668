#include <gtest/gtest.h>

#include <cmath>
#include <deque>

#include "blowbot/episode.hpp"
#include "blowbot/grid.hpp"
#include "blowbot/world.hpp"

using namespace blowbot;

namespace {

// A world with a single resting object and the robot placed by hand.
WorldState scripted(EnvKind kind, const Pose& robot, const Vec2& object, PhysicsParams params = {}) {
  EnvSpec env = build_env(kind);
  env.initial_object_count = 1;
  WorldState w = reset(env, 1, params);
  w.robot = robot;
  w.objects[0].position = object;
  w.objects[0].velocity.setZero();
  return w;
}

double angle_between(const Vec2& a, const Vec2& b) {
  return std::abs(std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b)));
}

}  // namespace

TEST(Env, Geometry) {
  const EnvSpec small = build_env(EnvKind::SmallEmpty);
  EXPECT_DOUBLE_EQ(small.width, 1.0);
  EXPECT_DOUBLE_EQ(small.height, 0.5);
  EXPECT_EQ(small.initial_object_count, 50);
  EXPECT_TRUE(small.walls.empty());
  EXPECT_NEAR((small.receptacle.hi - small.receptacle.lo).x(), 0.15, 1e-12);

  const EnvSpec centre = build_env(EnvKind::LargeCenter);
  EXPECT_TRUE(centre.receptacle.center().isApprox(Vec2(0.5, 0.5)));
  EXPECT_EQ(centre.initial_object_count, 100);
}

TEST(Env, DoorKeepsFreeSpaceConnected) {
  const EnvSpec env = build_env(EnvKind::LargeDoor);
  const GridGeometry g = GridGeometry::for_env(env);
  const Grid<CellContent> raster = rasterize_static(env, g);
  // BFS over non-wall cells from the bottom-left cell.
  Grid<bool> seen = Grid<bool>::Constant(g.rows, g.cols, false);
  std::deque<Cell> open{{0, 0}};
  seen(0, 0) = true;
  while (!open.empty()) {
    const Cell c = open.front();
    open.pop_front();
    for (const Cell d : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
      const Cell n{c.row + d.row, c.col + d.col};
      if (!g.in_bounds(n) || seen(n.row, n.col) || raster(n.row, n.col) == CellContent::Wall) continue;
      seen(n.row, n.col) = true;
      open.push_back(n);
    }
  }
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      if (raster(r, c) != CellContent::Wall) EXPECT_TRUE(seen(r, c)) << r << "," << c;
    }
  }
  EXPECT_GT((raster == CellContent::Wall).count(), 0);
}

TEST(Reset, DeterministicAndPopulated) {
  const EnvSpec env = build_env(EnvKind::SmallEmpty);
  const WorldState a = reset(env, 7);
  const WorldState b = reset(env, 7);
  EXPECT_TRUE(a == b);
  EXPECT_EQ(a.active_count(), 50);
  EXPECT_EQ(a.removed_count, 0);
  EXPECT_FALSE(reset(env, 8) == a);
}

TEST(Reset, NothingStartsInReceptacleOrWalls) {
  for (EnvKind kind : {EnvKind::LargeEmpty, EnvKind::LargeDoor, EnvKind::LargeCenter}) {
    const WorldState w = reset(build_env(kind), 3);
    EXPECT_FALSE(disc_hits_wall(w.env, w.robot.position(), w.params.robot_radius));
    for (const RigidObject& o : w.objects) {
      EXPECT_FALSE(w.env.receptacle.contains(o.position));
      EXPECT_GE(wall_clearance(w.env, o.position), o.radius);
    }
  }
}

TEST(Reset, CrowdedEnvironmentIsAConfigError) {
  EnvSpec env = build_env(EnvKind::SmallEmpty);
  env.initial_object_count = 10000;
  PhysicsParams p;
  p.placement_attempts = 200;
  EXPECT_THROW(reset(env, 1, p), ConfigError);
}

TEST(EmitBlow, ZeroForceIsNoOp) {
  WorldState w = reset(build_env(EnvKind::SmallEmpty), 2);
  const WorldState before = w;
  emit_blow(w, 0.0);
  EXPECT_TRUE(w == before);
}

TEST(EmitBlow, ParticleSpeedAndCone) {
  WorldState w = reset(build_env(EnvKind::SmallEmpty), 2);
  emit_blow(w, 0.35);
  ASSERT_EQ(static_cast<int>(w.particles.size()), w.params.particles_per_substep);
  for (const Particle& p : w.particles) {
    EXPECT_NEAR(p.velocity.norm(), 0.35 * w.params.v_ref, 1e-12);
    EXPECT_LE(angle_between(p.velocity, w.robot.heading()), w.params.cone_half_angle + 1e-12);
  }
}

TEST(EmitBlow, SideMountPointsRight) {
  PhysicsParams p;
  p.mount = BlowerMount::Right;
  WorldState w = scripted(EnvKind::LargeEmpty, Pose{0.5, 0.5, 0.0}, Vec2(0.1, 0.1), p);
  EXPECT_TRUE(w.nozzle_direction().isApprox(Vec2(0.0, -1.0)));
}

TEST(StepPhysics, RestingWorldOnlyAdvancesTime) {
  WorldState w = reset(build_env(EnvKind::LargeDoor), 4);
  const WorldState before = w;
  const StepEvents ev = step_physics(w, w.params.dt);
  EXPECT_EQ(ev.objects_entered_receptacle, 0);
  for (double d : ev.distance_deltas) EXPECT_EQ(d, 0.0);
  for (std::size_t i = 0; i < w.objects.size(); ++i) EXPECT_EQ(w.objects[i].position, before.objects[i].position);
  EXPECT_EQ(w.robot, before.robot);
  EXPECT_DOUBLE_EQ(w.sim_time, before.sim_time + w.params.dt);
}

TEST(StepPhysics, ImpulseParallelToParticle) {
  WorldState w = scripted(EnvKind::LargeEmpty, Pose{0.1, 0.1, 0.0}, Vec2(0.5, 0.5));
  Particle p;
  p.position = Vec2(0.49, 0.497);
  p.velocity = Vec2(0.6, 0.13);
  p.remaining_life = 0.5;
  w.particles.push_back(p);
  step_physics(w, w.params.dt);
  EXPECT_TRUE(w.particles.empty());
  const Vec2 v = w.objects[0].velocity;
  ASSERT_GT(v.norm(), 0.0);
  EXPECT_LT(angle_between(v, p.velocity), 1e-6);
}

TEST(StepPhysics, ObjectEntersReceptacleOnPredictedSubstep) {
  PhysicsParams prm;
  WorldState w = scripted(EnvKind::SmallEmpty, Pose{0.1, 0.1, 0.0}, Vec2(0.8, 0.42), prm);
  w.objects[0].velocity = Vec2(0.5, 0.0);

  // Hand integration of the same drag law.
  double x = 0.8, v = 0.5;
  int predicted = -1;
  for (int i = 1; i <= 1000 && predicted < 0; ++i) {
    x += v * prm.dt;
    v *= std::exp(-prm.drag * prm.dt);
    if (v < prm.velocity_floor) v = 0.0;
    if (x >= w.env.receptacle.lo.x()) predicted = i;
  }
  ASSERT_GT(predicted, 0);

  int entered_at = -1;
  for (int i = 1; i <= 1000 && entered_at < 0; ++i) {
    const StepEvents ev = step_physics(w, prm.dt);
    if (ev.objects_entered_receptacle == 1) entered_at = i;
  }
  EXPECT_EQ(entered_at, predicted);
  EXPECT_TRUE(w.objects[0].removed);
  EXPECT_EQ(w.active_count(), 0);
  EXPECT_EQ(w.object_distance(w.objects[0]), 0.0);
}

TEST(StepPhysics, DragStopsObjectWithinTwentyCentimetres) {
  WorldState w = scripted(EnvKind::LargeEmpty, Pose{0.9, 0.9, 0.0}, Vec2(0.2, 0.3));
  w.objects[0].velocity = Vec2(0.3, 0.0);
  for (int i = 0; i < 2000 && !w.objects[0].velocity.isZero(0.0); ++i) step_physics(w, w.params.dt);
  EXPECT_TRUE(w.objects[0].velocity.isZero(0.0));
  EXPECT_LT(w.objects[0].position.x() - 0.2, 0.21);
}

TEST(ExecutePrimitive, TurnTowardsPointAheadIsFree) {
  WorldState w = scripted(EnvKind::LargeEmpty, Pose{0.5, 0.5, 0.3}, Vec2(0.1, 0.1));
  const Vec2 ahead = w.robot.position() + 0.2 * w.robot.heading();
  const StepEvents ev = execute_primitive(w, TurnInPlace{ahead, false});
  EXPECT_EQ(ev.substeps, 0);
  EXPECT_EQ(ev.objects_entered_receptacle, 0);
  EXPECT_FALSE(ev.robot_collision);
  EXPECT_NEAR(w.robot.theta, 0.3, 1e-12);
}

TEST(ExecutePrimitive, TurnEndsFacingTarget) {
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    WorldState w = scripted(EnvKind::LargeEmpty, Pose{0.5, 0.5, -kPi + 2 * kPi * uniform01(rng)}, Vec2(0.1, 0.1));
    const Vec2 target(uniform01(rng), uniform01(rng));
    execute_primitive(w, TurnInPlace{target, false});
    const Vec2 want = (target - w.robot.position()).normalized();
    EXPECT_LT(angle_between(w.robot.heading(), want), kPi / 180.0);
  }
}

TEST(ExecutePrimitive, EmptyMoveIsNoOp) {
  WorldState w = reset(build_env(EnvKind::SmallEmpty), 9);
  const WorldState before = w;
  const StepEvents ev = execute_primitive(w, MoveTo{{}, true});
  EXPECT_EQ(ev.substeps, 0);
  EXPECT_TRUE(w == before);
}

TEST(ExecutePrimitive, MoveIntoWallStopsAtContact) {
  WorldState w = scripted(EnvKind::LargeEmpty, Pose{0.5, 0.5, 0.0}, Vec2(0.1, 0.1));
  const StepEvents ev = execute_primitive(w, MoveTo{{Vec2(1.2, 0.5)}, false});
  EXPECT_TRUE(ev.robot_collision);
  EXPECT_NEAR(w.robot.x, 1.0 - w.params.robot_radius, 1e-6);
  EXPECT_GE(wall_clearance(w.env, w.robot.position()), w.params.robot_radius - 1e-9);
}

TEST(ExecutePrimitive, BlowingTurnDisplacesFlankingObject) {
  WorldState w = scripted(EnvKind::LargeEmpty, Pose{0.4, 0.4, 0.0}, Vec2(0.4, 0.52));
  const Vec2 start = w.objects[0].position;
  execute_primitive(w, TurnInPlace{Vec2(0.4, 0.9), true});
  EXPECT_GT((w.objects[0].position - start).norm(), 0.0);
}

TEST(ExecutePrimitive, StrongerBlowMovesFurther) {
  auto displacement = [](double force) {
    double total = 0.0;
    for (int seed = 0; seed < 10; ++seed) {
      PhysicsParams p;
      p.blow_force = force;
      EnvSpec env = build_env(EnvKind::LargeEmpty);
      env.initial_object_count = 1;
      WorldState w = reset(env, static_cast<std::uint64_t>(seed), p);
      w.robot = Pose{0.2, 0.3, 0.0};
      w.objects[0].position = Vec2(0.35, 0.3);
      execute_primitive(w, TurnInPlace{Vec2(0.9, 0.3), true});
      total += (w.objects[0].position - Vec2(0.35, 0.3)).norm();
    }
    return total / 10.0;
  };
  const double weak = displacement(0.2);
  const double mid = displacement(0.35);
  const double strong = displacement(0.65);
  EXPECT_GT(strong, weak);
  // One blow at the default force moves a nearby object a few centimetres.
  EXPECT_GT(mid, 0.05);
  EXPECT_LT(mid, 0.15);
}

TEST(ExecutePrimitive, ZeroForceBlowingNeverMovesObjects) {
  PhysicsParams p;
  p.blow_force = 0.0;
  WorldState w = scripted(EnvKind::LargeEmpty, Pose{0.4, 0.4, 0.0}, Vec2(0.5, 0.4), p);
  for (int i = 0; i < 8; ++i) {
    execute_primitive(w, TurnInPlace{w.robot.position() + Vec2(std::cos(i), std::sin(i)), true});
    EXPECT_EQ(w.objects[0].position, Vec2(0.5, 0.4));
  }
}

TEST(Reward, Examples) {
  const RewardConfig cfg;
  EXPECT_DOUBLE_EQ(compute_reward(StepEvents{1, {0.0}, false, 1}, cfg), 1.0);
  EXPECT_DOUBLE_EQ(compute_reward(StepEvents{}, cfg), 0.0);
  EXPECT_NEAR(compute_reward(StepEvents{0, {-0.05}, true, 1}, cfg), -0.20, 1e-15);
  RewardConfig pushing;
  pushing.collision_penalty_enabled = false;
  EXPECT_NEAR(compute_reward(StepEvents{0, {-0.05}, true, 1}, pushing), 0.05, 1e-15);
}

TEST(Reward, DistanceMatchesStaticField) {
  WorldState w = scripted(EnvKind::SmallEmpty, Pose{0.1, 0.1, 0.0}, Vec2(0.31, 0.25));
  const GridGeometry g = GridGeometry::for_env(w.env);
  // Cell-centre lookup equals the field value; receptacle cells are sources.
  const Vec2 centre = g.center_of(g.cell_of(Vec2(0.31, 0.25)));
  w.objects[0].position = centre;
  EXPECT_DOUBLE_EQ(w.object_distance(w.objects[0]), w.receptacle_distance->at(g.cell_of(centre)));
  w.objects[0].position = w.env.receptacle.center();
  EXPECT_DOUBLE_EQ(w.object_distance(w.objects[0]), 0.0);
}
