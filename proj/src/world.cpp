#include "blowbot/world.hpp"

#include <algorithm>

#include "blowbot/grid.hpp"

namespace blowbot {
namespace {

constexpr double kAngleTolerance = 1e-12;
constexpr int kMaxPrimitiveSubsteps = 1'000'000;

std::shared_ptr<const DistanceField> static_receptacle_field(const EnvSpec& env) {
  const GridGeometry geom = GridGeometry::for_env(env);
  const Grid<Occupancy> occ = occupancy_from_overhead(rasterize_static(env, geom));
  const std::vector<Cell> sources = receptacle_cells(env, geom);
  return std::make_shared<const DistanceField>(distance_field(occ, sources, UnknownAs::Free, geom.resolution));
}

Vec2 uniform_point(Rng& rng, const EnvSpec& env, double margin) {
  const double x = margin + uniform01(rng) * (env.width - 2.0 * margin);
  const double y = margin + uniform01(rng) * (env.height - 2.0 * margin);
  return {x, y};
}

bool finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

// Earliest parameter t in [0, 1] at which segment a->b comes within `reach` of c.
std::optional<double> segment_hit(const Vec2& a, const Vec2& b, const Vec2& c, double reach) {
  const Vec2 d = b - a;
  const Vec2 f = a - c;
  const double cc = f.squaredNorm() - reach * reach;
  if (cc <= 0.0) return 0.0;
  const double aa = d.squaredNorm();
  if (aa == 0.0) return std::nullopt;
  const double bb = 2.0 * f.dot(d);
  const double disc = bb * bb - 4.0 * aa * cc;
  if (disc < 0.0) return std::nullopt;
  const double t = (-bb - std::sqrt(disc)) / (2.0 * aa);
  if (t < 0.0 || t > 1.0) return std::nullopt;
  return t;
}

void reflect_particle(Particle& p, const Vec2& previous, const EnvSpec& env, double restitution) {
  Vec2& x = p.position;
  Vec2& v = p.velocity;
  if (x.x() < 0.0) { x.x() = -x.x(); v.x() = -restitution * v.x(); }
  if (x.x() > env.width) { x.x() = 2.0 * env.width - x.x(); v.x() = -restitution * v.x(); }
  if (x.y() < 0.0) { x.y() = -x.y(); v.y() = -restitution * v.y(); }
  if (x.y() > env.height) { x.y() = 2.0 * env.height - x.y(); v.y() = -restitution * v.y(); }
  for (const Box& w : env.walls) {
    if (!(x.x() > w.lo.x() && x.x() < w.hi.x() && x.y() > w.lo.y() && x.y() < w.hi.y())) continue;
    if (previous.x() <= w.lo.x()) { x.x() = 2.0 * w.lo.x() - x.x(); v.x() = -restitution * v.x(); }
    else if (previous.x() >= w.hi.x()) { x.x() = 2.0 * w.hi.x() - x.x(); v.x() = -restitution * v.x(); }
    else if (previous.y() <= w.lo.y()) { x.y() = 2.0 * w.lo.y() - x.y(); v.y() = -restitution * v.y(); }
    else { x.y() = 2.0 * w.hi.y() - x.y(); v.y() = -restitution * v.y(); }
  }
}

void resolve_object_walls(RigidObject& o, const EnvSpec& env, double restitution) {
  const double r = o.radius;
  auto bounce = [&](const Vec2& n) {
    const double vn = o.velocity.dot(n);
    if (vn < 0.0) o.velocity -= (1.0 + restitution) * vn * n;
  };
  auto clamp_bounds = [&] {
    if (o.position.x() < r) { o.position.x() = r; bounce({1.0, 0.0}); }
    if (o.position.x() > env.width - r) { o.position.x() = env.width - r; bounce({-1.0, 0.0}); }
    if (o.position.y() < r) { o.position.y() = r; bounce({0.0, 1.0}); }
    if (o.position.y() > env.height - r) { o.position.y() = env.height - r; bounce({0.0, -1.0}); }
  };
  clamp_bounds();
  for (const Box& w : env.walls) {
    const Vec2 q = w.closest_point(o.position);
    const Vec2 diff = o.position - q;
    const double d = diff.norm();
    if (d >= r) continue;
    Vec2 n;
    if (d > 0.0) {
      n = diff / d;
      o.position = q + n * r;
    } else {
      const double left = o.position.x() - w.lo.x();
      const double right = w.hi.x() - o.position.x();
      const double down = o.position.y() - w.lo.y();
      const double up = w.hi.y() - o.position.y();
      const double m = std::min({left, right, down, up});
      if (m == left) { n = {-1.0, 0.0}; o.position.x() = w.lo.x() - r; }
      else if (m == right) { n = {1.0, 0.0}; o.position.x() = w.hi.x() + r; }
      else if (m == down) { n = {0.0, -1.0}; o.position.y() = w.lo.y() - r; }
      else { n = {0.0, 1.0}; o.position.y() = w.hi.y() + r; }
    }
    bounce(n);
  }
  clamp_bounds();
}

// One physics substep. Returns the number of objects that entered the receptacle.
int advance(WorldState& s, double dt) {
  const PhysicsParams& prm = s.params;
  const EnvSpec& env = s.env;

  // Particles: swept contact against objects, then wall reflection.
  std::vector<Particle> survivors;
  survivors.reserve(s.particles.size());
  std::vector<char> struck(s.objects.size(), 0);
  for (Particle p : s.particles) {
    const Vec2 a = p.position;
    const Vec2 b = a + p.velocity * dt;
    int hit = -1;
    double best_t = 2.0;
    for (std::size_t i = 0; i < s.objects.size(); ++i) {
      const RigidObject& o = s.objects[i];
      if (o.removed) continue;
      if (auto t = segment_hit(a, b, o.position, o.radius + prm.particle_radius); t && *t < best_t) {
        best_t = *t;
        hit = static_cast<int>(i);
      }
    }
    if (hit >= 0) {
      RigidObject& o = s.objects[static_cast<std::size_t>(hit)];
      const double speed = p.velocity.norm();
      if (speed > 0.0) {
        const double impulse = prm.particle_mass * speed * prm.impulse_gain;
        o.velocity += (impulse / o.mass) * (p.velocity / speed);
        struck[static_cast<std::size_t>(hit)] = 1;
      }
      continue;
    }
    p.position = b;
    reflect_particle(p, a, env, prm.particle_restitution);
    p.travelled += p.velocity.norm() * dt;
    p.remaining_life -= dt;
    if (p.remaining_life > 0.0 && p.travelled < prm.particle_range) survivors.push_back(p);
  }
  s.particles = std::move(survivors);

  // Object integration with linear drag.
  const double decay = std::exp(-prm.drag * dt);
  // The velocity floor only stops coasting objects, so every particle hit counts.
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    RigidObject& o = s.objects[i];
    if (o.removed) continue;
    const double speed = o.velocity.norm();
    if (speed > prm.max_object_speed) o.velocity *= prm.max_object_speed / speed;
    o.position += o.velocity * dt;
    o.velocity *= decay;
    if (!struck[i] && o.velocity.norm() < prm.velocity_floor) o.velocity.setZero();
  }

  // Kinematic robot body pushes objects out of its footprint.
  const Vec2 rp = s.robot.position();
  for (RigidObject& o : s.objects) {
    if (o.removed) continue;
    const Vec2 diff = o.position - rp;
    const double reach = prm.robot_radius + o.radius;
    const double d = diff.norm();
    if (d >= reach) continue;
    const Vec2 n = d > 0.0 ? Vec2(diff / d) : s.robot.heading();
    o.position = rp + n * reach;
    const double vn = o.velocity.dot(n);
    const double rv = s.robot_velocity.dot(n);
    if (vn < rv) o.velocity += (rv - vn) * n;
  }

  // Object-object contacts.
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    RigidObject& a = s.objects[i];
    if (a.removed) continue;
    for (std::size_t j = i + 1; j < s.objects.size(); ++j) {
      RigidObject& b = s.objects[j];
      if (b.removed) continue;
      const Vec2 diff = b.position - a.position;
      const double reach = a.radius + b.radius;
      const double d2 = diff.squaredNorm();
      if (d2 >= reach * reach) continue;
      const double d = std::sqrt(d2);
      const Vec2 n = d > 0.0 ? Vec2(diff / d) : Vec2(1.0, 0.0);
      const double overlap = reach - d;
      const double inv_a = 1.0 / a.mass;
      const double inv_b = 1.0 / b.mass;
      const double share_a = inv_a / (inv_a + inv_b);
      a.position -= n * overlap * share_a;
      b.position += n * overlap * (1.0 - share_a);
      const double closing = (b.velocity - a.velocity).dot(n);
      if (closing < 0.0) {
        const double j_impulse = -(1.0 + prm.object_restitution) * closing / (inv_a + inv_b);
        a.velocity -= j_impulse * inv_a * n;
        b.velocity += j_impulse * inv_b * n;
      }
    }
  }

  int entered = 0;
  for (RigidObject& o : s.objects) {
    if (o.removed) continue;
    resolve_object_walls(o, env, prm.object_restitution);
    if (env.receptacle.contains(o.position)) {
      o.removed = true;
      o.velocity.setZero();
      ++entered;
      ++s.removed_count;
    }
    if (!finite(o.position) || !finite(o.velocity)) fault("physics: non-finite object state");
  }
  if (!std::isfinite(s.robot.x) || !std::isfinite(s.robot.y) || !std::isfinite(s.robot.theta))
    fault("physics: non-finite robot pose");

  s.sim_time += dt;
  ++s.substeps;
  return entered;
}

std::vector<double> object_distances(const WorldState& s) {
  std::vector<double> d(s.objects.size());
  for (std::size_t i = 0; i < s.objects.size(); ++i) d[i] = s.object_distance(s.objects[i]);
  return d;
}

bool settled(const WorldState& s) {
  if (!s.particles.empty()) return false;
  return std::all_of(s.objects.begin(), s.objects.end(),
                     [](const RigidObject& o) { return o.removed || o.velocity.isZero(0.0); });
}

class PrimitiveRunner {
 public:
  PrimitiveRunner(WorldState& s, bool blower_on) : s_(s), blower_on_(blower_on) {}

  void substep() {
    if (blower_on_) emit_blow(s_, s_.params.blow_force);
    entered_ += advance(s_, s_.params.dt);
    elapsed_ += s_.params.dt;
    if (++count_ > kMaxPrimitiveSubsteps) fault("primitive did not terminate");
  }

  void turn_to(double bearing) {
    s_.robot_velocity.setZero();
    for (;;) {
      const double delta = wrap_angle(bearing - s_.robot.theta);
      if (std::abs(delta) <= kAngleTolerance) break;
      const double limit = s_.params.angular_speed * s_.params.dt;
      s_.robot.theta = std::abs(delta) <= limit ? bearing : wrap_angle(s_.robot.theta + std::copysign(limit, delta));
      s_.robot.theta = wrap_angle(s_.robot.theta);
      substep();
    }
  }

  // Returns false when the robot made contact with a wall.
  bool drive_to(const Vec2& goal) {
    const PhysicsParams& prm = s_.params;
    for (;;) {
      const Vec2 pos = s_.robot.position();
      const Vec2 diff = goal - pos;
      const double dist = diff.norm();
      if (dist <= 1e-12) break;
      const Vec2 dir = diff / dist;
      const double step = std::min(prm.linear_speed * prm.dt, dist);
      Vec2 next = dist <= prm.linear_speed * prm.dt ? goal : Vec2(pos + dir * step);
      bool contact = false;
      if (disc_hits_wall(s_.env, next, prm.robot_radius)) {
        double lo = 0.0;
        double hi = 1.0;
        for (int i = 0; i < 40; ++i) {
          const double mid = 0.5 * (lo + hi);
          if (disc_hits_wall(s_.env, pos + (next - pos) * mid, prm.robot_radius)) hi = mid;
          else lo = mid;
        }
        next = pos + (next - pos) * lo;
        contact = true;
      }
      s_.robot_velocity = (next - pos) / prm.dt;
      s_.robot.x = next.x();
      s_.robot.y = next.y();
      substep();
      if (contact) {
        s_.robot_velocity.setZero();
        return false;
      }
    }
    s_.robot_velocity.setZero();
    return true;
  }

  void dwell() {
    s_.robot_velocity.setZero();
    while (blower_on_ && elapsed_ + 1e-12 < s_.params.min_blow_time) substep();
  }

  void settle() {
    blower_on_ = false;
    s_.robot_velocity.setZero();
    double t = 0.0;
    while (!settled(s_) && t < s_.params.max_settle_time) {
      substep();
      t += s_.params.dt;
    }
  }

  int entered() const { return entered_; }
  std::int64_t count() const { return count_; }

 private:
  WorldState& s_;
  bool blower_on_;
  int entered_ = 0;
  double elapsed_ = 0.0;
  std::int64_t count_ = 0;
};

}  // namespace

double WorldState::object_distance(const RigidObject& o) const {
  if (o.removed) return 0.0;
  const double d = receptacle_distance ? receptacle_distance->sample(o.position) : kInfinity;
  return std::isfinite(d) ? d : env.diagonal();
}

Vec2 WorldState::nozzle_direction() const {
  const Vec2 h = robot.heading();
  return params.mount == BlowerMount::Front ? h : Vec2(h.y(), -h.x());
}

bool operator==(const WorldState& a, const WorldState& b) {
  if (!(a.robot == b.robot) || a.robot_velocity != b.robot_velocity || a.sim_time != b.sim_time ||
      a.substeps != b.substeps || a.removed_count != b.removed_count || a.rng != b.rng)
    return false;
  if (a.objects.size() != b.objects.size() || a.particles.size() != b.particles.size()) return false;
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    const RigidObject& x = a.objects[i];
    const RigidObject& y = b.objects[i];
    if (x.position != y.position || x.velocity != y.velocity || x.removed != y.removed) return false;
  }
  for (std::size_t i = 0; i < a.particles.size(); ++i) {
    const Particle& x = a.particles[i];
    const Particle& y = b.particles[i];
    if (x.position != y.position || x.velocity != y.velocity || x.remaining_life != y.remaining_life ||
        x.travelled != y.travelled)
      return false;
  }
  return true;
}

WorldState reset(const EnvSpec& spec, std::uint64_t seed, const PhysicsParams& params) {
  WorldState s;
  s.env = spec;
  s.params = params;
  s.rng.seed(seed);
  s.receptacle_distance = static_receptacle_field(spec);

  const double rr = params.robot_radius;
  bool placed = false;
  for (int attempt = 0; attempt < params.placement_attempts && !placed; ++attempt) {
    const Vec2 p = uniform_point(s.rng, spec, rr);
    if (disc_hits_wall(spec, p, rr)) continue;
    s.robot = Pose{p.x(), p.y(), wrap_angle(-kPi + 2.0 * kPi * uniform01(s.rng))};
    placed = true;
  }
  if (!placed) throw ConfigError("reset: could not place the robot");

  const double ro = params.object_radius;
  s.objects.reserve(static_cast<std::size_t>(spec.initial_object_count));
  for (int i = 0; i < spec.initial_object_count; ++i) {
    bool ok = false;
    for (int attempt = 0; attempt < params.placement_attempts && !ok; ++attempt) {
      const Vec2 p = uniform_point(s.rng, spec, ro);
      if (disc_hits_wall(spec, p, ro)) continue;
      if ((p - spec.receptacle.closest_point(p)).norm() < ro) continue;
      if ((p - s.robot.position()).norm() < rr + ro) continue;
      if (!std::isfinite(s.receptacle_distance->sample(p))) continue;
      const bool overlaps = std::any_of(s.objects.begin(), s.objects.end(), [&](const RigidObject& o) {
        return (o.position - p).norm() < o.radius + ro;
      });
      if (overlaps) continue;
      s.objects.push_back(RigidObject{p, Vec2::Zero(), ro, params.object_mass, false});
      ok = true;
    }
    if (!ok) throw ConfigError("reset: environment too crowded to place " + std::to_string(spec.initial_object_count) +
                               " objects");
  }
  return s;
}

void emit_blow(WorldState& state, double force) {
  if (force <= 0.0) return;
  const PhysicsParams& prm = state.params;
  const Vec2 dir = state.nozzle_direction();
  const double base = std::atan2(dir.y(), dir.x());
  const Vec2 nozzle = state.robot.position() + dir * (prm.robot_radius + prm.particle_radius);
  const double speed = force * prm.v_ref;
  for (int i = 0; i < prm.particles_per_substep; ++i) {
    const double angle = base + prm.cone_half_angle * (2.0 * uniform01(state.rng) - 1.0);
    Particle p;
    p.position = nozzle;
    p.velocity = speed * Vec2(std::cos(angle), std::sin(angle));
    p.remaining_life = prm.particle_life;
    state.particles.push_back(p);
  }
}

StepEvents step_physics(WorldState& state, double dt) {
  const std::vector<double> before = object_distances(state);
  StepEvents ev;
  ev.objects_entered_receptacle = advance(state, dt);
  ev.substeps = 1;
  const std::vector<double> after = object_distances(state);
  ev.distance_deltas.resize(before.size());
  for (std::size_t i = 0; i < before.size(); ++i) ev.distance_deltas[i] = after[i] - before[i];
  return ev;
}

StepEvents execute_primitive(WorldState& state, const Primitive& primitive) {
  const std::vector<double> before = object_distances(state);
  StepEvents ev;
  PrimitiveRunner run(state, blows(primitive));

  if (const auto* turn = std::get_if<TurnInPlace>(&primitive)) {
    const Vec2 diff = turn->target - state.robot.position();
    const double bearing = diff.norm() > 0.0 ? std::atan2(diff.y(), diff.x()) : state.robot.theta;
    run.turn_to(bearing);
    run.dwell();
  } else {
    const auto& move = std::get<MoveTo>(primitive);
    if (move.path.empty()) return StepEvents{0, std::vector<double>(state.objects.size(), 0.0), false, 0};
    for (const Vec2& waypoint : move.path) {
      const Vec2 diff = waypoint - state.robot.position();
      if (diff.norm() > 1e-9) run.turn_to(std::atan2(diff.y(), diff.x()));
      if (!run.drive_to(waypoint)) {
        ev.robot_collision = true;
        break;
      }
    }
    run.dwell();
  }
  run.settle();

  ev.objects_entered_receptacle = run.entered();
  ev.substeps = run.count();
  const std::vector<double> after = object_distances(state);
  ev.distance_deltas.resize(before.size());
  for (std::size_t i = 0; i < before.size(); ++i) ev.distance_deltas[i] = after[i] - before[i];
  return ev;
}

double compute_reward(const StepEvents& events, const RewardConfig& cfg) {
  double partial = 0.0;
  for (double d : events.distance_deltas) partial -= d;
  double reward = cfg.success_reward * events.objects_entered_receptacle + cfg.partial_coefficient * partial;
  if (events.robot_collision && cfg.collision_penalty_enabled) reward -= cfg.collision_penalty;
  return reward;
}

}  // namespace blowbot
