#include "blowbot/episode.hpp"

namespace blowbot {

EpisodeStep step_episode(WorldState& world, const Primitive& primitive, EpisodeState& episode,
                         const RewardConfig& reward_cfg) {
  if (episode.done) fault("step_episode: episode already done");

  EpisodeStep out;
  out.events = execute_primitive(world, primitive);
  out.reward = compute_reward(out.events, reward_cfg);

  episode.total_steps += 1;
  episode.objects_collected += out.events.objects_entered_receptacle;
  if (out.events.robot_collision) episode.collisions += 1;
  if (out.events.objects_entered_receptacle > 0) {
    episode.steps_since_last_success = 0;
  } else {
    episode.steps_since_last_success += 1;
  }
  episode.rewards.push_back(out.reward);
  episode.done = world.active_count() == 0 || episode.steps_since_last_success >= kMaxFruitlessSteps;
  out.done = episode.done;
  return out;
}

double total_object_distance(const WorldState& world) {
  double total = 0.0;
  for (const RigidObject& o : world.objects) {
    if (!o.removed) total += world.object_distance(o);
  }
  return total;
}

}  // namespace blowbot
