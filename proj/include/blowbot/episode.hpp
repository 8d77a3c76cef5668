#pragma once

#include <vector>

#include "blowbot/world.hpp"

namespace blowbot {

inline constexpr int kMaxFruitlessSteps = 100;

struct EpisodeState {
  int objects_collected = 0;
  int steps_since_last_success = 0;
  int total_steps = 0;
  int collisions = 0;
  std::vector<double> rewards;
  bool done = false;
};

struct EpisodeStep {
  double reward = 0.0;
  bool done = false;
  StepEvents events;
};

/// Runs one primitive, scores it, and updates the termination counters.
/// Stepping an episode that is already done faults.
EpisodeStep step_episode(WorldState& world, const Primitive& primitive, EpisodeState& episode,
                         const RewardConfig& reward_cfg);

/// Sum over active objects of the shortest-path distance to the receptacle.
double total_object_distance(const WorldState& world);

}  // namespace blowbot
