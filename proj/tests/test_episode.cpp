#include <gtest/gtest.h>

#include "blowbot/episode.hpp"

using namespace blowbot;

namespace {

WorldState small_world(int objects, std::uint64_t seed = 3) {
  EnvSpec env = build_env(EnvKind::SmallEmpty);
  env.initial_object_count = objects;
  return reset(env, seed);
}

// Sets the object rolling into the receptacle from just outside it.
void aim_at_receptacle(WorldState& w, std::size_t i) {
  const Box& r = w.env.receptacle;
  const Vec2 c = 0.5 * (r.lo + r.hi);
  w.objects[i].position = Vec2(r.lo.x() - 0.01, c.y());
  w.objects[i].velocity = Vec2(0.3, 0.0);
}

TurnInPlace idle(const WorldState& w) { return TurnInPlace{w.robot.position() + w.robot.heading(), false}; }

}  // namespace

TEST(Episode, LastObjectEndsTheEpisode) {
  WorldState w = small_world(1);
  aim_at_receptacle(w, 0);
  EpisodeState ep;
  const EpisodeStep step = step_episode(w, idle(w), ep, RewardConfig{});
  EXPECT_EQ(step.events.objects_entered_receptacle, 1);
  EXPECT_TRUE(step.done);
  EXPECT_TRUE(ep.done);
  EXPECT_EQ(ep.objects_collected, 1);
  EXPECT_THROW(step_episode(w, idle(w), ep, RewardConfig{}), InternalFault);
}

TEST(Episode, HundredFruitlessStepsEndTheEpisode) {
  WorldState w = small_world(3);
  EpisodeState ep;
  for (int i = 1; i < kMaxFruitlessSteps; ++i) {
    EXPECT_FALSE(step_episode(w, MoveTo{}, ep, RewardConfig{}).done) << i;
  }
  EXPECT_EQ(ep.steps_since_last_success, 99);
  EXPECT_TRUE(step_episode(w, MoveTo{}, ep, RewardConfig{}).done);
  EXPECT_EQ(ep.total_steps, 100);
}

TEST(Episode, SuccessResetsTheCounter) {
  WorldState w = small_world(3);
  EpisodeState ep;
  for (int i = 0; i < 99; ++i) step_episode(w, MoveTo{}, ep, RewardConfig{});
  aim_at_receptacle(w, 0);
  const EpisodeStep step = step_episode(w, idle(w), ep, RewardConfig{});
  EXPECT_FALSE(step.done);
  EXPECT_EQ(ep.steps_since_last_success, 0);
  EXPECT_EQ(ep.objects_collected, 1);
}

TEST(Episode, RewardsTelescope) {
  // Random blowing and driving, then compare the logged rewards with the
  // closed form from the episode totals.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    WorldState w = small_world(10, seed);
    const double d0 = total_object_distance(w);
    EpisodeState ep;
    Rng rng(seed);
    for (int i = 0; i < 40 && !ep.done; ++i) {
      const Vec2 target(uniform01(rng) * 1.2 - 0.1, uniform01(rng) * 0.7 - 0.1);
      if (rng() % 2) {
        step_episode(w, TurnInPlace{target, true}, ep, RewardConfig{});
      } else {
        step_episode(w, MoveTo{{target}, rng() % 2 == 0}, ep, RewardConfig{});
      }
    }
    double sum = 0.0;
    for (double r : ep.rewards) sum += r;
    const double closed = ep.objects_collected + (d0 - total_object_distance(w)) - 0.25 * ep.collisions;
    EXPECT_NEAR(sum, closed, 1e-9) << "seed " << seed;
    EXPECT_EQ(ep.total_steps, static_cast<int>(ep.rewards.size()));
  }
}
