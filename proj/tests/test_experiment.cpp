#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "blowbot/experiment.hpp"

using namespace blowbot;
namespace fs = std::filesystem;

namespace {

RunConfig tiny_config() {
  RunConfig cfg;
  cfg.iterations = 12;
  cfg.batch_size = 4;
  cfg.buffer_size = 64;
  cfg.net_width = 2;
  cfg.crop_size = 16;
  cfg.num_objects = 4;
  cfg.eval_episodes = 2;
  cfg.eval_max_steps = 8;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("blowbot_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Harness, SmokeTrainEmitsCheckpointsAndLogs) {
  const fs::path out = fresh_dir("smoke");
  const ResolvedConfig cfg = resolve(tiny_config());
  const TrainResult t = train_run(cfg, 0, out);
  ASSERT_EQ(t.nets.size(), 2u);
  // Prefill of 12 * 5 / 40 steps, then one tick per 5-step cycle.
  EXPECT_GE(t.env_steps, 1 + 12 * 5);
  const fs::path dir = seed_dir(out, 0);
  for (const char* f : {"config.txt", "level0.ckpt", "level1.ckpt", "train_log.csv", "train_episodes.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_EQ(slurp(dir / "train_log.csv").substr(0, 38), "iteration,level,loss,epsilon,env_steps");
  fs::remove_all(out);
}

TEST(Harness, TrainingIsDeterministicPerSeed) {
  const ResolvedConfig cfg = resolve(tiny_config());
  const TrainResult a = train_agent(cfg, 7);
  const TrainResult b = train_agent(cfg, 7);
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) EXPECT_EQ(a.log[i].loss, b.log[i].loss);
  EXPECT_TRUE(a.nets[1] == b.nets[1]);
}

TEST(Harness, EvalRerunIsByteIdentical) {
  const fs::path out = fresh_dir("rerun");
  const ResolvedConfig cfg = resolve(tiny_config());
  train_run(cfg, 1, out);
  eval_run(cfg, 1, out);
  const std::string curve = slurp(seed_dir(out, 1) / "eval_curve.csv");
  const std::string summary = slurp(seed_dir(out, 1) / "eval_summary.csv");
  eval_run(cfg, 1, out);
  EXPECT_EQ(slurp(seed_dir(out, 1) / "eval_curve.csv"), curve);
  EXPECT_EQ(slurp(seed_dir(out, 1) / "eval_summary.csv"), summary);
  EXPECT_FALSE(curve.empty());
  fs::remove_all(out);
}

TEST(Harness, MismatchedCheckpointIsRefused) {
  const fs::path out = fresh_dir("mismatch");
  train_run(resolve(tiny_config()), 0, out);
  RunConfig other = tiny_config();
  other.net_width = 4;
  try {
    load_policy(seed_dir(out, 0), resolve(other));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("expected"), std::string::npos);
  }
  fs::remove_all(out);
}

TEST(Harness, RandomPolicyNeedsNoCheckpoint) {
  const fs::path out = fresh_dir("random");
  RunConfig c = tiny_config();
  c.policy = PolicyKind::Random;
  const ResolvedConfig cfg = resolve(c);
  const EvalResult e = eval_run(cfg, 0, out);
  ASSERT_EQ(e.episodes.size(), 2u);
  for (const EpisodeCurve& ep : e.episodes) {
    EXPECT_EQ(ep.objects.front(), 0);
    EXPECT_LE(static_cast<int>(ep.objects.size()), 9);
  }
  EXPECT_THROW(train_run(cfg, 0, out), ConfigError);
  fs::remove_all(out);
}

TEST(Metrics, CurvesAndFractions) {
  EvalResult e;
  e.initial_objects = 4;
  e.budget = 5;
  e.episodes = {{0, {0, 1, 2, 4}}, {1, {0, 0, 1, 1, 2, 3}}};
  EXPECT_EQ(objects_at(e.episodes[0], 5), 4.0);
  EXPECT_EQ(objects_at(e.episodes[1], 2), 1.0);
  EXPECT_DOUBLE_EQ(mean_objects_at(e, 5), 3.5);
  const auto curve = mean_curve(e);
  ASSERT_EQ(curve.size(), 6u);
  EXPECT_DOUBLE_EQ(curve[3], 2.5);
  // Mean curve: 0, 0.5, 1.5, 2.5, 3.0, 3.5.
  EXPECT_EQ(steps_to_fraction(e, 0.5), 3);
  EXPECT_EQ(steps_to_fraction(e, 0.8), 5);
  EXPECT_EQ(steps_to_fraction(e, 1.0), 6);   // never
  e.channel_counts = {{3, 1}, {0, 0}};
  const auto f = channel_fractions(e);
  EXPECT_DOUBLE_EQ(f[0][0], 0.75);
  EXPECT_DOUBLE_EQ(f[1][1], 0.0);
}

TEST(Metrics, MeanStdAndMedian) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const MeanStd m = mean_std(v);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_DOUBLE_EQ(m.stddev, std::sqrt(1.25));
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
}
