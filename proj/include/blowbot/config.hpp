#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blowbot/action_space.hpp"
#include "blowbot/dqn.hpp"
#include "blowbot/env.hpp"
#include "blowbot/multifreq.hpp"

namespace blowbot {

enum class Preset { Desk, Paper };
enum class PolicyKind { Learned, Random };

/// User-facing run description. Optional fields fall back to the preset.
struct RunConfig {
  EnvKind env = EnvKind::SmallEmpty;
  RobotVariant robot = RobotVariant::BlowingTurn;
  int levels = 2;
  int k = 4;
  double blow_force = 0.35;
  bool reward_accumulation = true;
  std::optional<bool> collision_penalty;
  Preset preset = Preset::Desk;
  std::vector<std::uint64_t> seeds{0};
  std::string out = "runs";
  PolicyKind policy = PolicyKind::Learned;

  std::optional<std::int64_t> iterations;
  std::optional<int> batch_size;
  std::optional<int> buffer_size;
  std::optional<std::int64_t> target_update;
  std::optional<int> crop_size;
  std::optional<int> net_width;
  std::optional<int> num_objects;
  std::optional<int> eval_episodes;
  std::optional<int> eval_max_steps;

  std::string sweep_axis;
  std::vector<std::string> sweep_values;
};

/// Applies one `key = value` assignment. Unknown keys and malformed values
/// throw ConfigError.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// Flat `key = value` lines; `#` starts a comment. Errors carry the line number.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Text that parse_config maps back to the same config.
std::string to_text(const RunConfig& cfg);

/// Every concrete parameter of a run, after presets and variant rules.
struct ResolvedConfig {
  RunConfig config;
  EnvSpec env;
  PhysicsParams physics;
  RewardConfig reward;
  TrainerConfig trainer;
  EpsilonSchedule epsilon;
  LevelSchedule schedule;
  RewardMode reward_mode = RewardMode::Accumulate;
  nn::Architecture arch;
  GridGeometry geom;
  SensorParams sensor;
  EgocentricParams ego;
  PrimitiveContext primitive;
  int eval_episodes = 20;
  int eval_max_steps = 100;
  std::int64_t train_interval = 4;  // env steps per SGD tick
  std::int64_t prefill_steps = 0;   // random-policy env steps before training
};

/// Throws ConfigError for invalid combinations.
ResolvedConfig resolve(const RunConfig& cfg);

std::string to_string(Preset p);
std::string to_string(PolicyKind p);

}  // namespace blowbot
