#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blowbot/config.hpp"
#include "blowbot/episode.hpp"

namespace blowbot {

/// Seed streams; every random source of a run derives from (seed, stream, index).
enum SeedStream : std::uint64_t {
  kStreamNetInit = 1,
  kStreamTrainWorld = 2,
  kStreamTrainPolicy = 3,
  kStreamEvalWorld = 4,
  kStreamEvalPolicy = 5,
};

/// One agent in one world: ground-truth simulation, fused maps, episode counters.
class AgentWorld {
 public:
  AgentWorld(const ResolvedConfig& cfg, std::uint64_t world_seed);

  /// Senses, fuses, and returns the egocentric state at the current pose.
  StatePtr observe();
  /// Fills action.world_target and converts it to a primitive on the fused maps.
  Primitive primitive_for(Action& action) const;
  EpisodeStep act(const Primitive& primitive);

  const WorldState& world() const { return world_; }
  const GlobalMaps& maps() const { return maps_; }
  const EpisodeState& episode() const { return episode_; }
  const std::vector<Vec2>& trajectory() const { return trajectory_; }

 private:
  const ResolvedConfig* cfg_;
  WorldState world_;
  GlobalMaps maps_;
  std::vector<Cell> receptacle_;
  EpisodeState episode_;
  std::vector<Vec2> trajectory_;
};

/// epsilon-greedy over the network's action map. A null network means the
/// uniform-random policy. One uniform draw is consumed per call; the network is
/// only evaluated when the greedy branch is taken.
Action choose_action(const nn::NetworkParams<float>* net, const StateTensor& s, int channels, double eps, Rng& rng);

struct TrainLogRow {
  std::int64_t iteration = 0;
  int level = 0;
  double loss = 0.0;
  double epsilon = 0.0;
  std::int64_t env_steps = 0;
};

struct EpisodeRecord {
  int episode = 0;
  std::int64_t env_steps = 0;  // global counter at episode end
  int steps = 0;
  int objects = 0;
  double total_reward = 0.0;
};

struct TrainResult {
  std::vector<nn::NetworkParams<float>> nets;  // online network per level
  std::vector<TrainLogRow> log;
  std::vector<EpisodeRecord> episodes;
  std::int64_t env_steps = 0;
};

using ProgressFn = std::function<void(std::int64_t iteration, std::int64_t total)>;

TrainResult train_agent(const ResolvedConfig& cfg, std::uint64_t seed, const ProgressFn& progress = {});

struct EpisodeCurve {
  int episode = 0;
  /// objects[t]: cumulative objects in the receptacle after t decision steps.
  std::vector<int> objects;
};

struct EvalResult {
  std::uint64_t seed = 0;
  int initial_objects = 0;
  int budget = 0;
  std::vector<EpisodeCurve> episodes;
  /// channel_counts[level][channel]: greedy choices over all evaluation steps.
  std::vector<std::vector<std::int64_t>> channel_counts;
  /// Per-episode debug output (maps + trajectory) of episode 0.
  std::optional<GlobalMaps> final_maps;
  std::vector<Vec2> trajectory;
};

/// Greedy (epsilon = 0) rollouts, or the random policy when `nets` is empty.
EvalResult evaluate_policy(const ResolvedConfig& cfg, std::span<const nn::NetworkParams<float>> nets,
                           std::uint64_t seed);

/// Per-episode count at `budget` steps (held after the episode ends).
double objects_at(const EpisodeCurve& curve, int budget);
double mean_objects_at(const EvalResult& eval, int budget);
/// Mean over episodes of the curve, padded to the evaluation budget.
std::vector<double> mean_curve(const EvalResult& eval);
/// First decision step at which the mean curve reaches `fraction` of the
/// initial objects; budget + 1 when it never does.
int steps_to_fraction(const EvalResult& eval, double fraction);

/// channel fractions per level; rows sum to 1 (or are all 0 if the level never acted).
std::vector<std::vector<double>> channel_fractions(const EvalResult& eval);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};
/// Population standard deviation.
MeanStd mean_std(std::span<const double> values);
double median(std::vector<double> values);

// Run directories: <out>/seed_<s>/{config.txt, level<j>.ckpt, train_log.csv,
// train_episodes.csv, eval_curve.csv, eval_summary.csv, stats.csv}.
std::filesystem::path seed_dir(const std::filesystem::path& out, std::uint64_t seed);

void write_run_config(const std::filesystem::path& dir, const RunConfig& cfg);
void save_policy(const std::filesystem::path& dir, std::span<const nn::NetworkParams<float>> nets);
/// Refuses (ConfigError with a shape diff) when a checkpoint does not match the config.
std::vector<nn::NetworkParams<float>> load_policy(const std::filesystem::path& dir, const ResolvedConfig& cfg);

void write_train_log(const std::filesystem::path& path, std::span<const TrainLogRow> rows);
void write_train_episodes(const std::filesystem::path& path, std::span<const EpisodeRecord> rows);
void write_eval_curve(const std::filesystem::path& path, const EvalResult& eval);
void write_eval_summary(const std::filesystem::path& path, const EvalResult& eval);
void write_stats(const std::filesystem::path& path, const EvalResult& eval);

/// Grayscale PGM (P5). Values are clamped to [0, 1]; row 0 is written last so
/// +y points up in viewers.
void write_pgm(const std::filesystem::path& path, const Eigen::ArrayXXf& image);
/// Overhead map, occupancy map and the robot trajectory of an evaluation episode.
void write_debug_maps(const std::filesystem::path& dir, const EvalResult& eval);

/// Trains one seed and writes config snapshot, checkpoints and training logs.
TrainResult train_run(const ResolvedConfig& cfg, std::uint64_t seed, const std::filesystem::path& out,
                      const ProgressFn& progress = {});
/// Evaluates the seed's checkpoints (or the random policy) and writes curves,
/// summary and per-level channel statistics.
EvalResult eval_run(const ResolvedConfig& cfg, std::uint64_t seed, const std::filesystem::path& out,
                    bool debug_maps = false);
/// train_run followed by eval_run.
EvalResult run_seed(const ResolvedConfig& cfg, std::uint64_t seed, const std::filesystem::path& out,
                    bool debug_maps = false, const ProgressFn& progress = {});

struct SweepRow {
  std::string axis_value;
  MeanStd objects;
  std::size_t seeds = 0;
};

/// Trains and evaluates every (value, seed) pair of the config's sweep axis.
/// Writes <out>/sweep_summary.csv.
std::vector<SweepRow> sweep(const RunConfig& base, const std::filesystem::path& out, const ProgressFn& progress = {});

}  // namespace blowbot
