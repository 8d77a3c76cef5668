#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "blowbot/dqn.hpp"

namespace blowbot {

/// n levels, k steps of level j+1 per step of level j. Level 0 is the highest
/// (lowest-frequency) level.
struct LevelSchedule {
  int levels = 2;
  int k = 4;

  /// Steps taken by level j in one highest-level cycle: k^j.
  std::int64_t steps_per_cycle(int level) const;
  std::int64_t cycle_length() const;
  /// One cycle: a level-0 step, then k repetitions of the level-1 cycle, and so on.
  std::vector<int> cycle() const;
  void validate() const;
};

/// The first `total_steps` entries of the periodic level sequence.
std::vector<int> schedule_sequence(int levels, int k, std::size_t total_steps);

enum class RewardMode { Accumulate, OwnStepOnly };

struct PendingTransition {
  StatePtr s;
  Action a;
  double accumulated_r = 0.0;
};

struct LevelRuntime {
  nn::NetworkParams<float> online;
  nn::NetworkParams<float> target;
  nn::OptimizerState<float> optimizer;
  ReplayBuffer buffer;
  std::optional<PendingTransition> pending;
  std::int64_t steps = 0;
};

/// Per-level subpolicies with their own networks and replay buffers, driven by
/// one interleaved schedule. A level's pending transition stays open until a
/// level of equal or lower frequency acts again (or the episode ends); with
/// Accumulate, every reward earned meanwhile is credited to it.
class MultiFreqRuntime {
 public:
  using CommitHook = std::function<void(int level, const Transition&)>;

  MultiFreqRuntime(const LevelSchedule& schedule, RewardMode mode, const TrainerConfig& cfg,
                   const nn::Architecture& arch, Rng& init_rng);

  const LevelSchedule& schedule() const { return schedule_; }
  RewardMode mode() const { return mode_; }
  const TrainerConfig& config() const { return cfg_; }
  int levels() const { return static_cast<int>(levels_.size()); }
  LevelRuntime& level(int j) { return levels_.at(static_cast<std::size_t>(j)); }
  const LevelRuntime& level(int j) const { return levels_.at(static_cast<std::size_t>(j)); }
  std::int64_t iteration() const { return iteration_; }

  /// Invoked for every committed transition before it enters the buffer.
  void set_commit_hook(CommitHook hook) { hook_ = std::move(hook); }

  /// Commits the open pendings of every level >= acting_level with s_next = s.
  /// Call before a step by acting_level.
  void close_spans(int acting_level, const StatePtr& s);

  /// Opens a pending transition for the acting level. Faults if one is open.
  void record_step(int acting_level, StatePtr s, const Action& a);

  /// Credits the reward of the step just recorded.
  void accumulate_reward(double r);

  /// Emits the level's pending transition into its buffer and clears the slot.
  Transition commit_transition(int level, StatePtr s_next, bool done);

  /// Episode end: commits every open pending with done = true.
  void flush(const StatePtr& s_terminal);

  /// One SGD iteration per level (levels below batch size are skipped), then
  /// target synchronisation. Returns per-level losses.
  std::vector<std::optional<double>> train_tick(Rng& rng);

  bool any_pending() const;

 private:
  LevelSchedule schedule_;
  RewardMode mode_;
  TrainerConfig cfg_;
  std::vector<LevelRuntime> levels_;
  int acting_ = -1;
  std::int64_t iteration_ = 0;
  CommitHook hook_;
};

}  // namespace blowbot
