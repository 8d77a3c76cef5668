#include "blowbot/multifreq.hpp"

namespace blowbot {

std::int64_t LevelSchedule::steps_per_cycle(int level) const {
  std::int64_t n = 1;
  for (int j = 0; j < level; ++j) n *= k;
  return n;
}

std::int64_t LevelSchedule::cycle_length() const {
  std::int64_t total = 0;
  for (int j = 0; j < levels; ++j) total += steps_per_cycle(j);
  return total;
}

void LevelSchedule::validate() const {
  if (levels < 1 || levels > 3) throw ConfigError("levels must be 1, 2 or 3");
  if (k < 1) throw ConfigError("k must be at least 1");
}

std::vector<int> LevelSchedule::cycle() const {
  validate();
  std::function<void(int, std::vector<int>&)> expand = [&](int level, std::vector<int>& out) {
    out.push_back(level);
    if (level + 1 >= levels) return;
    for (int i = 0; i < k; ++i) expand(level + 1, out);
  };
  std::vector<int> out;
  expand(0, out);
  return out;
}

std::vector<int> schedule_sequence(int levels, int k, std::size_t total_steps) {
  const std::vector<int> cycle = LevelSchedule{levels, k}.cycle();
  std::vector<int> seq(total_steps);
  for (std::size_t i = 0; i < total_steps; ++i) seq[i] = cycle[i % cycle.size()];
  return seq;
}

MultiFreqRuntime::MultiFreqRuntime(const LevelSchedule& schedule, RewardMode mode, const TrainerConfig& cfg,
                                   const nn::Architecture& arch, Rng& init_rng)
    : schedule_(schedule), mode_(mode), cfg_(cfg) {
  schedule_.validate();
  for (int j = 0; j < schedule_.levels; ++j) {
    LevelRuntime lr{nn::init_params<float>(arch, init_rng), {}, {}, ReplayBuffer(cfg.buffer_size), std::nullopt, 0};
    lr.target = lr.online;
    lr.optimizer = nn::OptimizerState<float>::zeros_like(lr.online, cfg.sgd);
    levels_.push_back(std::move(lr));
  }
}

void MultiFreqRuntime::close_spans(int acting_level, const StatePtr& s) {
  for (int j = levels() - 1; j >= acting_level; --j) {
    if (level(j).pending) commit_transition(j, s, false);
  }
}

void MultiFreqRuntime::record_step(int acting_level, StatePtr s, const Action& a) {
  LevelRuntime& lr = level(acting_level);
  if (lr.pending) fault("record_step: level " + std::to_string(acting_level) + " already has a pending transition");
  lr.pending = PendingTransition{std::move(s), a, 0.0};
  ++lr.steps;
  acting_ = acting_level;
}

void MultiFreqRuntime::accumulate_reward(double r) {
  if (acting_ < 0) fault("accumulate_reward: no level acted this step");
  level(acting_).pending->accumulated_r += r;
  if (mode_ == RewardMode::Accumulate) {
    for (int j = acting_ - 1; j >= 0; --j) {
      if (level(j).pending) level(j).pending->accumulated_r += r;
    }
  }
  acting_ = -1;
}

Transition MultiFreqRuntime::commit_transition(int lvl, StatePtr s_next, bool done) {
  LevelRuntime& lr = level(lvl);
  if (!lr.pending) fault("commit_transition: level " + std::to_string(lvl) + " has no pending transition");
  Transition t{std::move(lr.pending->s), lr.pending->a, lr.pending->accumulated_r, std::move(s_next), done};
  lr.pending.reset();
  if (hook_) hook_(lvl, t);
  lr.buffer.push(t);
  return t;
}

void MultiFreqRuntime::flush(const StatePtr& s_terminal) {
  for (int j = levels() - 1; j >= 0; --j) {
    if (level(j).pending) commit_transition(j, s_terminal, true);
  }
  acting_ = -1;
}

bool MultiFreqRuntime::any_pending() const {
  for (const LevelRuntime& lr : levels_) {
    if (lr.pending) return true;
  }
  return false;
}

std::vector<std::optional<double>> MultiFreqRuntime::train_tick(Rng& rng) {
  std::vector<std::optional<double>> losses;
  for (LevelRuntime& lr : levels_) {
    losses.push_back(dqn_update(lr.online, lr.target, lr.optimizer, lr.buffer, cfg_, rng));
  }
  ++iteration_;
  for (LevelRuntime& lr : levels_) sync_target(lr.online, lr.target, iteration_, cfg_.target_update);
  return losses;
}

}  // namespace blowbot
