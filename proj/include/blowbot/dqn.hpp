#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "blowbot/action_space.hpp"
#include "blowbot/mapping.hpp"
#include "blowbot/qnetwork.hpp"

namespace blowbot {

using StatePtr = std::shared_ptr<const StateTensor>;

struct Transition {
  StatePtr s;
  Action a;
  double r = 0.0;
  StatePtr s_next;
  bool done = false;
};

/// Fixed-capacity FIFO ring buffer.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 10'000);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }

  /// i-th oldest surviving transition.
  const Transition& operator[](std::size_t i) const;

  /// n independent uniform draws with replacement; nullopt while size() < n.
  std::optional<std::vector<const Transition*>> sample(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // index of the oldest item once full
  std::vector<Transition> items_;
};

/// Double-DQN bootstrap: the action is chosen by argmax of the online map and
/// valued by the target map.
double td_target(double r, bool done, const ActionMap& online_next, const ActionMap& target_next, double gamma);

/// Vanilla DQN bootstrap (max of the target map); kept for comparisons.
double vanilla_td_target(double r, bool done, const ActionMap& target_next, double gamma);

/// Same as td_target but running both networks on s_next.
double td_target(double r, const StateTensor& s_next, bool done, const nn::NetworkParams<float>& online,
                 const nn::NetworkParams<float>& target, double gamma);

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.01;
  double anneal_fraction = 0.1;
  std::int64_t total_iterations = 20'000;

  double anneal_iterations() const { return anneal_fraction * static_cast<double>(total_iterations); }
};

/// Linear from start at iteration 0 to end at anneal_fraction * total, flat after.
double epsilon(std::int64_t iteration, const EpsilonSchedule& schedule);

/// With probability eps a uniform (channel, cell); otherwise decode(qmap).
/// Always consumes exactly one uniform draw, plus one index draw when exploring.
Action select_action(const ActionMap& qmap, double eps, Rng& rng);
Action random_action(int channels, int height, int width, Rng& rng);

/// Hard copy of online into target at every positive multiple of `period`.
/// Returns true when a copy happened.
bool sync_target(const nn::NetworkParams<float>& online, nn::NetworkParams<float>& target, std::int64_t iteration,
                 std::int64_t period = 1000);

nn::Tensor<float> stack_states(std::span<const StateTensor* const> states);
ActionMap action_map_of(const nn::Tensor<float>& out, int sample);

struct TrainerConfig {
  double gamma = 0.75;
  std::size_t batch_size = 32;
  std::int64_t total_iterations = 20'000;
  std::int64_t target_update = 1000;
  std::size_t buffer_size = 10'000;
  nn::SgdConfig sgd;
};

/// One double-DQN SGD iteration on a sampled batch. Returns the loss, or
/// nullopt when the buffer is not yet at batch size.
std::optional<double> dqn_update(nn::NetworkParams<float>& online, const nn::NetworkParams<float>& target,
                                 nn::OptimizerState<float>& optimizer, const ReplayBuffer& buffer,
                                 const TrainerConfig& cfg, Rng& rng);

}  // namespace blowbot
