#include "blowbot/dqn.hpp"

#include <algorithm>

namespace blowbot {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
    return;
  }
  items_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::operator[](std::size_t i) const { return items_[(head_ + i) % items_.size()]; }

std::optional<std::vector<const Transition*>> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  if (items_.size() < n || items_.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<const Transition*> batch(n);
  for (auto& t : batch) t = &items_[pick(rng)];
  return batch;
}

double td_target(double r, bool done, const ActionMap& online_next, const ActionMap& target_next, double gamma) {
  if (done) return r;
  const Action a = decode(online_next);
  return r + gamma * static_cast<double>(target_next.at(a.channel, a.row, a.col));
}

double vanilla_td_target(double r, bool done, const ActionMap& target_next, double gamma) {
  if (done) return r;
  return r + gamma * static_cast<double>(target_next.values.maxCoeff());
}

double td_target(double r, const StateTensor& s_next, bool done, const nn::NetworkParams<float>& online,
                 const nn::NetworkParams<float>& target, double gamma) {
  if (done) return r;
  const StateTensor* ptr = &s_next;
  const nn::Tensor<float> in = stack_states(std::span<const StateTensor* const>(&ptr, 1));
  return td_target(r, false, action_map_of(nn::forward(online, in), 0), action_map_of(nn::forward(target, in), 0),
                   gamma);
}

double epsilon(std::int64_t iteration, const EpsilonSchedule& schedule) {
  const double anneal = schedule.anneal_iterations();
  if (anneal <= 0.0 || static_cast<double>(iteration) >= anneal) return schedule.end;
  const double frac = static_cast<double>(std::max<std::int64_t>(iteration, 0)) / anneal;
  return schedule.start + (schedule.end - schedule.start) * frac;
}

Action random_action(int channels, int height, int width, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, channels * height * width - 1);
  return Action::from_flat(pick(rng), height, width);
}

Action select_action(const ActionMap& qmap, double eps, Rng& rng) {
  if (uniform01(rng) < eps) return random_action(qmap.channels(), qmap.height, qmap.width, rng);
  return decode(qmap);
}

bool sync_target(const nn::NetworkParams<float>& online, nn::NetworkParams<float>& target, std::int64_t iteration,
                 std::int64_t period) {
  if (iteration <= 0 || iteration % period != 0) return false;
  target = online;
  return true;
}

nn::Tensor<float> stack_states(std::span<const StateTensor* const> states) {
  if (states.empty()) throw ConfigError("stack_states: empty batch");
  const int h = states.front()->height;
  const int w = states.front()->width;
  nn::Tensor<float> t{static_cast<int>(states.size()), h, w,
                      nn::Matrix<float>(StateTensor::kChannels, static_cast<Eigen::Index>(states.size()) * h * w)};
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i]->height != h || states[i]->width != w) throw ConfigError("stack_states: mixed crop sizes");
    t.data.middleCols(static_cast<Eigen::Index>(i) * h * w, h * w) = states[i]->data;
  }
  return t;
}

ActionMap action_map_of(const nn::Tensor<float>& out, int sample) {
  ActionMap m;
  m.height = out.height;
  m.width = out.width;
  m.values = out.data.middleCols(sample * out.plane(), out.plane());
  return m;
}

std::optional<double> dqn_update(nn::NetworkParams<float>& online, const nn::NetworkParams<float>& target,
                                 nn::OptimizerState<float>& optimizer, const ReplayBuffer& buffer,
                                 const TrainerConfig& cfg, Rng& rng) {
  const auto batch = buffer.sample(cfg.batch_size, rng);
  if (!batch) return std::nullopt;

  std::vector<const StateTensor*> states;
  std::vector<const StateTensor*> next;
  states.reserve(batch->size());
  next.reserve(batch->size());
  for (const Transition* t : *batch) {
    states.push_back(t->s.get());
    next.push_back(t->s_next.get());
  }
  const nn::Tensor<float> next_in = stack_states(next);
  const nn::Tensor<float> q_online = nn::forward(online, next_in);
  const nn::Tensor<float> q_target = nn::forward(target, next_in);

  std::vector<nn::Selection> sel(batch->size());
  std::vector<float> y(batch->size());
  for (std::size_t i = 0; i < batch->size(); ++i) {
    const Transition& t = *(*batch)[i];
    const int idx = static_cast<int>(i);
    y[i] = static_cast<float>(td_target(t.r, t.done, action_map_of(q_online, idx), action_map_of(q_target, idx),
                                        cfg.gamma));
    sel[i] = {t.a.channel, t.a.row * t.s->width + t.a.col};
  }

  nn::Gradients<float> grads;
  const float value = nn::loss_and_grad<float>(online, stack_states(states), sel, y, grads);
  nn::sgd_step(online, optimizer, std::move(grads));
  return value;
}

}  // namespace blowbot
