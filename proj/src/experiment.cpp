#include "blowbot/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace blowbot {
namespace fs = std::filesystem;

AgentWorld::AgentWorld(const ResolvedConfig& cfg, std::uint64_t world_seed)
    : cfg_(&cfg),
      world_(reset(cfg.env, world_seed, cfg.physics)),
      maps_(GlobalMaps::blank(cfg.geom)),
      receptacle_(receptacle_cells(cfg.env, cfg.geom)) {
  trajectory_.push_back(world_.robot.position());
}

StatePtr AgentWorld::observe() {
  fuse(maps_, sense(world_, cfg_->geom, cfg_->sensor));
  return std::make_shared<const StateTensor>(egocentric_state(maps_, world_.robot, receptacle_, cfg_->ego));
}

Primitive AgentWorld::primitive_for(Action& action) const {
  action.world_target = action_target(action, world_.robot, cfg_->geom, cfg_->primitive.crop_size);
  return to_primitive(action, world_.robot, maps_, cfg_->config.robot, cfg_->primitive);
}

EpisodeStep AgentWorld::act(const Primitive& primitive) {
  EpisodeStep step = step_episode(world_, primitive, episode_, cfg_->reward);
  trajectory_.push_back(world_.robot.position());
  return step;
}

Action choose_action(const nn::NetworkParams<float>* net, const StateTensor& s, int channels, double eps, Rng& rng) {
  if (net == nullptr || uniform01(rng) < eps) return random_action(channels, s.height, s.width, rng);
  const StateTensor* ptr = &s;
  return decode(action_map_of(nn::forward(*net, stack_states(std::span<const StateTensor* const>(&ptr, 1))), 0));
}

TrainResult train_agent(const ResolvedConfig& cfg, std::uint64_t seed, const ProgressFn& progress) {
  Rng init_rng(derive_seed(seed, kStreamNetInit));
  MultiFreqRuntime rt(cfg.schedule, cfg.reward_mode, cfg.trainer, cfg.arch, init_rng);
  Rng policy_rng(derive_seed(seed, kStreamTrainPolicy, 0));
  Rng replay_rng(derive_seed(seed, kStreamTrainPolicy, 1));

  const std::vector<int> cycle = cfg.schedule.cycle();
  const int channels = cfg.arch.output_channels();
  const std::int64_t total = cfg.trainer.total_iterations;

  TrainResult result;
  int episode_index = 0;
  while (rt.iteration() < total) {
    AgentWorld agent(cfg, derive_seed(seed, kStreamTrainWorld, static_cast<std::uint64_t>(episode_index)));
    StatePtr s = agent.observe();
    EpisodeRecord record{episode_index, 0, 0, 0, 0.0};
    for (std::size_t pos = 0;; ++pos) {
      const int level = cycle[pos % cycle.size()];
      rt.close_spans(level, s);
      const double eps = result.env_steps < cfg.prefill_steps ? 1.0 : epsilon(rt.iteration(), cfg.epsilon);
      Action a = choose_action(&rt.level(level).online, *s, channels, eps, policy_rng);
      const Primitive primitive = agent.primitive_for(a);
      rt.record_step(level, s, a);
      const EpisodeStep step = agent.act(primitive);
      rt.accumulate_reward(step.reward);
      ++result.env_steps;
      record.total_reward += step.reward;

      s = agent.observe();
      if (step.done) rt.flush(s);

      const std::int64_t trained_steps = result.env_steps - cfg.prefill_steps;
      if (trained_steps > 0 && trained_steps % cfg.train_interval == 0) {
        const double eps_now = epsilon(rt.iteration(), cfg.epsilon);
        const auto losses = rt.train_tick(replay_rng);
        for (int j = 0; j < static_cast<int>(losses.size()); ++j) {
          if (losses[j]) result.log.push_back({rt.iteration(), j, *losses[j], eps_now, result.env_steps});
        }
        if (progress) progress(rt.iteration(), total);
      }
      if (step.done || rt.iteration() >= total) break;
    }
    record.env_steps = result.env_steps;
    record.steps = agent.episode().total_steps;
    record.objects = agent.episode().objects_collected;
    result.episodes.push_back(record);
    ++episode_index;
  }
  for (int j = 0; j < rt.levels(); ++j) result.nets.push_back(rt.level(j).online);
  return result;
}

EvalResult evaluate_policy(const ResolvedConfig& cfg, std::span<const nn::NetworkParams<float>> nets,
                           std::uint64_t seed) {
  if (!nets.empty() && static_cast<int>(nets.size()) != cfg.schedule.levels) {
    throw ConfigError("evaluate: expected " + std::to_string(cfg.schedule.levels) + " networks, got " +
                      std::to_string(nets.size()));
  }
  const std::vector<int> cycle = cfg.schedule.cycle();
  const int channels = cfg.arch.output_channels();

  EvalResult ev;
  ev.seed = seed;
  ev.initial_objects = cfg.env.initial_object_count;
  ev.budget = cfg.eval_max_steps;
  ev.channel_counts.assign(static_cast<std::size_t>(cfg.schedule.levels),
                           std::vector<std::int64_t>(static_cast<std::size_t>(channels), 0));
  Rng policy_rng(derive_seed(seed, kStreamEvalPolicy));

  for (int e = 0; e < cfg.eval_episodes; ++e) {
    AgentWorld agent(cfg, derive_seed(seed, kStreamEvalWorld, static_cast<std::uint64_t>(e)));
    EpisodeCurve curve{e, {0}};
    for (std::size_t pos = 0; !agent.episode().done && agent.episode().total_steps < cfg.eval_max_steps; ++pos) {
      const StatePtr s = agent.observe();
      const int level = cycle[pos % cycle.size()];
      const nn::NetworkParams<float>* net = nets.empty() ? nullptr : &nets[static_cast<std::size_t>(level)];
      Action a = choose_action(net, *s, channels, 0.0, policy_rng);
      ++ev.channel_counts[static_cast<std::size_t>(level)][static_cast<std::size_t>(a.channel)];
      agent.act(agent.primitive_for(a));
      curve.objects.push_back(agent.episode().objects_collected);
    }
    if (e == 0) {
      agent.observe();
      ev.final_maps = agent.maps();
      ev.trajectory = agent.trajectory();
    }
    ev.episodes.push_back(std::move(curve));
  }
  return ev;
}

double objects_at(const EpisodeCurve& curve, int budget) {
  if (curve.objects.empty()) return 0.0;
  const std::size_t idx = std::min(static_cast<std::size_t>(std::max(budget, 0)), curve.objects.size() - 1);
  return curve.objects[idx];
}

double mean_objects_at(const EvalResult& eval, int budget) {
  if (eval.episodes.empty()) return 0.0;
  double total = 0.0;
  for (const EpisodeCurve& c : eval.episodes) total += objects_at(c, budget);
  return total / static_cast<double>(eval.episodes.size());
}

std::vector<double> mean_curve(const EvalResult& eval) {
  std::vector<double> out(static_cast<std::size_t>(eval.budget) + 1, 0.0);
  if (eval.episodes.empty()) return out;
  for (int t = 0; t <= eval.budget; ++t) out[static_cast<std::size_t>(t)] = mean_objects_at(eval, t);
  return out;
}

int steps_to_fraction(const EvalResult& eval, double fraction) {
  const std::vector<double> curve = mean_curve(eval);
  const double goal = fraction * eval.initial_objects;
  for (std::size_t t = 0; t < curve.size(); ++t) {
    if (curve[t] >= goal) return static_cast<int>(t);
  }
  return eval.budget + 1;
}

std::vector<std::vector<double>> channel_fractions(const EvalResult& eval) {
  std::vector<std::vector<double>> out;
  for (const auto& counts : eval.channel_counts) {
    const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}));
    std::vector<double> row;
    for (std::int64_t c : counts) row.push_back(total > 0 ? static_cast<double>(c) / total : 0.0);
    out.push_back(std::move(row));
  }
  return out;
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var / n)};
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

fs::path seed_dir(const fs::path& out, std::uint64_t seed) { return out / ("seed_" + std::to_string(seed)); }

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

fs::path checkpoint_path(const fs::path& dir, int level) { return dir / ("level" + std::to_string(level) + ".ckpt"); }

}  // namespace

void write_run_config(const fs::path& dir, const RunConfig& cfg) { open_out(dir / "config.txt") << to_text(cfg); }

void save_policy(const fs::path& dir, std::span<const nn::NetworkParams<float>> nets) {
  fs::create_directories(dir);
  for (std::size_t j = 0; j < nets.size(); ++j) {
    nn::save_checkpoint(checkpoint_path(dir, static_cast<int>(j)), nets[j], static_cast<std::uint32_t>(j));
  }
}

std::vector<nn::NetworkParams<float>> load_policy(const fs::path& dir, const ResolvedConfig& cfg) {
  std::vector<nn::NetworkParams<float>> nets;
  for (int j = 0; j < cfg.schedule.levels; ++j) {
    const fs::path path = checkpoint_path(dir, j);
    if (!fs::exists(path)) throw ConfigError("missing checkpoint " + path.string());
    nn::Checkpoint ckpt = nn::load_checkpoint(path);
    if (ckpt.level != static_cast<std::uint32_t>(j)) {
      throw ConfigError(path.string() + ": header says level " + std::to_string(ckpt.level));
    }
    const std::string diff = nn::architecture_diff(cfg.arch, ckpt.params.arch);
    if (!diff.empty()) throw ConfigError(path.string() + " does not match the config:\n" + diff);
    nets.push_back(std::move(ckpt.params));
  }
  return nets;
}

void write_train_log(const fs::path& path, std::span<const TrainLogRow> rows) {
  std::ofstream out = open_out(path);
  out << "iteration,level,loss,epsilon,env_steps\n";
  for (const TrainLogRow& r : rows) {
    out << r.iteration << ',' << r.level << ',' << fmt(r.loss) << ',' << fmt(r.epsilon) << ',' << r.env_steps << '\n';
  }
}

void write_train_episodes(const fs::path& path, std::span<const EpisodeRecord> rows) {
  std::ofstream out = open_out(path);
  out << "episode,env_steps,steps,objects,return\n";
  for (const EpisodeRecord& r : rows) {
    out << r.episode << ',' << r.env_steps << ',' << r.steps << ',' << r.objects << ',' << fmt(r.total_reward) << '\n';
  }
}

void write_eval_curve(const fs::path& path, const EvalResult& eval) {
  std::ofstream out = open_out(path);
  out << "seed,episode,step,objects\n";
  for (const EpisodeCurve& c : eval.episodes) {
    for (std::size_t t = 0; t < c.objects.size(); ++t) {
      out << eval.seed << ',' << c.episode << ',' << t << ',' << c.objects[t] << '\n';
    }
  }
}

void write_eval_summary(const fs::path& path, const EvalResult& eval) {
  std::vector<double> finals;
  for (const EpisodeCurve& c : eval.episodes) finals.push_back(objects_at(c, eval.budget));
  const MeanStd ms = mean_std(finals);
  std::ofstream out = open_out(path);
  out << "seed,episodes,budget,initial_objects,mean,std\n";
  out << eval.seed << ',' << eval.episodes.size() << ',' << eval.budget << ',' << eval.initial_objects << ','
      << fmt(ms.mean) << ',' << fmt(ms.stddev) << '\n';
}

void write_stats(const fs::path& path, const EvalResult& eval) {
  const auto fractions = channel_fractions(eval);
  std::ofstream out = open_out(path);
  out << "level,channel,count,fraction\n";
  for (std::size_t j = 0; j < fractions.size(); ++j) {
    for (std::size_t c = 0; c < fractions[j].size(); ++c) {
      out << j << ',' << c << ',' << eval.channel_counts[j][c] << ',' << fmt(fractions[j][c]) << '\n';
    }
  }
}

void write_pgm(const fs::path& path, const Eigen::ArrayXXf& image) {
  std::ofstream out = open_out(path);
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  for (Eigen::Index r = image.rows() - 1; r >= 0; --r) {
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      const float v = std::clamp(image(r, c), 0.0f, 1.0f);
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0f))));
    }
  }
}

void write_debug_maps(const fs::path& dir, const EvalResult& eval) {
  if (!eval.final_maps) return;
  const GlobalMaps& maps = *eval.final_maps;
  const GridGeometry& g = maps.geom;
  Eigen::ArrayXXf overhead(g.rows, g.cols);
  Eigen::ArrayXXf occupancy(g.rows, g.cols);
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      overhead(r, c) = overhead_value(maps.overhead(r, c));
      const Occupancy o = maps.occupancy(r, c);
      occupancy(r, c) = o == Occupancy::Free ? 1.0f : (o == Occupancy::Occupied ? 0.0f : 0.5f);
    }
  }
  Eigen::ArrayXXf path = 0.4f * overhead;
  for (std::size_t i = 1; i < eval.trajectory.size(); ++i) {
    const Vec2 a = eval.trajectory[i - 1];
    const Vec2 b = eval.trajectory[i];
    const int samples = 1 + static_cast<int>(std::ceil(4.0 * (b - a).norm() / g.resolution));
    for (int s = 0; s <= samples; ++s) {
      const Cell cell = g.cell_of(a + (b - a) * (static_cast<double>(s) / samples));
      if (g.in_bounds(cell)) path(cell.row, cell.col) = 1.0f;
    }
  }
  write_pgm(dir / "overhead.pgm", overhead);
  write_pgm(dir / "occupancy.pgm", occupancy);
  write_pgm(dir / "trajectory.pgm", path);
}

TrainResult train_run(const ResolvedConfig& cfg, std::uint64_t seed, const fs::path& out, const ProgressFn& progress) {
  if (cfg.config.policy == PolicyKind::Random) throw ConfigError("policy = random has nothing to train");
  const fs::path dir = seed_dir(out, seed);
  RunConfig snapshot = cfg.config;
  snapshot.seeds = {seed};
  snapshot.out = out.string();
  snapshot.sweep_axis.clear();
  snapshot.sweep_values.clear();
  write_run_config(dir, snapshot);

  TrainResult result = train_agent(cfg, seed, progress);
  save_policy(dir, result.nets);
  write_train_log(dir / "train_log.csv", result.log);
  write_train_episodes(dir / "train_episodes.csv", result.episodes);
  return result;
}

EvalResult eval_run(const ResolvedConfig& cfg, std::uint64_t seed, const fs::path& out, bool debug_maps) {
  const fs::path dir = seed_dir(out, seed);
  std::vector<nn::NetworkParams<float>> nets;
  if (cfg.config.policy == PolicyKind::Learned) {
    nets = load_policy(dir, cfg);
  } else {
    RunConfig snapshot = cfg.config;
    snapshot.seeds = {seed};
    snapshot.out = out.string();
    write_run_config(dir, snapshot);
  }
  EvalResult ev = evaluate_policy(cfg, nets, seed);
  write_eval_curve(dir / "eval_curve.csv", ev);
  write_eval_summary(dir / "eval_summary.csv", ev);
  write_stats(dir / "stats.csv", ev);
  if (debug_maps) write_debug_maps(dir / "maps", ev);
  return ev;
}

EvalResult run_seed(const ResolvedConfig& cfg, std::uint64_t seed, const fs::path& out, bool debug_maps,
                    const ProgressFn& progress) {
  if (cfg.config.policy == PolicyKind::Learned) train_run(cfg, seed, out, progress);
  return eval_run(cfg, seed, out, debug_maps);
}

std::vector<SweepRow> sweep(const RunConfig& base, const fs::path& out, const ProgressFn& progress) {
  if (base.sweep_axis.empty() || base.sweep_values.empty()) {
    throw ConfigError("sweep needs sweep_axis and sweep_values");
  }
  if (base.sweep_axis == "seeds" || base.sweep_axis == "out" || base.sweep_axis.starts_with("sweep_")) {
    throw ConfigError("cannot sweep over '" + base.sweep_axis + "'");
  }
  // Validate every point before spending time on any of them.
  std::vector<ResolvedConfig> points;
  for (const std::string& value : base.sweep_values) {
    RunConfig c = base;
    c.sweep_axis.clear();
    c.sweep_values.clear();
    set_config_value(c, base.sweep_axis, value);
    points.push_back(resolve(c));
  }

  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const fs::path point_dir = out / (base.sweep_axis + "_" + base.sweep_values[i]);
    std::vector<double> per_seed;
    for (std::uint64_t seed : points[i].config.seeds) {
      const EvalResult ev = run_seed(points[i], seed, point_dir, false, progress);
      per_seed.push_back(mean_objects_at(ev, ev.budget));
    }
    rows.push_back({base.sweep_values[i], mean_std(per_seed), per_seed.size()});
  }

  std::ofstream csv = open_out(out / "sweep_summary.csv");
  csv << "axis_value,mean,std,seeds\n";
  for (const SweepRow& r : rows) {
    csv << r.axis_value << ',' << fmt(r.objects.mean) << ',' << fmt(r.objects.stddev) << ',' << r.seeds << '\n';
  }
  return rows;
}

}  // namespace blowbot
