// blowbot: train, evaluate and sweep blowing / pushing agents.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "blowbot/experiment.hpp"

using namespace blowbot;

namespace {

struct CommonArgs {
  std::string config;
  std::vector<std::uint64_t> seeds;
  std::string out;
  std::string preset;
  std::vector<std::string> overrides;
  bool debug_maps = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "Run config file (key = value lines)");
  cmd->add_option("--seed", args.seeds, "Seed(s); overrides the config's seeds");
  cmd->add_option("--out", args.out, "Output directory; overrides the config's out");
  cmd->add_option("--preset", args.preset, "Scale preset")->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--set", args.overrides, "Extra key=value assignments, applied after the config file");
  cmd->add_flag("--debug-maps", args.debug_maps, "Dump maps and trajectory of the first eval episode as PGM");
  cmd->add_flag("-q,--quiet", args.quiet, "No progress output");
}

RunConfig build_config(const CommonArgs& args) {
  RunConfig cfg = args.config.empty() ? RunConfig{} : load_config(args.config);
  for (const std::string& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!args.preset.empty()) set_config_value(cfg, "preset", args.preset);
  if (!args.seeds.empty()) cfg.seeds = args.seeds;
  if (!args.out.empty()) cfg.out = args.out;
  return cfg;
}

ProgressFn progress_printer(bool quiet, const std::string& label) {
  if (quiet) return {};
  return [label](std::int64_t it, std::int64_t total) {
    if (it % 100 == 0 || it == total) std::fprintf(stderr, "\r%s: iteration %lld/%lld", label.c_str(),
                                                   static_cast<long long>(it), static_cast<long long>(total));
    if (it == total) std::fprintf(stderr, "\n");
  };
}

void print_summary(const EvalResult& ev) {
  std::vector<double> finals;
  for (const EpisodeCurve& c : ev.episodes) finals.push_back(objects_at(c, ev.budget));
  const MeanStd ms = mean_std(finals);
  std::printf("seed %llu: %.2f +- %.2f of %d objects within %d steps (%zu episodes)\n",
              static_cast<unsigned long long>(ev.seed), ms.mean, ms.stddev, ev.initial_objects, ev.budget,
              ev.episodes.size());
}

int cmd_train(const CommonArgs& args) {
  const ResolvedConfig cfg = resolve(build_config(args));
  write_run_config(cfg.config.out, cfg.config);
  for (std::uint64_t seed : cfg.config.seeds) {
    const TrainResult r = train_run(cfg, seed, cfg.config.out, progress_printer(args.quiet, "seed " + std::to_string(seed)));
    std::printf("seed %llu: %lld env steps, %zu episodes -> %s\n", static_cast<unsigned long long>(seed),
                static_cast<long long>(r.env_steps), r.episodes.size(), seed_dir(cfg.config.out, seed).c_str());
  }
  return 0;
}

int cmd_eval(const CommonArgs& args) {
  const ResolvedConfig cfg = resolve(build_config(args));
  std::vector<double> per_seed;
  for (std::uint64_t seed : cfg.config.seeds) {
    const EvalResult ev = eval_run(cfg, seed, cfg.config.out, args.debug_maps);
    print_summary(ev);
    per_seed.push_back(mean_objects_at(ev, ev.budget));
  }
  const MeanStd ms = mean_std(per_seed);
  std::printf("across %zu seeds: %.2f +- %.2f\n", per_seed.size(), ms.mean, ms.stddev);
  return 0;
}

int cmd_stats(const CommonArgs& args) {
  const ResolvedConfig cfg = resolve(build_config(args));
  if (cfg.schedule.levels < 2) throw ConfigError("stats needs a multi-level policy (levels >= 2)");
  for (std::uint64_t seed : cfg.config.seeds) {
    const EvalResult ev = eval_run(cfg, seed, cfg.config.out, args.debug_maps);
    const auto fr = channel_fractions(ev);
    std::printf("seed %llu\n", static_cast<unsigned long long>(seed));
    for (std::size_t j = 0; j < fr.size(); ++j) {
      std::printf("  level %zu:", j);
      for (std::size_t c = 0; c < fr[j].size(); ++c) std::printf(" channel %zu %.1f%%", c, 100.0 * fr[j][c]);
      std::printf("\n");
    }
  }
  return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& axis, const std::vector<std::string>& values) {
  RunConfig cfg = build_config(args);
  if (!axis.empty()) cfg.sweep_axis = axis;
  if (!values.empty()) cfg.sweep_values = values;
  const auto rows = sweep(cfg, cfg.out, progress_printer(args.quiet, "sweep"));
  std::printf("%-16s %10s %10s %6s\n", cfg.sweep_axis.c_str(), "mean", "std", "seeds");
  for (const SweepRow& r : rows) {
    std::printf("%-16s %10.2f %10.2f %6zu\n", r.axis_value.c_str(), r.objects.mean, r.objects.stddev, r.seeds);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blowing-robot multi-frequency DQN experiments"};
  app.require_subcommand(1);

  CommonArgs train_args, eval_args, stats_args, sweep_args;
  std::string axis;
  std::vector<std::string> values;

  auto* train = app.add_subcommand("train", "Train one policy per seed and write checkpoints and logs");
  add_common(train, train_args);
  auto* eval = app.add_subcommand("eval", "Evaluate checkpoints (or the random policy) and write curves");
  add_common(eval, eval_args);
  auto* stats = app.add_subcommand("stats", "Per-level action channel fractions of a multi-level policy");
  add_common(stats, stats_args);
  auto* sw = app.add_subcommand("sweep", "Train and evaluate along one config axis");
  add_common(sw, sweep_args);
  sw->add_option("--axis", axis, "Config key to vary");
  sw->add_option("--values", values, "Values of the axis")->delimiter(',');

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train) return cmd_train(train_args);
    if (*eval) return cmd_eval(eval_args);
    if (*stats) return cmd_stats(stats_args);
    if (*sw) return cmd_sweep(sweep_args, axis, values);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
