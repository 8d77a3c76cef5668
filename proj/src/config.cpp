#include "blowbot/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace blowbot {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("bad value for '" + std::string(key) + "': '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw ConfigError("bad value for '" + std::string(key) + "': expected on/off, got '" + std::string(value) + "'");
}

std::vector<std::string_view> split_list(std::string_view value) {
  std::vector<std::string_view> out;
  while (!value.empty()) {
    const auto comma = value.find(',');
    const std::string_view item = trim(value.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return out;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string to_string(Preset p) { return p == Preset::Desk ? "desk" : "paper"; }
std::string to_string(PolicyKind p) { return p == PolicyKind::Learned ? "learned" : "random"; }

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "env") {
    const auto kind = parse_env_kind(value);
    if (!kind) throw ConfigError("unknown env '" + std::string(value) + "'");
    cfg.env = *kind;
  } else if (key == "robot") {
    const auto v = parse_robot_variant(value);
    if (!v) throw ConfigError("unknown robot '" + std::string(value) + "'");
    cfg.robot = *v;
  } else if (key == "levels") {
    cfg.levels = parse_number<int>(key, value);
  } else if (key == "k") {
    cfg.k = parse_number<int>(key, value);
  } else if (key == "blow_force") {
    cfg.blow_force = parse_number<double>(key, value);
  } else if (key == "reward_accumulation") {
    cfg.reward_accumulation = parse_bool(key, value);
  } else if (key == "collision_penalty") {
    if (value == "auto") {
      cfg.collision_penalty.reset();
    } else {
      cfg.collision_penalty = parse_bool(key, value);
    }
  } else if (key == "preset") {
    if (value == "desk") {
      cfg.preset = Preset::Desk;
    } else if (value == "paper") {
      cfg.preset = Preset::Paper;
    } else {
      throw ConfigError("unknown preset '" + std::string(value) + "' (desk|paper)");
    }
  } else if (key == "seeds") {
    cfg.seeds.clear();
    for (std::string_view s : split_list(value)) cfg.seeds.push_back(parse_number<std::uint64_t>(key, s));
    if (cfg.seeds.empty()) throw ConfigError("seeds must list at least one seed");
  } else if (key == "out") {
    cfg.out = std::string(value);
  } else if (key == "policy") {
    if (value == "learned") {
      cfg.policy = PolicyKind::Learned;
    } else if (value == "random") {
      cfg.policy = PolicyKind::Random;
    } else {
      throw ConfigError("unknown policy '" + std::string(value) + "' (learned|random)");
    }
  } else if (key == "iterations") {
    cfg.iterations = parse_number<std::int64_t>(key, value);
  } else if (key == "batch_size") {
    cfg.batch_size = parse_number<int>(key, value);
  } else if (key == "buffer_size") {
    cfg.buffer_size = parse_number<int>(key, value);
  } else if (key == "target_update") {
    cfg.target_update = parse_number<std::int64_t>(key, value);
  } else if (key == "crop_size") {
    cfg.crop_size = parse_number<int>(key, value);
  } else if (key == "net_width") {
    cfg.net_width = parse_number<int>(key, value);
  } else if (key == "num_objects") {
    cfg.num_objects = parse_number<int>(key, value);
  } else if (key == "eval_episodes") {
    cfg.eval_episodes = parse_number<int>(key, value);
  } else if (key == "eval_max_steps") {
    cfg.eval_max_steps = parse_number<int>(key, value);
  } else if (key == "sweep_axis") {
    cfg.sweep_axis = std::string(value);
  } else if (key == "sweep_values") {
    cfg.sweep_values.clear();
    for (std::string_view s : split_list(value)) cfg.sweep_values.emplace_back(s);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      set_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_text(const RunConfig& cfg) {
  std::ostringstream os;
  os << "env = " << to_string(cfg.env) << "\n";
  os << "robot = " << to_string(cfg.robot) << "\n";
  os << "levels = " << cfg.levels << "\n";
  os << "k = " << cfg.k << "\n";
  os << "blow_force = " << fmt_double(cfg.blow_force) << "\n";
  os << "reward_accumulation = " << (cfg.reward_accumulation ? "on" : "off") << "\n";
  os << "collision_penalty = " << (cfg.collision_penalty ? (*cfg.collision_penalty ? "on" : "off") : "auto") << "\n";
  os << "preset = " << to_string(cfg.preset) << "\n";
  os << "seeds = ";
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) os << (i ? "," : "") << cfg.seeds[i];
  os << "\n";
  os << "out = " << cfg.out << "\n";
  os << "policy = " << to_string(cfg.policy) << "\n";
  auto opt = [&](const char* key, const auto& v) {
    if (v) os << key << " = " << *v << "\n";
  };
  opt("iterations", cfg.iterations);
  opt("batch_size", cfg.batch_size);
  opt("buffer_size", cfg.buffer_size);
  opt("target_update", cfg.target_update);
  opt("crop_size", cfg.crop_size);
  opt("net_width", cfg.net_width);
  opt("num_objects", cfg.num_objects);
  opt("eval_episodes", cfg.eval_episodes);
  opt("eval_max_steps", cfg.eval_max_steps);
  if (!cfg.sweep_axis.empty()) {
    os << "sweep_axis = " << cfg.sweep_axis << "\n";
    os << "sweep_values = ";
    for (std::size_t i = 0; i < cfg.sweep_values.size(); ++i) os << (i ? "," : "") << cfg.sweep_values[i];
    os << "\n";
  }
  return os.str();
}

ResolvedConfig resolve(const RunConfig& cfg) {
  ResolvedConfig r;
  r.config = cfg;
  const bool desk = cfg.preset == Preset::Desk;
  const bool pushing = cfg.robot == RobotVariant::Pushing;

  r.schedule = LevelSchedule{cfg.levels, cfg.k};
  r.schedule.validate();
  r.reward_mode = cfg.reward_accumulation ? RewardMode::Accumulate : RewardMode::OwnStepOnly;

  if (pushing && cfg.collision_penalty.value_or(false)) {
    throw ConfigError("the pushing robot runs without the collision penalty; drop collision_penalty = on");
  }
  if (cfg.blow_force < 0.0) throw ConfigError("blow_force must be non-negative");

  r.env = build_env(cfg.env);
  const int default_objects = desk ? (cfg.env == EnvKind::SmallEmpty ? 10 : 20) : r.env.initial_object_count;
  r.env.initial_object_count = cfg.num_objects.value_or(default_objects);
  if (r.env.initial_object_count < 1) throw ConfigError("num_objects must be positive");

  r.physics.blow_force = pushing ? 0.0 : cfg.blow_force;
  r.physics.mount = blower_mount(cfg.robot);

  r.reward.collision_penalty_enabled = pushing ? false : cfg.collision_penalty.value_or(true);

  const std::int64_t base_iterations = cfg.iterations.value_or(desk ? 2000 : 20000);
  if (base_iterations < 1) throw ConfigError("iterations must be positive");
  r.trainer.total_iterations = pushing ? 3 * base_iterations : base_iterations;
  r.trainer.batch_size = static_cast<std::size_t>(cfg.batch_size.value_or(desk ? 16 : 32));
  r.trainer.buffer_size = static_cast<std::size_t>(cfg.buffer_size.value_or(desk ? 2000 : 10000));
  if (r.trainer.batch_size < 1 || r.trainer.buffer_size < r.trainer.batch_size) {
    throw ConfigError("need 1 <= batch_size <= buffer_size");
  }
  r.trainer.target_update = cfg.target_update.value_or(1000);
  if (r.trainer.target_update < 1) throw ConfigError("target_update must be positive");
  r.epsilon.total_iterations = r.trainer.total_iterations;

  const int crop = cfg.crop_size.value_or(desk ? 48 : 96);
  const int width = cfg.net_width.value_or(16);
  r.arch = nn::Architecture::reference(num_channels(cfg.robot), StateTensor::kChannels, width);
  if (crop < r.arch.size_multiple() || crop % r.arch.size_multiple() != 0) {
    throw ConfigError("crop_size must be a positive multiple of " + std::to_string(r.arch.size_multiple()));
  }

  r.geom = GridGeometry::for_env(r.env);
  r.ego.crop_size = crop;
  r.ego.robot_radius = r.physics.robot_radius;
  r.ego.normalization = r.env.diagonal();
  r.primitive.crop_size = crop;
  r.primitive.robot_radius = r.physics.robot_radius;

  r.eval_episodes = cfg.eval_episodes.value_or(20);
  r.eval_max_steps = cfg.eval_max_steps.value_or(desk ? 100 : 500);
  if (r.eval_episodes < 1 || r.eval_max_steps < 1) throw ConfigError("eval_episodes and eval_max_steps must be positive");

  r.train_interval = cfg.levels == 1 ? 4 : r.schedule.cycle_length();
  r.prefill_steps = r.trainer.total_iterations * r.train_interval / 40;

  if (cfg.seeds.empty()) throw ConfigError("seeds must list at least one seed");
  return r;
}

}  // namespace blowbot
