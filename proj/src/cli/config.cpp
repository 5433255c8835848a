#include "slotzero/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace sz::cli {

namespace {

using trainer::RunConfig;

std::string where(const YAML::Node& node) {
  const auto mark = node.Mark();
  if (mark.line < 0) return "";
  return " (line " + std::to_string(mark.line + 1) + ")";
}

template <class T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError("config: '" + key + "' must be a scalar" + where(node));
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config: cannot read '" + key + "' from '" + node.Scalar() + "'" + where(node));
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

struct Field {
  std::string section;  // empty for top-level keys
  std::string key;
  std::function<void(RunConfig&, const YAML::Node&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;

  std::string dotted() const { return section.empty() ? key : section + "." + key; }
};

template <class T, class Member>
Field number(std::string section, std::string key, Member member) {
  Field f;
  f.section = std::move(section);
  f.key = std::move(key);
  f.set = [member](RunConfig& c, const YAML::Node& n, const std::string& name) {
    member(c) = scalar<T>(n, name);
  };
  f.get = [member](const RunConfig& c) {
    auto& mut = const_cast<RunConfig&>(c);
    if constexpr (std::is_same_v<T, double>) {
      return format_double(member(mut));
    } else if constexpr (std::is_same_v<T, bool>) {
      return std::string(member(mut) ? "true" : "false");
    } else {
      return std::to_string(member(mut));
    }
  };
  return f;
}

template <class E, class Member>
Field choice(std::string section, std::string key, Member member,
             std::vector<std::pair<std::string, E>> names) {
  Field f;
  f.section = std::move(section);
  f.key = std::move(key);
  f.set = [member, names](RunConfig& c, const YAML::Node& n, const std::string& name) {
    const auto text = scalar<std::string>(n, name);
    for (const auto& [label, value] : names) {
      if (label == text) {
        member(c) = value;
        return;
      }
    }
    std::string options;
    for (const auto& [label, value] : names) options += (options.empty() ? "" : ", ") + label;
    throw ConfigError("config: '" + name + "' must be one of " + options + where(n));
  };
  f.get = [member, names](const RunConfig& c) {
    const E v = member(const_cast<RunConfig&>(c));
    for (const auto& [label, value] : names) {
      if (value == v) return label;
    }
    return std::string();
  };
  return f;
}

#define SZ_REF(expr) [](RunConfig& c) -> auto& { return expr; }

const std::vector<Field>& fields() {
  static const std::vector<Field> all = [] {
    using env::RewardMode;
    using env::Variant;
    std::vector<Field> f;
    f.push_back(number<std::uint64_t>("", "seed", SZ_REF(c.seed)));
    {
      Field out;
      out.key = "output_dir";
      out.set = [](RunConfig& c, const YAML::Node& n, const std::string& name) {
        c.output_dir = scalar<std::string>(n, name);
      };
      out.get = [](const RunConfig& c) { return c.output_dir; };
      f.push_back(out);
    }
    f.push_back(choice<Variant>("env", "variant", SZ_REF(c.env.variant),
                                {{"discrete", Variant::discrete}, {"continuous", Variant::continuous}}));
    f.push_back(number<int>("env", "grid_size", SZ_REF(c.env.grid_size)));
    f.push_back(number<int>("env", "num_objects", SZ_REF(c.env.num_objects)));
    f.push_back(number<int>("env", "horizon", SZ_REF(c.env.horizon)));
    f.push_back(choice<RewardMode>("env", "reward_mode", SZ_REF(c.env.reward_mode),
                                   {{"sparse", RewardMode::sparse}, {"shaped", RewardMode::shaped}}));
    f.push_back(number<double>("env", "contact_radius", SZ_REF(c.env.contact_radius)));
    f.push_back(number<double>("env", "max_delta", SZ_REF(c.env.max_delta)));
    f.push_back(number<double>("env", "shaped_scale", SZ_REF(c.env.shaped_scale)));
    f.push_back(number<double>("env", "min_separation", SZ_REF(c.env.min_separation)));
    f.push_back(choice<slots::PermutationMode>(
        "env", "slot_permutation", SZ_REF(c.slots.permutation),
        {{"identity", slots::PermutationMode::identity},
         {"random_per_episode", slots::PermutationMode::random_per_episode}}));
    f.push_back(number<double>("env", "slot_noise", SZ_REF(c.slots.noise_sigma)));

    f.push_back(number<int>("model", "slot_dim", SZ_REF(c.model.slot_dim)));
    f.push_back(number<int>("model", "hidden", SZ_REF(c.model.hidden)));
    f.push_back(number<int>("model", "action_embed", SZ_REF(c.model.action_embed)));
    f.push_back(number<bool>("model", "residual_dynamics", SZ_REF(c.model.residual_dynamics)));

    f.push_back(number<int>("planner", "simulations", SZ_REF(c.planner.simulations)));
    f.push_back(number<int>("planner", "num_candidates", SZ_REF(c.planner.num_candidates)));
    f.push_back(number<int>("planner", "depth_cap", SZ_REF(c.planner.depth_cap)));
    f.push_back(number<double>("planner", "beta", SZ_REF(c.planner.beta)));
    f.push_back(number<double>("planner", "epsilon", SZ_REF(c.planner.epsilon)));
    f.push_back(number<double>("planner", "c_visit", SZ_REF(c.planner.c_visit)));
    f.push_back(number<double>("planner", "c_scale", SZ_REF(c.planner.c_scale)));

    f.push_back(number<double>("trainer", "lambda_reward", SZ_REF(c.trainer.lambda_reward)));
    f.push_back(number<double>("trainer", "lambda_policy", SZ_REF(c.trainer.lambda_policy)));
    f.push_back(number<double>("trainer", "lambda_value", SZ_REF(c.trainer.lambda_value)));
    f.push_back(number<double>("trainer", "lambda_consistency", SZ_REF(c.trainer.lambda_consistency)));
    f.push_back(number<double>("trainer", "gamma", SZ_REF(c.trainer.gamma)));
    f.push_back(number<int>("trainer", "td_steps", SZ_REF(c.trainer.td_steps)));
    f.push_back(number<int>("trainer", "unroll_steps", SZ_REF(c.trainer.unroll_steps)));
    f.push_back(number<std::int64_t>("trainer", "t1", SZ_REF(c.trainer.t1)));
    f.push_back(number<std::int64_t>("trainer", "t2", SZ_REF(c.trainer.t2)));
    f.push_back(number<std::int64_t>("trainer", "buffer_capacity", SZ_REF(c.trainer.buffer_capacity)));
    f.push_back(number<double>("trainer", "learning_rate", SZ_REF(c.trainer.learning_rate)));
    f.push_back(number<double>("trainer", "adam_beta1", SZ_REF(c.trainer.adam_beta1)));
    f.push_back(number<double>("trainer", "adam_beta2", SZ_REF(c.trainer.adam_beta2)));
    f.push_back(number<double>("trainer", "adam_epsilon", SZ_REF(c.trainer.adam_epsilon)));
    f.push_back(number<double>("trainer", "max_grad_norm", SZ_REF(c.trainer.max_grad_norm)));
    f.push_back(number<int>("trainer", "batch_size", SZ_REF(c.trainer.batch_size)));
    f.push_back(number<double>("trainer", "train_ratio", SZ_REF(c.trainer.train_ratio)));
    f.push_back(number<std::int64_t>("trainer", "min_replay", SZ_REF(c.trainer.min_replay)));
    f.push_back(number<std::int64_t>("trainer", "total_env_steps", SZ_REF(c.trainer.total_env_steps)));
    f.push_back(number<std::int64_t>("trainer", "eval_interval", SZ_REF(c.trainer.eval_interval)));
    f.push_back(number<int>("trainer", "eval_episodes", SZ_REF(c.trainer.eval_episodes)));
    f.push_back(number<std::int64_t>("trainer", "checkpoint_interval", SZ_REF(c.trainer.checkpoint_interval)));
    f.push_back(number<double>("trainer", "stop_success", SZ_REF(c.trainer.stop_success)));
    f.push_back(choice<trainer::ConsistencyLoss>(
        "trainer", "consistency", SZ_REF(c.trainer.consistency),
        {{"mse", trainer::ConsistencyLoss::mse}, {"cosine", trainer::ConsistencyLoss::cosine}}));
    f.push_back(number<bool>("trainer", "absorbing_terminal", SZ_REF(c.trainer.absorbing_terminal)));
    return f;
  }();
  return all;
}

#undef SZ_REF

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields()) {
    if (f.section == section && f.key == key) return &f;
  }
  return nullptr;
}

bool is_section(const std::string& name) {
  return name == "env" || name == "model" || name == "planner" || name == "trainer";
}

RunConfig checked(RunConfig c) {
  try {
    return trainer::finalize(std::move(c));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.push_back(f.dotted());
  return out;
}

trainer::RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("config: parse error at line " + std::to_string(e.mark.line + 1) + ", column " +
                      std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  RunConfig c;
  if (root.IsNull()) return checked(c);
  if (!root.IsMap()) throw ConfigError("config: top level must be a mapping" + where(root));
  for (const auto& entry : root) {
    const auto name = entry.first.as<std::string>();
    if (is_section(name)) {
      if (entry.second.IsNull()) continue;
      if (!entry.second.IsMap()) throw ConfigError("config: section '" + name + "' must be a mapping" + where(entry.second));
      for (const auto& item : entry.second) {
        const auto key = item.first.as<std::string>();
        const Field* f = find_field(name, key);
        if (f == nullptr) throw ConfigError("config: unknown key '" + name + "." + key + "'" + where(item.first));
        f->set(c, item.second, name + "." + key);
      }
      continue;
    }
    const Field* f = find_field("", name);
    if (f == nullptr) throw ConfigError("config: unknown key '" + name + "'" + where(entry.first));
    f->set(c, entry.second, name);
  }
  return checked(c);
}

trainer::RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const trainer::RunConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      section = f.section;
      out << section << ":\n";
    }
    const std::string value = f.get(config);
    const bool quote = f.key == "output_dir";
    out << (f.section.empty() ? "" : "  ") << f.key << ": ";
    if (quote) {
      YAML::Emitter e;
      e << YAML::DoubleQuoted << value;
      out << e.c_str();
    } else {
      out << value;
    }
    out << "\n";
  }
  return out.str();
}

void apply_override(trainer::RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' must look like section.key=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  const auto dot = path.find('.');
  const std::string section = dot == std::string::npos ? "" : path.substr(0, dot);
  const std::string key = dot == std::string::npos ? path : path.substr(dot + 1);
  const Field* f = find_field(section, key);
  if (f == nullptr) throw ConfigError("override: unknown key '" + path + "'");
  YAML::Node node;
  try {
    node = YAML::Load(value);
  } catch (const YAML::Exception&) {
    node = YAML::Node(value);
  }
  if (node.IsNull()) node = YAML::Node(value);
  f->set(config, node, path);
  config = checked(config);
}

}  // namespace sz::cli
