#include "dirpg/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include "dirpg/envs/deep_sea.hpp"
#include "dirpg/errors.hpp"
#include "dirpg/graph.hpp"

namespace dirpg {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops an inline `# ...` or `; ...` comment preceded by whitespace.
std::string strip_comment(const std::string& s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if ((s[i] == '#' || s[i] == ';') && (s[i - 1] == ' ' || s[i - 1] == '\t')) return trim(s.substr(0, i));
  }
  return trim(s);
}

double to_double(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(field, "expected a finite number, got '" + text + "'");
  }
  return v;
}

std::uint64_t to_u64(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(field, "expected a nonnegative integer, got '" + text + "'");
  }
  return v;
}

int to_int(const std::string& field, const std::string& text) {
  const auto v = to_u64(field, text);
  if (v > 1'000'000'000ULL) throw ConfigError(field, "value too large");
  return static_cast<int>(v);
}

bool to_bool(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(field, "expected true or false, got '" + text + "'");
}

// "0,1,2" or "0..9" (inclusive) or a mix of both.
std::vector<std::uint64_t> to_seed_list(const std::string& field, const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) {
      if (const auto dots = item.find(".."); dots != std::string::npos) {
        const auto lo = to_u64(field, item.substr(0, dots));
        const auto hi = to_u64(field, item.substr(dots + 2));
        if (hi < lo || hi - lo > 100000) throw ConfigError(field, "bad seed range '" + item + "'");
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
      } else {
        out.push_back(to_u64(field, item));
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ConfigError(field, "seed list is empty");
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& field, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"experiment.algorithm", [](auto& c, auto& f, auto& v) {
         try {
           c.algorithm = parse_algorithm(trim(v));
         } catch (const std::invalid_argument& e) {
           throw ConfigError(f, e.what());
         }
       }},
      {"experiment.episodes", [](auto& c, auto& f, auto& v) { c.episodes = to_u64(f, v); }},
      {"experiment.seeds", [](auto& c, auto& f, auto& v) { c.seeds = to_seed_list(f, v); }},
      {"experiment.out_dir", [](auto& c, auto&, auto& v) { c.out_dir = trim(v); }},
      {"experiment.ma_window", [](auto& c, auto& f, auto& v) { c.ma_window = to_u64(f, v); }},
      {"experiment.report_every", [](auto& c, auto& f, auto& v) { c.report_every = to_u64(f, v); }},
      {"experiment.init_policy", [](auto& c, auto&, auto& v) { c.init_policy = trim(v); }},
      {"env.name", [](auto& c, auto&, auto& v) { c.env.name = trim(v); }},
      {"env.size", [](auto& c, auto& f, auto& v) { c.env.size = to_int(f, v); }},
      {"env.width", [](auto& c, auto& f, auto& v) { c.env.grid.width = to_int(f, v); }},
      {"env.rooms", [](auto& c, auto& f, auto& v) { c.env.grid.rooms = to_int(f, v); }},
      {"env.horizon", [](auto& c, auto& f, auto& v) { c.env.grid.horizon = to_int(f, v); }},
      {"env.layout_seed", [](auto& c, auto& f, auto& v) { c.env.grid.layout_seed = to_u64(f, v); }},
      {"env.door_reward", [](auto& c, auto& f, auto& v) { c.env.grid.door_reward = to_double(f, v); }},
      {"env.goal_reward", [](auto& c, auto& f, auto& v) { c.env.grid.goal_reward = to_double(f, v); }},
      {"env.graph", [](auto& c, auto&, auto& v) { c.env.graph_path = trim(v); }},
      {"env.vertices", [](auto& c, auto& f, auto& v) { c.env.graph_vertices = to_int(f, v); }},
      {"env.edge_prob", [](auto& c, auto& f, auto& v) { c.env.graph_edge_prob = to_double(f, v); }},
      {"env.graph_seed", [](auto& c, auto& f, auto& v) { c.env.graph_seed = to_u64(f, v); }},
      {"env.legality", [](auto& c, auto& f, auto& v) {
         const auto t = trim(v);
         if (t == "count") c.env.legality = LegalityRule::count;
         else if (t == "connectivity") c.env.legality = LegalityRule::connectivity;
         else throw ConfigError(f, "expected count or connectivity, got '" + t + "'");
       }},
      {"dirpg.epsilon", [](auto& c, auto& f, auto& v) { c.epsilon = to_double(f, v); }},
      {"dirpg.alpha", [](auto& c, auto& f, auto& v) { c.alpha = to_double(f, v); }},
      {"dirpg.priority", [](auto& c, auto& f, auto& v) {
         const auto t = trim(v);
         if (t == "gumbel_only") c.priority = PriorityMode::gumbel_only;
         else if (t == "direct_bound") c.priority = PriorityMode::direct_bound;
         else throw ConfigError(f, "expected gumbel_only or direct_bound, got '" + t + "'");
       }},
      {"dirpg.prune", [](auto& c, auto& f, auto& v) { c.prune = to_bool(f, v); }},
      {"dirpg.budget", [](auto& c, auto& f, auto& v) { c.budget.max_interactions = to_u64(f, v); }},
      {"dirpg.terminate_on_first_improvement",
       [](auto& c, auto& f, auto& v) { c.budget.terminate_on_first_improvement = to_bool(f, v); }},
      {"dirpg.control_variate", [](auto& c, auto& f, auto& v) { c.control_variate = to_bool(f, v); }},
      {"optimizer.name", [](auto& c, auto&, auto& v) { c.optimizer = parse_optimizer_kind(trim(v)); }},
      {"optimizer.learning_rate", [](auto& c, auto& f, auto& v) { c.learning_rate = to_double(f, v); }},
      {"baseline.rollouts", [](auto& c, auto& f, auto& v) { c.rollouts = to_u64(f, v); }},
      {"baseline.elite", [](auto& c, auto& f, auto& v) { c.elite = to_u64(f, v); }},
  };
  return table;
}

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
  if (name == "dirpg") return Algorithm::dirpg;
  if (name == "reinforce") return Algorithm::reinforce;
  if (name == "reinforce_action") return Algorithm::reinforce_action;
  if (name == "cem") return Algorithm::cem;
  if (name == "ucb_semi") return Algorithm::ucb_semi;
  if (name == "ucb_full") return Algorithm::ucb_full;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::dirpg: return "dirpg";
    case Algorithm::reinforce: return "reinforce";
    case Algorithm::reinforce_action: return "reinforce_action";
    case Algorithm::cem: return "cem";
    case Algorithm::ucb_semi: return "ucb_semi";
    case Algorithm::ucb_full: return "ucb_full";
  }
  return "?";
}

std::string resolve_config_key(const std::string& key) {
  const auto& table = setters();
  if (table.count(key)) return key;
  std::string found;
  for (const auto& [full, _] : table) {
    if (full.substr(full.find('.') + 1) == key) {
      if (!found.empty()) throw ConfigError(key, "ambiguous; use " + found + " or " + full);
      found = full;
    }
  }
  if (found.empty()) throw ConfigError(key, "unknown configuration field");
  return found;
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const std::string full = resolve_config_key(key);
  setters().at(full)(cfg, full, strip_comment(value));
}

ExperimentConfig parse_config(std::istream& in, const std::string& base_dir) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config", e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(section, "key outside of a [section]");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!setters().count(full)) throw ConfigError(full, "unknown configuration field");
      setters().at(full)(cfg, full, strip_comment(value.data()));
    }
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(in, dir.empty() ? "." : dir.string());
}

std::unique_ptr<Environment> make_environment(const EnvConfig& env, const std::string& base_dir) {
  try {
    if (env.name == "deep_sea") {
      if (env.size < 2) throw ConfigError("env.size", "must be at least 2");
      return std::make_unique<DeepSea>(env.size);
    }
    if (env.name == "multi_room_grid") return std::make_unique<MultiRoomGrid>(env.grid);
    if (env.name == "spanning_tree_bandit") {
      Graph g;
      if (!env.graph_path.empty()) {
        std::filesystem::path p(env.graph_path);
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        g = load_edge_list(p.string());
      } else {
        if (env.graph_vertices < 2) throw ConfigError("env.vertices", "must be at least 2");
        if (!(env.graph_edge_prob >= 0.0 && env.graph_edge_prob <= 1.0)) {
          throw ConfigError("env.edge_prob", "must lie in [0, 1]");
        }
        g = random_graph(env.graph_vertices, env.graph_edge_prob, env.graph_seed);
      }
      return std::make_unique<SpanningTreeBandit>(std::move(g), env.legality);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("env", e.what());
  }
  throw ConfigError("env.name", "unknown environment '" + env.name + "'");
}

void validate(const ExperimentConfig& cfg) {
  const auto env = make_environment(cfg.env, cfg.base_dir);
  if (cfg.seeds.empty()) throw ConfigError("experiment.seeds", "seed list is empty");
  if (cfg.ma_window == 0) throw ConfigError("experiment.ma_window", "must be positive");
  if (cfg.out_dir.empty()) throw ConfigError("experiment.out_dir", "must not be empty");
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("optimizer.learning_rate", "must be positive");
  switch (cfg.algorithm) {
    case Algorithm::dirpg:
      if (!cfg.epsilon) throw ConfigError("dirpg.epsilon", "required for algorithm dirpg");
      if (*cfg.epsilon == 0.0) throw ConfigError("dirpg.epsilon", "must be non-zero");
      if (cfg.alpha < 0.0 || cfg.alpha > 1.0) throw ConfigError("dirpg.alpha", "must lie in [0, 1]");
      if (cfg.prune && *cfg.epsilon < 0.0) throw ConfigError("dirpg.prune", "pruning requires epsilon >= 0");
      if (cfg.budget.max_interactions < env->horizon()) {
        throw ConfigError("dirpg.budget", "must be at least the horizon (" + std::to_string(env->horizon()) + ")");
      }
      break;
    case Algorithm::reinforce:
    case Algorithm::reinforce_action:
    case Algorithm::cem:
      if (cfg.rollouts == 0) throw ConfigError("baseline.rollouts", "must be positive");
      if (cfg.algorithm == Algorithm::cem && (cfg.elite == 0 || cfg.elite > cfg.rollouts)) {
        throw ConfigError("baseline.elite", "must lie in [1, rollouts]");
      }
      break;
    case Algorithm::ucb_semi:
    case Algorithm::ucb_full:
      if (cfg.env.name != "spanning_tree_bandit") {
        throw ConfigError("experiment.algorithm", "UCB runs only on spanning_tree_bandit");
      }
      break;
  }
}

}  // namespace dirpg
