#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dirpg/analysis.hpp"
#include "dirpg/errors.hpp"
#include "dirpg/experiment.hpp"

using namespace dirpg;

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<double> parse_numbers(const std::string& flag, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(flag, "expected a number, got '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(flag, "empty list");
  return out;
}

struct Common {
  std::string config;
  std::string out_dir;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> overrides;
  bool trace = false;
  bool quiet = false;
};

ExperimentConfig load_with_overrides(const Common& c) {
  ExperimentConfig cfg = load_config(c.config);
  if (!c.out_dir.empty()) cfg.out_dir = c.out_dir;
  if (!c.seeds.empty()) cfg.seeds = c.seeds;
  for (const auto& item : c.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("--set", "expected key=value, got '" + item + "'");
    set_config_value(cfg, item.substr(0, eq), item.substr(eq + 1));
  }
  validate(cfg);
  return cfg;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    write_file_atomic(out_path, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direct policy gradient experiments", "dirpg-lab"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "experiment INI file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seeds, "override the seed list");
    sub->add_option("--out-dir", common.out_dir, "override experiment.out_dir");
    sub->add_option("--set", common.overrides, "override one field, key=value (repeatable)");
    sub->add_flag("--trace", common.trace, "write a search trace (JSONL) per dirpg seed");
    sub->add_flag("--quiet", common.quiet, "no progress output");
  };

  auto* train = app.add_subcommand("train", "train with every configured seed");
  add_common(train);

  auto* sweep = app.add_subcommand("sweep", "train once per value of one config field");
  add_common(sweep);
  std::string param, values;
  sweep->add_option("--param", param, "config field, e.g. epsilon or dirpg.alpha")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();

  auto* analyze = app.add_subcommand("analyze", "analysis reports");
  analyze->require_subcommand(1);
  std::string out_path;
  std::uint64_t seed = 0;

  auto* risk = analyze->add_subcommand("risk", "risk objective of the Gaussian-choice problem (CSV)");
  std::string risk_ps = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
  std::string risk_eps = "-2,-1.5,-1,-0.5,-0.1,0.1,0.5,1,1.5,2";
  std::size_t nodes = 64;
  risk->add_option("--p", risk_ps, "reward probabilities")->capture_default_str();
  risk->add_option("--epsilons", risk_eps, "epsilon values (non-zero)")->capture_default_str();
  risk->add_option("--nodes", nodes, "Gauss-Hermite nodes")->capture_default_str();
  risk->add_option("--out", out_path, "output file (default stdout)");

  auto* lemma = analyze->add_subcommand("lemma", "search-ordering and stationarity checks (JSON)");
  std::size_t arms = 5, trials = 100000, draws = 100000;
  double lemma_eps = 1.0;
  lemma->add_option("--arms", arms)->capture_default_str();
  lemma->add_option("--trials", trials)->capture_default_str();
  lemma->add_option("--draws", draws, "gradient draws per stationarity check")->capture_default_str();
  lemma->add_option("--epsilon", lemma_eps)->capture_default_str();
  lemma->add_option("--seed", seed)->capture_default_str();
  lemma->add_option("--out", out_path);

  auto* variance = analyze->add_subcommand("variance", "update variance with and without the control variate (JSON)");
  std::string var_config, policy_path;
  double var_eps = 1.0;
  std::size_t var_n = 1000, var_budget = 0;
  variance->add_option("--config", var_config, "experiment INI naming the environment")->required()->check(CLI::ExistingFile);
  variance->add_option("--policy", policy_path, "policy checkpoint (default: zeros)");
  variance->add_option("--epsilon", var_eps)->capture_default_str();
  variance->add_option("--n", var_n, "estimates per variance")->capture_default_str();
  variance->add_option("--budget", var_budget, "interactions per estimate (default: config)");
  variance->add_option("--seed", seed)->capture_default_str();
  variance->add_option("--out", out_path);

  auto* info = analyze->add_subcommand("info_prob", "probability that search finds the rewarded trajectory (CSV)");
  std::size_t info_actions = 2, info_horizon = 4;
  std::string info_eps = "1", info_m = "0,1.0986122886681098,2.70805020110221";
  info->add_option("--actions", info_actions)->capture_default_str();
  info->add_option("--horizon", info_horizon)->capture_default_str();
  info->add_option("--epsilons", info_eps)->capture_default_str();
  info->add_option("--m", info_m, "rewards of the designated trajectory")->capture_default_str();
  info->add_option("--trials", trials)->capture_default_str();
  info->add_option("--seed", seed)->capture_default_str();
  info->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*train) {
      const auto cfg = load_with_overrides(common);
      RunOptions opts{common.trace, common.quiet, nullptr};
      const auto outputs = run_train(cfg, opts);
      if (!common.quiet) {
        for (const auto& f : outputs.files) std::cerr << "wrote " << f << '\n';
      }
    } else if (*sweep) {
      const auto cfg = load_with_overrides(common);
      RunOptions opts{common.trace, common.quiet, nullptr};
      const auto list = split_list(values);
      const auto path = run_sweep(cfg, param, list, opts);
      if (!common.quiet) std::cerr << "wrote " << path << '\n';
    } else if (*risk) {
      std::ostringstream csv;
      const auto ps = parse_numbers("--p", risk_ps);
      const auto eps = parse_numbers("--epsilons", risk_eps);
      write_risk_sweep(csv, ps, eps, nodes);
      emit(out_path, csv.str());
    } else if (*lemma) {
      if (arms < 1) throw ConfigError("--arms", "must be positive");
      std::vector<double> rewards(arms), logits(arms);
      Rng rng = make_rng(seed);
      for (std::size_t i = 0; i < arms; ++i) {
        rewards[i] = arms > 1 ? static_cast<double>(i) / static_cast<double>(arms - 1) : 1.0;
        logits[i] = standard_normal(rng);
      }
      std::vector<double> converged(arms, 0.0);
      converged.back() = 40.0;
      const auto l1 = lemma1_check(rewards, logits, lemma_eps, trials, seed);
      nlohmann::json j;
      j["violations"] = l1.violations;
      j["lemma1"] = to_json(l1);
      j["stationarity"] = {
          {"converged_approx", to_json(stationarity_check(rewards, converged, lemma_eps, draws, false, seed))},
          {"converged_exact", to_json(stationarity_check(rewards, converged, lemma_eps, draws, true, seed))},
          {"random_approx", to_json(stationarity_check(rewards, logits, lemma_eps, draws, false, seed))},
      };
      j["arm_rewards"] = rewards;
      j["logits"] = logits;
      emit(out_path, j.dump(2) + "\n");
    } else if (*variance) {
      const auto cfg = load_config(var_config);
      const auto env = make_environment(cfg.env, cfg.base_dir);
      const auto params = policy_path.empty() ? PolicyParams::zeros_for(*env) : load_policy(policy_path);
      SearchBudget budget = cfg.budget;
      if (var_budget > 0) budget.max_interactions = var_budget;
      PriorityConfig pc{cfg.priority, var_eps, cfg.alpha, cfg.prune};
      nlohmann::json j;
      j["epsilon"] = var_eps;
      j["n"] = var_n;
      j["with_cv"] = update_variance(params, *env, var_eps, var_n, true, budget, pc, seed);
      j["without_cv"] = update_variance(params, *env, var_eps, var_n, false, budget, pc, seed);
      emit(out_path, j.dump(2) + "\n");
    } else if (*info) {
      std::ostringstream csv;
      csv << "epsilon,m,empirical,closed_form,standard_error,reinforce_rate\n";
      for (double e : parse_numbers("--epsilons", info_eps)) {
        for (double m : parse_numbers("--m", info_m)) {
          const auto r = informative_gradient_probability(info_actions, info_horizon, e, m, trials, seed);
          csv << format_number(e) << ',' << format_number(m) << ',' << format_number(r.empirical) << ','
              << format_number(r.closed_form) << ',' << format_number(r.standard_error) << ','
              << format_number(r.reinforce_rate) << '\n';
        }
      }
      emit(out_path, csv.str());
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
