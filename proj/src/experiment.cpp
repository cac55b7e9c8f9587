#include "dirpg/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "dirpg/baselines.hpp"
#include "dirpg/envs/deep_sea.hpp"
#include "dirpg/errors.hpp"

namespace fs = std::filesystem;

namespace dirpg {

namespace {

bool uses_policy(Algorithm a) { return a != Algorithm::ucb_semi && a != Algorithm::ucb_full; }

std::string resolve(const ExperimentConfig& cfg, const std::string& path) {
  fs::path p(path);
  if (p.is_relative()) p = fs::path(cfg.base_dir) / p;
  return p.string();
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for '" + tmp + "'");
  }
  fs::rename(tmp, path);
}

TrainResult run_single(const ExperimentConfig& cfg, const Environment& env, std::uint64_t seed, std::ostream* trace,
                       const ProgressFn& progress) {
  PolicyParams init = cfg.init_policy.empty() ? PolicyParams::zeros_for(env) : load_policy(resolve(cfg, cfg.init_policy));
  if (init.num_actions != env.num_actions() || init.feature_dim != env.feature_dim()) {
    throw ConfigError("experiment.init_policy", "checkpoint shape does not match the environment");
  }
  ScoreSettings score{cfg.rollouts, cfg.elite, cfg.optimizer, cfg.learning_rate, cfg.episodes};
  switch (cfg.algorithm) {
    case Algorithm::dirpg: {
      DirpgSettings s;
      s.epsilon = *cfg.epsilon;
      s.priority = PriorityConfig{cfg.priority, *cfg.epsilon, cfg.alpha, cfg.prune};
      s.budget = cfg.budget;
      s.control_variate = cfg.control_variate;
      s.optimizer = cfg.optimizer;
      s.learning_rate = cfg.learning_rate;
      s.episodes = cfg.episodes;
      return train_dirpg(env, std::move(init), s, seed, progress, trace);
    }
    case Algorithm::reinforce:
      return train_reinforce(env, std::move(init), ReinforceVariant::trajectory, score, seed, progress);
    case Algorithm::reinforce_action:
      return train_reinforce(env, std::move(init), ReinforceVariant::action_level, score, seed, progress);
    case Algorithm::cem:
      return train_cem(env, std::move(init), score, seed, progress);
    case Algorithm::ucb_semi:
    case Algorithm::ucb_full: {
      const auto* bandit = dynamic_cast<const SpanningTreeBandit*>(&env);
      if (bandit == nullptr) throw ConfigError("experiment.algorithm", "UCB runs only on spanning_tree_bandit");
      return run_ucb(*bandit, cfg.algorithm == Algorithm::ucb_semi ? BanditFeedback::semi : BanditFeedback::full,
                     cfg.episodes, seed, progress);
    }
  }
  throw std::logic_error("unhandled algorithm");
}

void write_merged_csv(std::ostream& out, std::span<const std::uint64_t> seeds, std::span<const TrainResult> results,
                      std::size_t window, std::size_t report_every) {
  out << "interactions,mean_return";
  for (auto s : seeds) out << ",seed_" << s;
  out << '\n';
  std::size_t max_total = 0;
  std::vector<std::vector<double>> ma;
  for (const auto& r : results) {
    ma.push_back(moving_average_returns(r.records, window));
    if (!r.records.empty()) max_total = std::max(max_total, r.records.back().interactions);
  }
  if (max_total == 0) return;
  const std::size_t step = report_every > 0 ? report_every : std::max<std::size_t>(1, (max_total + 199) / 200);
  std::vector<std::size_t> cursor(results.size(), 0);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t g = step;; g += step) {
    const std::size_t point = std::min(g, max_total);
    std::vector<double> row(results.size(), nan);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& recs = results[i].records;
      while (cursor[i] < recs.size() && recs[cursor[i]].interactions <= point) ++cursor[i];
      if (cursor[i] > 0) {
        row[i] = ma[i][cursor[i] - 1];
        sum += row[i];
        ++count;
      }
    }
    out << point << ',' << format_number(count ? sum / static_cast<double>(count) : nan);
    for (double v : row) out << ',' << format_number(v);
    out << '\n';
    if (point == max_total) break;
  }
}

TrainOutputs run_train(const ExperimentConfig& cfg, const RunOptions& options) {
  validate(cfg);
  const auto env = make_environment(cfg.env, cfg.base_dir);
  std::ostream& log = options.log ? *options.log : std::cerr;
  fs::create_directories(cfg.out_dir);
  const std::string algo = to_string(cfg.algorithm);
  TrainOutputs outputs;
  for (auto seed : cfg.seeds) {
    const std::string stem = (fs::path(cfg.out_dir) / (algo + "_seed" + std::to_string(seed))).string();
    std::ofstream trace_file;
    std::ostream* trace = nullptr;
    if (options.trace && cfg.algorithm == Algorithm::dirpg) {
      trace_file.open(stem + ".trace.jsonl", std::ios::binary | std::ios::trunc);
      if (!trace_file) throw std::runtime_error("cannot write '" + stem + ".trace.jsonl'");
      trace = &trace_file;
      outputs.files.push_back(stem + ".trace.jsonl");
    }
    const std::size_t every = std::max<std::size_t>(1, cfg.episodes / 10);
    double running = 0.0;
    std::size_t seen = 0;
    ProgressFn progress;
    if (!options.quiet) {
      progress = [&](const EpisodeRecord& r) {
        running += (r.return_opt - running) / static_cast<double>(std::min(++seen, cfg.ma_window));
        if ((r.episode + 1) % every == 0) {
          log << algo << " seed " << seed << ": episode " << r.episode + 1 << '/' << cfg.episodes
              << ", interactions " << r.interactions << ", avg return " << format_number(running) << '\n';
        }
        return true;
      };
    }
    TrainResult result = run_single(cfg, *env, seed, trace, progress);

    std::ostringstream csv;
    write_records_csv(csv, result.records);
    write_file_atomic(stem + ".csv", csv.str());
    outputs.files.push_back(stem + ".csv");
    if (uses_policy(cfg.algorithm)) {
      std::ostringstream pol;
      save_policy(pol, result.params);
      write_file_atomic(stem + ".policy", pol.str());
      outputs.files.push_back(stem + ".policy");
    }
    outputs.results.push_back(std::move(result));
  }
  std::ostringstream merged;
  write_merged_csv(merged, cfg.seeds, outputs.results, cfg.ma_window, cfg.report_every);
  const std::string merged_path = (fs::path(cfg.out_dir) / (algo + "_merged.csv")).string();
  write_file_atomic(merged_path, merged.str());
  outputs.files.push_back(merged_path);
  return outputs;
}

double deep_sea_constant_path_prob(const PolicyParams& params, int size, ActionId action) {
  DeepSea env(size);
  NoiseTree tree(env, 0);
  const Prefix path(env.horizon(), action);
  tree.materialize(path);
  return std::exp(trajectory_log_prob(params, tree, path));
}

std::string run_sweep(const ExperimentConfig& cfg, const std::string& param, std::span<const std::string> values,
                      const RunOptions& options) {
  const std::string full = resolve_config_key(param);
  const std::string column = full.substr(full.find('.') + 1);
  if (values.empty()) throw ConfigError(full, "no sweep values given");
  const bool deep_sea = cfg.env.name == "deep_sea";
  std::ostringstream table;
  table << column << (deep_sea ? ",p_llll,p_rrrr" : "") << ",final_return\n";
  for (const auto& value : values) {
    ExperimentConfig run = cfg;
    set_config_value(run, full, value);
    run.out_dir = (fs::path(cfg.out_dir) / (column + "_" + value)).string();
    validate(run);
    const auto outputs = run_train(run, options);
    double final_return = 0.0, p_left = 0.0, p_right = 0.0;
    for (const auto& r : outputs.results) {
      const auto ma = moving_average_returns(r.records, run.ma_window);
      final_return += ma.empty() ? 0.0 : ma.back();
      if (deep_sea) {
        p_left += deep_sea_constant_path_prob(r.params, run.env.size, DeepSea::kLeft);
        p_right += deep_sea_constant_path_prob(r.params, run.env.size, DeepSea::kRight);
      }
    }
    const auto n = static_cast<double>(outputs.results.size());
    table << value;
    if (deep_sea) table << ',' << format_number(p_left / n) << ',' << format_number(p_right / n);
    table << ',' << format_number(final_return / n) << '\n';
  }
  fs::create_directories(cfg.out_dir);
  const std::string path = (fs::path(cfg.out_dir) / ("sweep_" + column + ".csv")).string();
  write_file_atomic(path, table.str());
  return path;
}

}  // namespace dirpg
