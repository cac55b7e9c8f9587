#include "dirpg/policy.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dirpg/errors.hpp"
#include "dirpg/gumbel.hpp"

namespace dirpg {

namespace {
constexpr std::size_t kStackActions = 16;
}

void action_log_probs_into(const PolicyParams& params, std::span<const double> features,
                           ActionSet legal, std::span<double> out) {
  if (legal.empty()) throw ContractViolation("action_log_probs: empty legal set");
  double hi = kNegInf;
  for (std::size_t a = 0; a < params.num_actions; ++a) {
    if (!legal.contains(static_cast<ActionId>(a))) {
      out[a] = kNegInf;
      continue;
    }
    const auto row = params.row(a);
    double score = 0.0;
    for (std::size_t f = 0; f < params.feature_dim; ++f) score += row[f] * features[f];
    out[a] = score;
    hi = std::max(hi, score);
  }
  double acc = 0.0;
  for (ActionId a : legal) acc += std::exp(out[a] - hi);
  const double norm = hi + std::log(acc);
  for (ActionId a : legal) out[a] -= norm;
}

std::vector<double> action_log_probs(const PolicyParams& params, std::span<const double> features,
                                     ActionSet legal) {
  std::vector<double> out(params.num_actions);
  action_log_probs_into(params, features, legal, out);
  return out;
}

ActionId sample_from_log_probs(std::span<const double> log_probs, ActionSet allowed, Rng& rng) {
  if (allowed.empty()) throw ContractViolation("sample_action: empty legal set");
  if (allowed.size() == 1) return *allowed.begin();
  double total = 0.0;
  for (ActionId a : allowed) total += std::exp(log_probs[a]);
  double u = uniform_open(rng) * total;
  ActionId last = 0;
  for (ActionId a : allowed) {
    u -= std::exp(log_probs[a]);
    last = a;
    if (u < 0.0) return a;
  }
  return last;
}

ActionId sample_action(const PolicyParams& params, std::span<const double> features, ActionSet legal,
                       Rng& rng) {
  double buf[kStackActions];
  std::vector<double> heap;
  std::span<double> lp;
  if (params.num_actions <= kStackActions) {
    lp = std::span<double>(buf, params.num_actions);
  } else {
    heap.resize(params.num_actions);
    lp = heap;
  }
  action_log_probs_into(params, features, legal, lp);
  return sample_from_log_probs(lp, legal, rng);
}

double trajectory_log_prob(const PolicyParams& params, const NoiseTree& tree, NoiseTree::NodeId node) {
  std::vector<double> lp(params.num_actions);
  double total = 0.0;
  while (node != NoiseTree::kRoot) {
    const auto parent = tree.parent(node);
    action_log_probs_into(params, tree.features(parent), tree.outcome(parent).legal, lp);
    total += lp[tree.action_into(node)];
    node = parent;
  }
  return total;
}

double trajectory_log_prob(const PolicyParams& params, const NoiseTree& tree,
                           std::span<const ActionId> trajectory) {
  return trajectory_log_prob(params, tree, tree.node_at(trajectory));
}

void accumulate_step_score(const PolicyParams& params, const NoiseTree& tree, NoiseTree::NodeId node,
                           double scale, std::span<double> out) {
  if (node == NoiseTree::kRoot) return;
  double buf[kStackActions];
  std::vector<double> heap;
  std::span<double> lp;
  if (params.num_actions <= kStackActions) {
    lp = std::span<double>(buf, params.num_actions);
  } else {
    heap.resize(params.num_actions);
    lp = heap;
  }
  const std::size_t dim = params.feature_dim;
  const auto parent = tree.parent(node);
  const ActionSet legal = tree.outcome(parent).legal;
  const auto phi = tree.features(parent);
  action_log_probs_into(params, phi, legal, lp);
  const ActionId taken = tree.action_into(node);
  for (ActionId a : legal) {
    const double coeff = scale * ((a == taken ? 1.0 : 0.0) - std::exp(lp[a]));
    if (coeff == 0.0) continue;
    double* row = out.data() + a * dim;
    for (std::size_t f = 0; f < dim; ++f) row[f] += coeff * phi[f];
  }
}

void accumulate_grad_log_prob(const PolicyParams& params, const NoiseTree& tree, NoiseTree::NodeId node,
                              double scale, std::span<double> out) {
  for (; node != NoiseTree::kRoot; node = tree.parent(node)) {
    accumulate_step_score(params, tree, node, scale, out);
  }
}

std::vector<double> grad_log_prob(const PolicyParams& params, const NoiseTree& tree,
                                  std::span<const ActionId> trajectory) {
  std::vector<double> out(params.size(), 0.0);
  accumulate_grad_log_prob(params, tree, tree.node_at(trajectory), 1.0, out);
  return out;
}

void save_policy(std::ostream& out, const PolicyParams& params) {
  out << "dirpg-policy 1\n"
      << "num_actions " << params.num_actions << '\n'
      << "feature_dim " << params.feature_dim << '\n';
  char buf[32];
  for (double v : params.theta) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
}

PolicyParams load_policy(std::istream& in) {
  std::string magic, key;
  int version = 0;
  if (!(in >> magic >> version) || magic != "dirpg-policy") {
    throw std::runtime_error("policy checkpoint: missing `dirpg-policy` header");
  }
  if (version != 1) throw std::runtime_error("policy checkpoint: unsupported version " + std::to_string(version));
  std::size_t actions = 0, dim = 0;
  if (!(in >> key >> actions) || key != "num_actions") throw std::runtime_error("policy checkpoint: expected num_actions");
  if (!(in >> key >> dim) || key != "feature_dim") throw std::runtime_error("policy checkpoint: expected feature_dim");
  PolicyParams params(actions, dim);
  for (auto& v : params.theta) {
    std::string token;
    if (!(in >> token)) throw std::runtime_error("policy checkpoint: truncated parameter list");
    v = std::strtod(token.c_str(), nullptr);
    if (!std::isfinite(v)) throw std::runtime_error("policy checkpoint: non-finite parameter");
  }
  return params;
}

void save_policy(const std::string& path, const PolicyParams& params) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  save_policy(out, params);
}

PolicyParams load_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_policy(in);
}

}  // namespace dirpg
