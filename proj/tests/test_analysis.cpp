#include <cmath>

#include "doctest.h"
#include "dirpg/analysis.hpp"
#include "dirpg/envs/deep_sea.hpp"
#include "dirpg/envs/sequence_env.hpp"
#include "dirpg/envs/spanning_tree_bandit.hpp"

using namespace dirpg;

TEST_CASE("deep sea expected return by hand") {
  DeepSea env(5);
  const auto p = PolicyParams::zeros_for(env);
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  double hand = 0.0;
  for (auto s : seeds) {
    NoiseTree tree(env, s);
    const double goal = DeepSea::goal_draw(tree.episode_noise());
    // 16 equally likely paths; each R costs 1/3 except the one that reaches
    // the corner on the last step, which pays the goal draw instead.
    double total = 0.0;
    for (int code = 0; code < 16; ++code) {
      int col = 0;
      double ret = 0.0;
      for (int t = 0; t < 4; ++t) {
        const bool right = (code >> (3 - t)) & 1;
        if (right) {
          col = std::min(col + 1, 4);
          ret += (t == 3 && col == 4) ? goal : -1.0 / 3.0;
        } else {
          col = std::max(col - 1, 0);
        }
      }
      total += ret / 16.0;
    }
    hand += total / 3.0;
  }
  CHECK(exact_expected_return(p, env, seeds) == doctest::Approx(hand));

  auto left = p;
  for (std::size_t f = 0; f < env.feature_dim(); ++f) left.at(DeepSea::kLeft, f) = 40.0;
  CHECK(std::abs(exact_expected_return(left, env, seeds)) < 1e-12);
}

TEST_CASE("exact policy gradient matches finite differences") {
  DeepSea env(4);
  auto p = PolicyParams::zeros_for(env);
  Rng rng = make_rng(8);
  for (auto& v : p.theta) v = standard_normal(rng);
  const std::vector<std::uint64_t> seeds{4, 5};
  const auto g = exact_policy_gradient(p, env, seeds);
  const double h = 1e-5;
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto hi = p, lo = p;
    hi.theta[i] += h;
    lo.theta[i] -= h;
    const double fd = (exact_expected_return(hi, env, seeds) - exact_expected_return(lo, env, seeds)) / (2 * h);
    CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6).scale(1e-3));
  }
  CHECK_THROWS(exact_expected_return(PolicyParams::zeros_for(DeepSea(9)), DeepSea(9), seeds));
}

TEST_CASE("gauss hermite moments and risk objective limits") {
  const auto rule = gauss_hermite(64);
  double w = 0, m2 = 0, m4 = 0;
  for (std::size_t i = 0; i < 64; ++i) {
    w += rule.weights[i];
    m2 += rule.weights[i] * std::pow(rule.nodes[i], 2);
    m4 += rule.weights[i] * std::pow(rule.nodes[i], 4);
  }
  CHECK(w == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
  for (double eps : {-1.0, 0.3, 2.0}) {
    CHECK(risk_objective_quadrature(0.0, eps, 64) == 0.0);
    CHECK(std::abs(risk_objective_quadrature(1.0, eps, 64, RiskModel::joint) - eps / 2) < 1e-8);
    CHECK(std::abs(risk_objective_quadrature(1.0, eps, 64)) < 1e-12);
  }
  for (double p : {0.2, 0.7})
    for (double eps : {-1.0, 0.5, 1.0})
      CHECK(std::abs(risk_objective_quadrature(p, eps, 64) - risk_objective_quadrature(p, eps, 128)) < 1e-10);
  CHECK_THROWS(risk_objective_quadrature(0.5, 0.0, 64));
  CHECK_THROWS(risk_objective_quadrature(0.5, 1.0, 8));
  // Risk seeking raises the objective, risk aversion lowers it.
  CHECK(risk_objective_quadrature(0.5, 1.0, 64) > 0.0);
  CHECK(risk_objective_quadrature(0.5, -1.0, 64) < 0.0);
}

TEST_CASE("taylor check") {
  CHECK(taylor_risk_check(0.0, 0.1).residual == 0.0);
  const auto a = taylor_risk_check(0.5, 0.1), b = taylor_risk_check(0.5, 0.05);
  CHECK(a.first_order_prediction == doctest::Approx(0.05 * 0.25));
  CHECK(b.residual < a.residual);
  CHECK_THROWS(taylor_risk_check(0.5, 0.5));
}

TEST_CASE("lemma 1 ordering") {
  const std::vector<double> rewards{0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<double> logits{0.3, -0.2, 1.0, 0.0, -1.0};
  const auto r = lemma1_check(rewards, logits, 1.0, 20000, 1);
  CHECK(r.passed());
  CHECK(r.approx_improved > 0);
  const auto big = lemma1_check(rewards, logits, 1e6, 200, 2);
  CHECK(big.passed());
  const std::vector<double> one{1.0}, zero{0.0};
  CHECK(lemma1_check(one, zero, 1.0, 100, 3).approx_improved == 0);
  const std::vector<double> bad{0.0, 0.0};
  CHECK_THROWS(lemma1_check(bad, std::vector<double>{0, 0}, 1.0, 10, 0));
}

TEST_CASE("stationarity checks") {
  const std::vector<double> rewards{0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<double> converged{0, 0, 0, 0, 40.0};
  const std::vector<double> random{0.3, -0.2, 1.0, 0.0, -1.0};
  CHECK(stationarity_check(rewards, converged, 1.0, 2000, false, 1).stationary);
  CHECK(stationarity_check(rewards, converged, 1.0, 2000, true, 1).stationary);
  CHECK_FALSE(stationarity_check(rewards, random, 1.0, 2000, false, 1).stationary);
}

TEST_CASE("informative gradient probability") {
  const auto r0 = informative_gradient_probability(2, 4, 0.0, 1.0, 100, 1);
  CHECK(r0.closed_form == doctest::Approx(1.0 / 16));
  const auto r = informative_gradient_probability(2, 4, 1.0, std::log(15.0), 20000, 2);
  CHECK(r.closed_form == doctest::Approx(0.5));
  CHECK(std::abs(r.empirical - r.closed_form) < 4 * r.standard_error);
  CHECK(r.reinforce_rate == doctest::Approx(2.0 / 16));
}

TEST_CASE("update variance") {
  Graph path;
  path.num_vertices = 3;
  path.edges = {{0, 1, 0.5}, {1, 2, 0.5}};
  SpanningTreeBandit forced(path);
  const auto p = PolicyParams::zeros_for(forced);
  CHECK(update_variance(p, forced, 1.0, 10, true, SearchBudget{10, false}, PriorityConfig{}, 1) == 0.0);

  DeepSea env(4);
  const auto q = PolicyParams::zeros_for(env);
  const double with = update_variance(q, env, 1.0, 400, true, SearchBudget{30, false}, PriorityConfig{}, 2);
  const double without = update_variance(q, env, 1.0, 400, false, SearchBudget{30, false}, PriorityConfig{}, 2);
  CHECK(with > 0.0);
  CHECK(with <= without);
}
