#include <cmath>

#include "doctest.h"
#include "dirpg/dirpg.hpp"
#include "dirpg/envs/deep_sea.hpp"
#include "dirpg/envs/sequence_env.hpp"
#include "dirpg/errors.hpp"
#include "oracles.hpp"

using namespace dirpg;

namespace {

const std::vector<double> kRewards{1.0, 0.0, 0.5, 2.0};

PolicyParams some_params(const Environment& env) {
  auto p = PolicyParams::zeros_for(env);
  Rng rng = make_rng(21);
  for (auto& v : p.theta) v = 0.8 * standard_normal(rng);
  return p;
}

}  // namespace

TEST_CASE("direct gradient contract checks") {
  SequenceEnvironment env(2, 2, kRewards);
  const auto p = PolicyParams::zeros_for(env);
  CHECK_THROWS_AS(direct_gradient(p, env, 1, 0.0, SearchBudget{}), ContractViolation);
  CHECK_THROWS_AS(direct_gradient(p, env, 1, 1.0, SearchBudget{1, false}), ContractViolation);
}

TEST_CASE("mean direct gradient matches the finite-epsilon oracle") {
  SequenceEnvironment env(2, 2, kRewards);
  const auto p = some_params(env);
  for (double eps : {1.0, -0.7}) {
    const auto expected = oracle::sequence_direct_gradient_mean(2, 2, p.theta, kRewards, eps);
    for (bool cv : {true, false}) {
      const int n = 40000;
      std::vector<double> mean(p.size(), 0.0), sq(p.size(), 0.0);
      for (int i = 0; i < n; ++i) {
        const auto est = cv ? direct_gradient(p, env, i, eps, SearchBudget{})
                            : direct_gradient_no_cv(p, env, i, eps, SearchBudget{});
        for (std::size_t c = 0; c < p.size(); ++c) {
          mean[c] += est.grad[c] / n;
          sq[c] += est.grad[c] * est.grad[c] / n;
        }
      }
      for (std::size_t c = 0; c < p.size(); ++c) {
        const double se = std::sqrt(std::max(sq[c] - mean[c] * mean[c], 0.0) / n);
        CHECK(std::abs(mean[c] - expected[c]) <= 5 * se + 1e-12);
      }
    }
  }
}

TEST_CASE("no improvement gives an exactly zero update") {
  auto env = make_deterministic_bandit({0.0, 0.0, 0.0});
  const auto p = PolicyParams::zeros_for(env);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto est = direct_gradient(p, env, s, 1.0, SearchBudget{3, false});
    CHECK_FALSE(est.improved);
    CHECK(est.t_dir == est.t_opt);
    for (double g : est.grad) CHECK(g == 0.0);
  }
}

TEST_CASE("early termination returns the first improvement") {
  DeepSea env(5);
  const auto p = some_params(env);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto est = direct_gradient(p, env, s, 2.0, SearchBudget{100, true});
    CHECK(est.interactions <= 100);
    CHECK(est.interactions == env.horizon() + est.search_interactions);
    if (est.improved) {
      CHECK(est.d_dir > est.d_opt);
      // Later yields have smaller Gumbels, so a positive-eps improvement needs more return.
      CHECK(est.return_dir > est.return_opt);
    }
  }
}

TEST_CASE("training is reproducible from the seed") {
  DeepSea env(4);
  DirpgSettings s;
  s.epsilon = 1.0;
  s.episodes = 50;
  s.budget = SearchBudget{20, true};
  const auto a = train_dirpg(env, PolicyParams::zeros_for(env), s, 3);
  const auto b = train_dirpg(env, PolicyParams::zeros_for(env), s, 3);
  CHECK(a.params.theta == b.params.theta);
  REQUIRE(a.records.size() == 50);
  CHECK(a.records.back().interactions == b.records.back().interactions);
  for (std::size_t i = 1; i < a.records.size(); ++i) CHECK(a.records[i].interactions > a.records[i - 1].interactions);
}
