import json
import math
import os

import pytest

import dirpg


def test_environment_shapes():
    env = dirpg.DeepSea(5)
    assert (env.name, env.num_actions, env.feature_dim, env.horizon) == ("deep_sea", 2, 25, 4)
    grid = dirpg.MultiRoomGrid(width=9, rooms=2, horizon=20, layout_seed=1)
    assert grid.num_actions == 7
    assert "G" in grid.dump()


def test_policy_theta_roundtrip():
    env = dirpg.SequenceEnvironment(2, 2, [1.0, 0.0, 0.0, 1.0])
    params = dirpg.PolicyParams.zeros_for(env)
    assert len(params) == 2 * env.feature_dim
    params.theta = [0.5] * len(params)
    assert params.theta == [0.5] * len(params)
    with pytest.raises(ValueError):
        params.theta = [0.0]


def test_direct_gradient_is_zero_without_improvement():
    env = dirpg.SequenceEnvironment(2, 2, [0.0, 0.0, 0.0, 0.0])
    params = dirpg.PolicyParams.zeros_for(env)
    est = dirpg.direct_gradient(params, env, seed=3, epsilon=1.0)
    assert not est["improved"]
    assert est["grad"] == [0.0] * len(params)
    assert est["t_opt"] == est["t_dir"]
    assert est["interactions"] >= env.horizon


def test_zero_epsilon_is_rejected():
    env = dirpg.DeepSea(5)
    with pytest.raises(ValueError):
        dirpg.direct_gradient(dirpg.PolicyParams.zeros_for(env), env, seed=0, epsilon=0.0)


def test_mean_gradient_tracks_exact_gradient():
    env = dirpg.SequenceEnvironment(2, 2, [1.0, 0.0, 0.0, 2.0])
    params = dirpg.PolicyParams.zeros_for(env)
    exact = dirpg.exact_policy_gradient(params, env)
    n = 4000
    mean = [0.0] * len(params)
    for i in range(n):
        g = dirpg.direct_gradient(params, env, seed=i, epsilon=0.05)["grad"]
        mean = [m + x / n for m, x in zip(mean, g)]
    # loose: a smoke check that signs and magnitudes line up
    for m, e in zip(mean, exact):
        assert abs(m - e) < 0.1 + 0.3 * abs(e)


def test_training_records_and_determinism():
    env = dirpg.DeepSea(5)
    params_a, records_a = dirpg.train_dirpg(env, epsilon=-2.0, episodes=50, seed=7, learning_rate=0.01)
    params_b, records_b = dirpg.train_dirpg(env, epsilon=-2.0, episodes=50, seed=7, learning_rate=0.01)
    assert len(records_a) == 50
    assert set(records_a[0]) == {"episode", "interactions", "return_opt", "d_opt", "d_dir", "search_steps", "improved"}
    assert params_a.theta == params_b.theta
    assert records_a == records_b
    assert all(b["interactions"] > a["interactions"] for a, b in zip(records_a, records_a[1:]))


def test_bandit_and_ucb():
    graph = dirpg.random_graph(6, 0.3, seed=0)
    assert graph.connected()
    env = dirpg.SpanningTreeBandit(graph)
    _, records = dirpg.run_ucb(env, "full", episodes=200, seed=1)
    assert [r["interactions"] for r in records[:3]] == [1, 2, 3]
    tree = dirpg.max_spanning_tree(graph, [e.mu for e in graph.edges])
    assert len(tree) == graph.num_vertices - 1


def test_quadrature_and_risk():
    nodes, weights = dirpg.gauss_hermite(16)
    assert math.isclose(sum(weights), 1.0, rel_tol=1e-12)
    assert math.isclose(sum(w * x * x for x, w in zip(nodes, weights)), 1.0, rel_tol=1e-10)
    assert abs(dirpg.risk_objective(1.0, 0.5, model="joint") - 0.25) < 1e-8


def test_informative_gradient_report():
    report = json.loads(dirpg.informative_gradient_probability(2, 4, 1.0, math.log(15.0), trials=2000, seed=1))
    assert abs(report["empirical"] - report["closed_form"]) < 4 * report["standard_error"] + 1e-9


def test_train_from_config():
    path = os.path.join(os.environ.get("DIRPG_CONFIG_DIR", "configs"), "deep_sea.ini")
    _, records = dirpg.train_from_config(path, seed=0, episodes=20)
    assert len(records) == 20
