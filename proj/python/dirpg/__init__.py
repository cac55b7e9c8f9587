"""Direct policy gradient: Gumbel-process search over trajectories, baselines and analysis tools."""

from ._core import (
    ConfigError,
    ContractViolation,
    DeepSea,
    Edge,
    Environment,
    Graph,
    MultiRoomGrid,
    PolicyParams,
    SequenceEnvironment,
    SpanningTreeBandit,
    direct_gradient,
    exact_expected_return,
    exact_policy_gradient,
    gauss_hermite,
    informative_gradient_probability,
    max_spanning_tree,
    random_graph,
    risk_objective,
    run_ucb,
    sample_gumbel,
    train_dirpg,
    train_from_config,
    truncated_gumbel_from_uniform,
)

__all__ = [name for name in dir() if not name.startswith("_")]
