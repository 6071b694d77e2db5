"""Client boundary: layout verification and contract confinement."""

import numpy as np
import pytest

from gridecon.config import EconomyConfig

from trainkit.client import EnvClient, LayoutMismatch
from trainkit.train import TrainConfig, train


def test_reset_and_step_round_trip():
    client = EnvClient(EconomyConfig(episode_steps=100), seed=4)
    observations = client.reset()
    assert len(observations.agent) == client.n_agents
    noops = [0] * client.n_agents
    observations, rewards, planner_reward, done = client.step(noops, 0)
    assert len(rewards) == client.n_agents
    assert all(isinstance(r, float) for r in rewards)
    assert isinstance(planner_reward, float)
    assert not done


def test_layout_for_small_roster():
    client = EnvClient(EconomyConfig(n_agents=2, episode_steps=100), seed=4)
    observations = client.reset()
    sizes = {name: length for name, _, length in client.agent_layout}
    assert sizes["prev_sorted_incomes"] == 2
    assert len(observations.agent[0]) == sum(sizes.values())


def test_layout_mismatch_reports_versions():
    client = EnvClient(EconomyConfig(episode_steps=100), seed=4)
    client._agent_size += 1  # simulate a stale cached descriptor
    with pytest.raises(LayoutMismatch, match=client.library_version):
        client.reset()


class ContractProxy:
    """Exposes only the public boundary; anything else is an error.

    train() completing against this proxy proves it never reaches into
    simulation internals.
    """

    ALLOWED = (
        "reset", "step", "agent_mask", "planner_mask",
        "n_agents", "agent_layout", "planner_layout", "config",
    )

    def __init__(self, client):
        object.__setattr__(self, "_client", client)

    def __getattr__(self, name):
        if name not in ContractProxy.ALLOWED:
            raise AssertionError(f"training touched non-contract attribute {name!r}")
        return getattr(object.__getattribute__(self, "_client"), name)


def test_training_stays_on_the_contract():
    def factory(config, seed):
        return ContractProxy(
            EnvClient(EconomyConfig(episode_steps=config.episode_steps), seed)
        )

    result = train(
        TrainConfig(iterations=1, episodes_per_iteration=1, episode_steps=100),
        env_factory=factory,
    )
    assert len(result.reward_curve) == 1
