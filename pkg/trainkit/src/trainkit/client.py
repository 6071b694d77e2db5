"""Thin client over the environment's public contract.

Everything training needs crosses this boundary as flat float arrays,
boolean masks, integer action ids, and the (name, offset, length)
layout descriptor. Nothing else of the native simulation is exposed.
"""

import gridecon
from gridecon.config import EconomyConfig
from gridecon.env import (
    Simulation,
    agent_observation_layout,
    layout_size,
    planner_observation_layout,
)


class LayoutMismatch(RuntimeError):
    """Observation vectors disagree with the cached layout descriptor."""


class EnvClient:
    def __init__(self, config: EconomyConfig | None = None, seed: int = 0):
        self.config = config or EconomyConfig()
        self.n_agents = self.config.n_agents
        self.library_version = gridecon.__version__
        self.agent_layout = agent_observation_layout(self.n_agents)
        self.planner_layout = planner_observation_layout(self.n_agents)
        self._agent_size = layout_size(self.agent_layout)
        self._planner_size = layout_size(self.planner_layout)
        self._sim = Simulation(self.config, seed)

    def reset(self):
        observations = self._sim.reset()
        self._verify(observations)
        return observations

    def step(self, agent_actions, planner_batch):
        """Returns (observations, agent_rewards, planner_reward, done)."""
        observations, rewards, _events, done = self._sim.step(
            agent_actions, planner_batch
        )
        self._verify(observations)
        return observations, rewards.agent, rewards.planner, done

    def agent_mask(self, agent_id: int):
        return self._sim.agent_mask(agent_id)

    def planner_mask(self):
        return self._sim.planner_mask()

    def _verify(self, observations):
        sizes = (len(observations.agent[0]), len(observations.planner))
        expected = (self._agent_size, self._planner_size)
        if sizes != expected:
            raise LayoutMismatch(
                f"native library {self.library_version} produced observation "
                f"sizes {sizes}, layout descriptor says {expected}"
            )
