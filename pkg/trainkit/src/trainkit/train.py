"""Toy two-level policy-gradient training over the environment client.

One shared linear policy acts for every agent; an optional second one
acts for the planner. Default planner behavior is free market: it
submits noop forever, so the zero tax schedule never changes. Scale is
deliberately small (tens of iterations, short episodes); the point is
exercising the contract, not convergence.
"""

from dataclasses import dataclass, field

import numpy as np

from gridecon.config import EconomyConfig
from gridecon.env import N_AGENT_ACTIONS, N_PLANNER_ACTIONS

from .client import EnvClient
from .policy import (
    AGENT_FEATURE_BLOCKS,
    PLANNER_FEATURE_BLOCKS,
    FeatureMap,
    LinearSoftmaxPolicy,
    Sample,
    normalized_advantages,
    returns_to_go,
    surrogate_loss,
)

FREE_MARKET_ACTION = 0  # planner noop, leaves the all-zero schedule alone


@dataclass
class TrainConfig:
    iterations: int = 50
    episodes_per_iteration: int = 3
    episode_steps: int = 100
    seed: int = 0
    learning_rate: float = 0.1
    clip_epsilon: float = 0.2
    entropy_weight: float = 0.01
    discount: float = 0.8
    epochs: int = 2
    train_planner: bool = False


@dataclass
class TrainResult:
    agent_weights: np.ndarray
    planner_weights: np.ndarray | None
    reward_curve: list = field(default_factory=list)
    planner_curve: list = field(default_factory=list)
    initial_eval: float = 0.0


def default_env_factory(config: TrainConfig, seed: int) -> EnvClient:
    return EnvClient(EconomyConfig(episode_steps=config.episode_steps), seed)


def _rollout(client, config, agent_policy, agent_map, planner_policy,
             planner_map, rng):
    """One episode. Returns per-trajectory samples and reward totals."""
    observations = client.reset()
    n = client.n_agents
    trajectories = [[] for _ in range(n)]
    agent_rewards = [[] for _ in range(n)]
    planner_trajectory = []
    planner_rewards = []
    done = False
    while not done:
        features = np.stack([agent_map(observations.agent[i]) for i in range(n)])
        masks = np.stack([np.asarray(client.agent_mask(i)) for i in range(n)])
        actions, log_probs = agent_policy.sample_batch(features, masks, rng)
        for i in range(n):
            trajectories[i].append(
                (features[i], masks[i], int(actions[i]), float(log_probs[i]))
            )
        if planner_policy is None:
            planner_action = FREE_MARKET_ACTION
        else:
            features = planner_map(observations.planner)
            mask = np.array(client.planner_mask())
            planner_action, log_prob = planner_policy.sample(features, mask, rng)
            planner_trajectory.append((features, mask, planner_action, log_prob))
        observations, rewards, planner_reward, done = client.step(
            actions, planner_action
        )
        for i in range(n):
            agent_rewards[i].append(rewards[i])
        planner_rewards.append(planner_reward)
    return trajectories, agent_rewards, planner_trajectory, planner_rewards


def _to_batch(trajectories, reward_lists, discount):
    """Flatten trajectories into samples with normalized advantages.

    The baseline is the per-timestep mean return across trajectories,
    which removes the horizon-dependent drift of returns-to-go.
    """
    samples = []
    returns = []
    for trajectory, rewards in zip(trajectories, reward_lists):
        returns.append(returns_to_go(rewards, discount))
        for features, mask, action, log_prob in trajectory:
            samples.append(Sample(features, mask, action, log_prob, 0.0))
    longest = max(len(r) for r in returns)
    step_sums = np.zeros(longest)
    step_counts = np.zeros(longest)
    for trajectory_returns in returns:
        step_sums[: len(trajectory_returns)] += trajectory_returns
        step_counts[: len(trajectory_returns)] += 1
    baseline = step_sums / np.maximum(step_counts, 1)
    centered = np.concatenate(
        [r - baseline[: len(r)] for r in returns]
    )
    advantages = normalized_advantages(centered)
    for sample, advantage in zip(samples, advantages):
        sample.advantage = float(advantage)
    return samples


def _update(policy, batch, config):
    for _ in range(config.epochs):
        _, grad = surrogate_loss(
            policy.weights, batch, config.clip_epsilon, config.entropy_weight
        )
        policy.weights = policy.weights - config.learning_rate * grad


def train(config: TrainConfig, env_factory=default_env_factory) -> TrainResult:
    probe = env_factory(config, 0)
    agent_map = FeatureMap(probe.agent_layout, AGENT_FEATURE_BLOCKS)
    planner_map = FeatureMap(probe.planner_layout, PLANNER_FEATURE_BLOCKS)
    init_rng = np.random.default_rng([config.seed, 11])
    agent_policy = LinearSoftmaxPolicy(N_AGENT_ACTIONS, agent_map.size, init_rng)
    planner_policy = None
    if config.train_planner:
        planner_policy = LinearSoftmaxPolicy(
            N_PLANNER_ACTIONS, planner_map.size, init_rng
        )
    rng = np.random.default_rng([config.seed, 23])

    def collect(iteration):
        all_agent, all_agent_rewards = [], []
        all_planner, all_planner_rewards = [], []
        episode_totals, planner_totals = [], []
        for episode in range(config.episodes_per_iteration):
            # iteration -1 is the pre-training evaluation pass
            seed = config.seed * 100_000 + (iteration + 1) * 100 + episode
            client = env_factory(config, seed)
            agent_traj, agent_rew, planner_traj, planner_rew = _rollout(
                client, config, agent_policy, agent_map,
                planner_policy, planner_map, rng,
            )
            all_agent.extend(agent_traj)
            all_agent_rewards.extend(agent_rew)
            episode_totals.extend(sum(r) for r in agent_rew)
            if planner_policy is not None:
                all_planner.append(planner_traj)
                all_planner_rewards.append(planner_rew)
                planner_totals.append(sum(planner_rew))
        batch = _to_batch(all_agent, all_agent_rewards, config.discount)
        planner_batch = None
        if planner_policy is not None:
            planner_batch = _to_batch(
                all_planner, all_planner_rewards, config.discount
            )
        return batch, planner_batch, float(np.mean(episode_totals)), (
            float(np.mean(planner_totals)) if planner_totals else 0.0
        )

    _, _, initial_eval, _ = collect(iteration=-1)
    result = TrainResult(
        agent_weights=agent_policy.weights,
        planner_weights=None,
        initial_eval=initial_eval,
    )
    for iteration in range(config.iterations):
        batch, planner_batch, mean_reward, planner_mean = collect(iteration)
        result.reward_curve.append(mean_reward)
        _update(agent_policy, batch, config)
        if planner_policy is not None:
            result.planner_curve.append(planner_mean)
            _update(planner_policy, planner_batch, config)
    result.agent_weights = agent_policy.weights
    if planner_policy is not None:
        result.planner_weights = planner_policy.weights
    return result
