"""Scripted decision-making for agents and the planner.

Policies are pure functions of (observation, mask, random stream). They
read the flat observation through the published layout offsets and never
touch simulation internals, so anything written here could equally run
out of process.

The heuristic agent policies are plumbing for exercising the economy's
mechanics, not a claim about rational play. An expert gathers what its
next house needs, builds as soon as a recipe is complete, and asks a
mid-grid price for surplus. A novice first buys a house from an expert
(its cheapest income event), then buys skill units until it can build,
and from there behaves like an expert.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import (
    KEEP_RATE_SETTING,
    N_BRACKETS,
    RATE_GRID,
    ConfigurationError,
)
from .constants import (
    ASK,
    DEFAULT_PERMUTATION_INDEX,
    N_HOUSE_COLORS,
    N_RESOURCES,
    PERMUTATIONS,
)
from .env import (
    A_MOVE_BASE,
    A_NOOP,
    A_SKILL_BUY,
    HALF_WINDOW,
    P_NOOP,
    WINDOW,
    agent_build_action,
    agent_house_buy_action,
    agent_observation_layout,
    agent_order_action,
    agent_vote_action,
    planner_rate_action,
    planner_vote_action,
)


@dataclass(frozen=True)
class PolicyHandle:
    """A named decision function for one actor kind.

    Agent policies return a single action id; planner policies return a
    list of ids applied together in one step.
    """

    name: str
    actor_kind: str                        # "agent" or "planner"
    decide: Callable


_AGENT_LAYOUT = {name: (off, length) for name, off, length in agent_observation_layout()}


def _slice(obs: np.ndarray, block: str) -> np.ndarray:
    offset, length = _AGENT_LAYOUT[block]
    return obs[offset : offset + length]


def random_valid_policy(observation, mask, rng: np.random.Generator) -> int:
    """Uniform draw over the mask-true actions."""
    legal = np.flatnonzero(mask)
    return int(legal[rng.integers(len(legal))])


def _vote_for_scarcest(inventory) -> int:
    """Ranking that puts the least-held resource first, ties by id."""
    order = sorted(range(N_RESOURCES), key=lambda r: (inventory[r], r))
    return PERMUTATIONS.index(tuple(order))


def _surplus_ask(observation, mask, inventory) -> int | None:
    """Ask at price 5 for the most-held resource beyond one unit."""
    surplus = [(inventory[r], r) for r in range(N_RESOURCES) if inventory[r] >= 2]
    if not surplus:
        return None
    surplus.sort(key=lambda t: (-t[0], t[1]))
    for _, resource in surplus:
        action = agent_order_action(resource, ASK, 5)
        if mask[action]:
            return action
    return None


def _move_toward_needed(observation, mask, inventory, rng) -> int | None:
    """Step toward the nearest visible unit of a needed resource.

    Nearest by L1 distance in the window, ties broken by row, column,
    then resource id.
    """
    spatial = _slice(observation, "spatial").reshape(-1, WINDOW, WINDOW)
    needed = [r for r in range(N_RESOURCES) if inventory[r] == 0]
    if not needed:
        needed = list(range(N_RESOURCES))
    hits = np.argwhere(spatial[[2 + r for r in needed]] > 0)
    if len(hits) == 0:
        return None
    rows = hits[:, 1]
    cols = hits[:, 2]
    dist = np.abs(rows - HALF_WINDOW) + np.abs(cols - HALF_WINDOW)
    usable = dist > 0
    if not usable.any():
        return None
    hits, rows, cols, dist = hits[usable], rows[usable], cols[usable], dist[usable]
    order = np.lexsort((hits[:, 0], cols, rows, dist))
    pick = order[0]
    dr = int(rows[pick]) - HALF_WINDOW
    dc = int(cols[pick]) - HALF_WINDOW
    # Directions: 0 up, 1 down, 2 left, 3 right. Longer axis first.
    prefs = []
    vertical = 1 if dr > 0 else 0
    horizontal = 3 if dc > 0 else 2
    if abs(dr) >= abs(dc):
        if dr != 0:
            prefs.append(vertical)
        if dc != 0:
            prefs.append(horizontal)
    else:
        prefs.append(horizontal)
        if dr != 0:
            prefs.append(vertical)
    for direction in prefs:
        if mask[A_MOVE_BASE + direction]:
            return A_MOVE_BASE + direction
    return None


def _random_move(mask, rng) -> int | None:
    moves = [A_MOVE_BASE + d for d in range(4) if mask[A_MOVE_BASE + d]]
    if not moves:
        return None
    return int(moves[rng.integers(len(moves))])


def _expert_core(observation, mask, rng) -> int:
    inventory = _slice(observation, "inventory")[:3]
    for color in range(N_HOUSE_COLORS):
        action = agent_build_action(color)
        if mask[action]:
            return action
    action = _surplus_ask(observation, mask, inventory)
    if action is not None:
        return action
    action = _move_toward_needed(observation, mask, inventory, rng)
    if action is not None:
        return action
    action = _random_move(mask, rng)
    if action is not None:
        return action
    return A_NOOP


def _wants_vote(observation) -> bool:
    return float(_slice(observation, "period_progress")[0]) == 0.0


def heuristic_expert_policy(observation, mask, rng) -> int:
    if _wants_vote(observation):
        inventory = _slice(observation, "inventory")[:3]
        return agent_vote_action(_vote_for_scarcest(inventory))
    return _expert_core(observation, mask, rng)


def heuristic_novice_policy(observation, mask, rng) -> int:
    if _wants_vote(observation):
        inventory = _slice(observation, "inventory")[:3]
        return agent_vote_action(_vote_for_scarcest(inventory))
    multiplier, skill_units, houses_owned, _ = _slice(observation, "own_state")
    below_threshold = any(
        mask[agent_house_buy_action(c)] for c in range(N_HOUSE_COLORS)
    ) or mask[A_SKILL_BUY]
    if below_threshold:
        if houses_owned == 0:
            for color in range(N_HOUSE_COLORS):
                action = agent_house_buy_action(color)
                if mask[action]:
                    return action
            # No house on the market yet: gather and sell while waiting.
            return _expert_core(observation, mask, rng)
        if mask[A_SKILL_BUY]:
            return A_SKILL_BUY
    return _expert_core(observation, mask, rng)


# Planner policies ----------------------------------------------------------

PROGRESSIVE_RATES = (0.10, 0.10, 0.20, 0.25, 0.30, 0.35, 0.35)


def _rate_actions(rates) -> list:
    actions = []
    for bracket, rate in enumerate(rates):
        if rate is None:
            setting = KEEP_RATE_SETTING
        else:
            try:
                setting = RATE_GRID.index(rate)
            except ValueError:
                raise ConfigurationError(
                    f"rate {rate} is not on the 0.05 grid"
                ) from None
        actions.append(planner_rate_action(bracket, setting))
    return actions


def make_scripted_planner(kind: str, vote: int = DEFAULT_PERMUTATION_INDEX):
    """Planner that installs a fixed schedule at each period boundary.

    kinds: free_market (all rates 0), flat10 (all 0.10), progressive_us
    (a mildly progressive seven-bracket table). When planner votes are
    legal the policy also casts ``vote`` each boundary.
    """
    tables = {
        "free_market": (0.0,) * N_BRACKETS,
        "flat10": (0.10,) * N_BRACKETS,
        "progressive_us": PROGRESSIVE_RATES,
    }
    if kind not in tables:
        raise ConfigurationError(f"unknown planner policy {kind!r}")
    rates = tables[kind]

    def decide(observation, mask, rng) -> list:
        actions = []
        if mask[planner_rate_action(0, 0)]:
            actions.extend(_rate_actions(rates))
        if mask[planner_vote_action(vote)]:
            if not actions:
                # Off-boundary steps: cast the vote once per period start
                # only; stay quiet otherwise.
                return [P_NOOP]
            actions.append(planner_vote_action(vote))
        if not actions:
            actions.append(P_NOOP)
        return actions

    return decide


def make_random_planner():
    def decide(observation, mask, rng) -> list:
        return [random_valid_policy(observation, mask, rng)]

    return decide


# Registry ------------------------------------------------------------------

AGENT_POLICY_NAMES = ("random", "heuristic")
PLANNER_POLICY_NAMES = ("free_market", "flat10", "progressive_us", "random")


def make_agent_policy(name: str, is_expert: bool) -> PolicyHandle:
    if name == "random":
        return PolicyHandle("random", "agent", random_valid_policy)
    if name == "heuristic":
        decide = heuristic_expert_policy if is_expert else heuristic_novice_policy
        return PolicyHandle(f"heuristic_{'expert' if is_expert else 'novice'}",
                            "agent", decide)
    raise ConfigurationError(f"unknown agent policy {name!r}")


def make_planner_policy(name: str, vote: int = DEFAULT_PERMUTATION_INDEX) -> PolicyHandle:
    if name == "random":
        return PolicyHandle("random", "planner", make_random_planner())
    if name in ("free_market", "flat10", "progressive_us"):
        return PolicyHandle(name, "planner", make_scripted_planner(name, vote))
    raise ConfigurationError(f"unknown planner policy {name!r}")
