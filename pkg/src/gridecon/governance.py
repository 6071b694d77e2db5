"""Rank votes, institutions, Borda aggregation, and revenue allocation.

Collected tax revenue is turned into per-resource investment according to
the active governing system:

* full_libertarian   - every taxpayer splits its own payment by its own
                       latest ranking.
* semi_libertarian_utilitarian - the planner Borda-aggregates the rankings
                       of the institution-eligible agents and splits the
                       total by the winner ranking.
* full_utilitarian   - the planner splits the total by its own ranking.

Invested coins raise next-period regeneration rates multiplicatively,
capped at ``regen_max``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .constants import (
    DEFAULT_PERMUTATION_INDEX,
    N_PERMUTATIONS,
    N_RESOURCES,
    PERMUTATIONS,
)


class GoverningSystem(str, Enum):
    FULL_LIBERTARIAN = "full_libertarian"
    SEMI_LIBERTARIAN_UTILITARIAN = "semi_libertarian_utilitarian"
    FULL_UTILITARIAN = "full_utilitarian"


class Institution(str, Enum):
    INCLUSIVE = "inclusive"
    ARBITRARY = "arbitrary"
    EXTRACTIVE = "extractive"


class PlannerReward(str, Enum):
    EQ_TIMES_PROD = "eq_times_prod"
    INVERSE_INCOME = "inverse_income"


# Points per rank position when tallying a three-candidate Borda count.
BORDA_POINTS = (2, 1, 0)

# Relative investment weight per rank position; sums to 6 so integer
# revenue splits stay exact under largest-remainder rounding.
RANK_WEIGHTS = (3, 2, 1)
RANK_WEIGHT_TOTAL = 6


@dataclass(frozen=True)
class GoverningConfig:
    """Which system/institution is active and what the planner optimises."""

    system: GoverningSystem = GoverningSystem.SEMI_LIBERTARIAN_UTILITARIAN
    institution: Institution = Institution.INCLUSIVE
    planner_reward: PlannerReward = PlannerReward.EQ_TIMES_PROD


@dataclass
class VoteRegistry:
    """Most recent ranking cast by each actor within the current tax period.

    ``agent_votes[i]`` is a permutation index or None when agent ``i`` has
    not voted this period; missing votes resolve to the fixed default
    ranking so downstream allocation is always total.
    """

    n_agents: int
    agent_votes: list = field(default=None)
    planner_vote: int | None = None

    def __post_init__(self):
        if self.agent_votes is None:
            self.agent_votes = [None] * self.n_agents

    def record_agent_vote(self, agent_id: int, permutation_index: int) -> None:
        if not 0 <= permutation_index < N_PERMUTATIONS:
            raise ValueError(f"invalid permutation index {permutation_index}")
        self.agent_votes[agent_id] = permutation_index

    def record_planner_vote(self, permutation_index: int) -> None:
        if not 0 <= permutation_index < N_PERMUTATIONS:
            raise ValueError(f"invalid permutation index {permutation_index}")
        self.planner_vote = permutation_index

    def effective_agent_vote(self, agent_id: int) -> int:
        vote = self.agent_votes[agent_id]
        return DEFAULT_PERMUTATION_INDEX if vote is None else vote

    def effective_planner_vote(self) -> int:
        return (
            DEFAULT_PERMUTATION_INDEX
            if self.planner_vote is None
            else self.planner_vote
        )

    def clear(self) -> None:
        self.agent_votes = [None] * self.n_agents
        self.planner_vote = None


def arbitrary_rng(seed: int, period: int) -> np.random.Generator:
    """Random stream for the arbitrary institution's half-draw.

    Keyed on (seed, period) only, so the eligible set for a period is
    reproducible regardless of how other streams were consumed.
    """
    return np.random.default_rng([seed, period, 0xA5B1])


def filter_voters(
    institution: Institution,
    coin_totals: list,
    seed: int,
    period: int,
) -> list:
    """Return the sorted agent ids whose votes the planner counts.

    inclusive: everyone. arbitrary: a uniformly drawn half, redrawn per
    period. extractive: the wealthiest half, ties broken by lower id.
    """
    n = len(coin_totals)
    half = n // 2
    if institution is Institution.INCLUSIVE:
        return list(range(n))
    if institution is Institution.ARBITRARY:
        rng = arbitrary_rng(seed, period)
        chosen = rng.choice(n, size=half, replace=False)
        return sorted(int(i) for i in chosen)
    if institution is Institution.EXTRACTIVE:
        order = sorted(range(n), key=lambda i: (-coin_totals[i], i))
        return sorted(order[:half])
    raise ValueError(f"unknown institution {institution!r}")


def borda_aggregate(permutation_indices) -> int:
    """Aggregate rankings into one via a three-candidate Borda count.

    Resources are ordered by total points; exact ties fall back to the
    fixed resource order (wood before stone before iron).
    """
    votes = list(permutation_indices)
    if not votes:
        raise ValueError("borda_aggregate requires at least one vote")
    points = [0] * N_RESOURCES
    for index in votes:
        ranking = PERMUTATIONS[index]
        for position, resource in enumerate(ranking):
            points[resource] += BORDA_POINTS[position]
    winner = tuple(sorted(range(N_RESOURCES), key=lambda r: (-points[r], r)))
    return PERMUTATIONS.index(winner)


def split_by_ranking(amount_cents: int, permutation_index: int) -> list:
    """Split an integer coin amount across resources by rank weight.

    Weights 3/2/1 out of 6 go to the first/second/third ranked resource.
    Largest-remainder rounding (ties to the lower resource id) keeps the
    split exactly equal to the input amount.
    """
    if amount_cents < 0:
        raise ValueError("cannot split a negative amount")
    ranking = PERMUTATIONS[permutation_index]
    weight_of = [0] * N_RESOURCES
    for position, resource in enumerate(ranking):
        weight_of[resource] = RANK_WEIGHTS[position]
    shares = [0] * N_RESOURCES
    remainders = []
    for resource in range(N_RESOURCES):
        raw = amount_cents * weight_of[resource]
        shares[resource] = raw // RANK_WEIGHT_TOTAL
        remainders.append((-(raw % RANK_WEIGHT_TOTAL), resource))
    leftover = amount_cents - sum(shares)
    for _, resource in sorted(remainders)[:leftover]:
        shares[resource] += 1
    return shares


def allocate_revenue(
    system: GoverningSystem,
    registry: VoteRegistry,
    tax_paid_cents: list,
    eligible_voters: list | None,
) -> list:
    """Convert this period's collected taxes into a per-resource allocation.

    ``tax_paid_cents`` holds each agent's payment; ``eligible_voters`` is
    only consulted under the semi system. The returned cents sum exactly to
    the total revenue.
    """
    revenue = sum(tax_paid_cents)
    if system is GoverningSystem.FULL_LIBERTARIAN:
        total = [0] * N_RESOURCES
        for agent_id, paid in enumerate(tax_paid_cents):
            if paid == 0:
                continue
            share = split_by_ranking(paid, registry.effective_agent_vote(agent_id))
            for resource in range(N_RESOURCES):
                total[resource] += share[resource]
        return total
    if system is GoverningSystem.SEMI_LIBERTARIAN_UTILITARIAN:
        if eligible_voters is None:
            raise ValueError("semi system requires an eligible voter set")
        votes = [registry.effective_agent_vote(i) for i in eligible_voters]
        aggregate = borda_aggregate(votes)
        return split_by_ranking(revenue, aggregate)
    if system is GoverningSystem.FULL_UTILITARIAN:
        return split_by_ranking(revenue, registry.effective_planner_vote())
    raise ValueError(f"unknown governing system {system!r}")


def boosted_regen_profile(
    base_regen,
    allocation_cents,
    alpha: float,
    coin_scale: float,
    regen_max: float,
) -> tuple:
    """Next-period regeneration rates after investing an allocation.

    Each resource's base rate is scaled by (1 + alpha * coins / coin_scale)
    and clamped to ``regen_max``. The boost is always computed from the
    base rate, so investment never compounds across periods.
    """
    profile = []
    for resource in range(N_RESOURCES):
        coins = allocation_cents[resource] / 100.0
        boosted = base_regen[resource] * (1.0 + alpha * coins / coin_scale)
        profile.append(min(regen_max, boosted))
    return tuple(profile)
