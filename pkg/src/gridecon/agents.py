"""Per-agent ledger state.

Coins live in integer cents split between a free and an escrowed pot, so
auction escrow can never drive a balance negative and the ledger total is
always free + escrowed. Payment multipliers are integer milli-units, which
makes threshold crossings after repeated skill purchases exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .constants import N_RESOURCES
from .fixedpoint import MILLI


@dataclass
class AgentState:
    agent_id: int
    is_expert: bool
    position: tuple
    multiplier_milli: int
    gather_skill: float
    coin_cents: int = 0
    escrow_cents: int = 0
    inventory: list = field(default_factory=lambda: [0] * N_RESOURCES)
    escrow_units: list = field(default_factory=lambda: [0] * N_RESOURCES)
    labor_micro: int = 0
    skill_units_bought: int = 0

    @property
    def multiplier(self) -> float:
        return self.multiplier_milli / MILLI

    @property
    def total_coin_cents(self) -> int:
        return self.coin_cents + self.escrow_cents

    def total_units(self, resource: int) -> int:
        return self.inventory[resource] + self.escrow_units[resource]

    # Escrow moves ----------------------------------------------------------

    def lock_coins(self, cents: int) -> None:
        if cents > self.coin_cents:
            raise ValueError("cannot escrow more coins than held")
        self.coin_cents -= cents
        self.escrow_cents += cents

    def release_coins(self, cents: int) -> None:
        if cents > self.escrow_cents:
            raise ValueError("cannot release more coins than escrowed")
        self.escrow_cents -= cents
        self.coin_cents += cents

    def spend_escrowed(self, cents: int) -> None:
        if cents > self.escrow_cents:
            raise ValueError("cannot spend more coins than escrowed")
        self.escrow_cents -= cents

    def lock_unit(self, resource: int) -> None:
        if self.inventory[resource] < 1:
            raise ValueError("cannot escrow a unit that is not held")
        self.inventory[resource] -= 1
        self.escrow_units[resource] += 1

    def release_unit(self, resource: int) -> None:
        if self.escrow_units[resource] < 1:
            raise ValueError("no escrowed unit to release")
        self.escrow_units[resource] -= 1
        self.inventory[resource] += 1

    def deliver_escrowed_unit(self, resource: int) -> None:
        if self.escrow_units[resource] < 1:
            raise ValueError("no escrowed unit to deliver")
        self.escrow_units[resource] -= 1


def spawn_agents(config, positions, rng) -> list:
    """Create the agent roster: the first half experts, the rest novices.

    Multipliers are drawn per role from the configured uniform ranges and
    rounded to milli-units; gather skill is uniform over its range.
    """
    agents = []
    n_experts = config.n_experts
    for agent_id, position in enumerate(positions):
        is_expert = agent_id < n_experts
        if is_expert:
            lo, hi = config.expert_multiplier_low, config.expert_multiplier_high
        else:
            lo, hi = config.novice_multiplier_low, config.novice_multiplier_high
        multiplier_milli = round(rng.uniform(lo, hi) * MILLI)
        gather_skill = float(
            rng.uniform(config.gather_skill_low, config.gather_skill_high)
        )
        agents.append(
            AgentState(
                agent_id=agent_id,
                is_expert=is_expert,
                position=position,
                multiplier_milli=multiplier_milli,
                gather_skill=gather_skill,
                coin_cents=config.starting_coin_cents,
            )
        )
    return agents


def expert_mean_multiplier_exceeded(agent: AgentState, agents) -> bool:
    """Whether the agent's multiplier has reached the expert average.

    Compared exactly in milli-units: buyer * n_experts >= sum of expert
    multipliers.
    """
    experts = [a for a in agents if a.is_expert]
    if not experts:
        return True
    total = sum(a.multiplier_milli for a in experts)
    return agent.multiplier_milli * len(experts) >= total
