"""Simulation facade: episode loop, action catalogs and masks,
observations, and per-step rewards for agents and planner.

Action catalogs
---------------
Agents choose from 84 discrete actions:

====================  =========  =====================================
ids                   count      meaning
====================  =========  =====================================
0                     1          no-op
1..4                  4          move up, down, left, right
5..70                 66         limit order: resource x side x price
71..73                3          build red, blue, green
74..76                3          buy house red, blue, green
77                    1          buy one skill unit
78..83                6          vote a resource ranking
====================  =========  =====================================

Order ids decompose as ``5 + resource*22 + side*11 + price`` with side
0 = bid, 1 = ask and integer prices 0..10.

The planner chooses from 161 discrete actions:

====================  =========  =====================================
ids                   count      meaning
====================  =========  =====================================
0                     1          no-op
1..154                154        bracket x setting; settings 0..20 map
                                 to rates 0.00..1.00 in 0.05 steps and
                                 setting 21 keeps the current rate
155..160              6          vote a resource ranking
====================  =========  =====================================

Rate settings are only legal on the first step of a tax period. The
planner may submit several actions on those steps (one per bracket);
agents always submit exactly one action per step.

Step resolution
---------------
Within a step, actions resolve in a fixed phase order: planner rate
settings, votes, market orders (agent-id order), house and skill trades,
builds, moves with gathering, order expiry, resource regeneration, and
finally tax collection on period-last steps. Two kinds of same-step
conflict resolve as quiet no-effect outcomes rather than errors: a move
into a cell somebody else just took, and a house purchase after an
earlier buyer took the last sellable house this step.

Rewards are first differences of fixed-point utility (agents) and of
the configured social welfare value (planner), so reward sums telescope
exactly to the final level values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .agents import AgentState, spawn_agents
from .config import (
    KEEP_RATE_SETTING,
    N_BRACKET_SETTINGS,
    N_BRACKETS,
    RATE_GRID,
    EconomyConfig,
)
from .constants import (
    ASK,
    BID,
    HOUSE_RECIPES,
    N_HOUSE_COLORS,
    N_PERMUTATIONS,
    N_RESOURCES,
)
from .fiscal import (
    compute_tax,
    marginal_rate,
    redistribution_shares,
    zero_schedule,
)
from .fixedpoint import MICRO, MILLI, micro_to_float
from .governance import (
    GoverningSystem,
    VoteRegistry,
    allocate_revenue,
    boosted_regen_profile,
    filter_voters,
)
from .market import (
    OrderBook,
    build_income,
    execute_house_trade,
    execute_skill_trade,
)
from .metrics import MetricsRecord, agent_utility, build_metrics_record, social_welfare
from .world import (
    DIRECTION_DELTAS,
    apply_move,
    draw_start_positions,
    init_world,
    place_house,
    regen_step,
)

LAYOUT_VERSION = "1"

N_AGENT_ACTIONS = 84
N_PLANNER_ACTIONS = 161

A_NOOP = 0
A_MOVE_BASE = 1
A_ORDER_BASE = 5
A_BUILD_BASE = 71
A_HOUSE_BUY_BASE = 74
A_SKILL_BUY = 77
A_VOTE_BASE = 78

P_NOOP = 0
P_RATE_BASE = 1
P_VOTE_BASE = 155

WINDOW = 11
HALF_WINDOW = WINDOW // 2
N_SPATIAL_CHANNELS = 13
N_PRICE_LEVELS = 11


class ContractViolation(RuntimeError):
    """An actor submitted an action its mask marked illegal."""


def agent_order_action(resource: int, side: int, price: int) -> int:
    return A_ORDER_BASE + resource * 22 + side * N_PRICE_LEVELS + price

def agent_build_action(color: int) -> int:
    return A_BUILD_BASE + color

def agent_house_buy_action(color: int) -> int:
    return A_HOUSE_BUY_BASE + color

def agent_vote_action(permutation_index: int) -> int:
    return A_VOTE_BASE + permutation_index

def planner_rate_action(bracket: int, setting: int) -> int:
    return P_RATE_BASE + bracket * N_BRACKET_SETTINGS + setting

def planner_vote_action(permutation_index: int) -> int:
    return P_VOTE_BASE + permutation_index


def decode_agent_action(action: int):
    """Map an agent action id to (kind, params)."""
    if action == A_NOOP:
        return "noop", ()
    if A_MOVE_BASE <= action < A_ORDER_BASE:
        return "move", (action - A_MOVE_BASE,)
    if A_ORDER_BASE <= action < A_BUILD_BASE:
        rel = action - A_ORDER_BASE
        resource, rest = divmod(rel, 22)
        side, price = divmod(rest, N_PRICE_LEVELS)
        return "order", (resource, side, price)
    if A_BUILD_BASE <= action < A_HOUSE_BUY_BASE:
        return "build", (action - A_BUILD_BASE,)
    if A_HOUSE_BUY_BASE <= action < A_SKILL_BUY:
        return "house_buy", (action - A_HOUSE_BUY_BASE,)
    if action == A_SKILL_BUY:
        return "skill_buy", ()
    if A_VOTE_BASE <= action < N_AGENT_ACTIONS:
        return "vote", (action - A_VOTE_BASE,)
    raise ValueError(f"agent action id out of range: {action}")


def decode_planner_action(action: int):
    """Map a planner action id to (kind, params)."""
    if action == P_NOOP:
        return "noop", ()
    if P_RATE_BASE <= action < P_VOTE_BASE:
        rel = action - P_RATE_BASE
        bracket, setting = divmod(rel, N_BRACKET_SETTINGS)
        return "rate", (bracket, setting)
    if P_VOTE_BASE <= action < N_PLANNER_ACTIONS:
        return "vote", (action - P_VOTE_BASE,)
    raise ValueError(f"planner action id out of range: {action}")


def _block(layout, name, length):
    offset = layout[-1][1] + layout[-1][2] if layout else 0
    layout.append((name, offset, length))


def agent_observation_layout(n_agents: int = 6):
    """(name, offset, length) blocks of the flat agent observation."""
    layout = []
    _block(layout, "spatial", N_SPATIAL_CHANNELS * WINDOW * WINDOW)
    _block(layout, "inventory", 4)          # wood, stone, iron, coin
    _block(layout, "own_state", 4)          # multiplier, skill units, houses, labor
    _block(layout, "market_own_bids", N_RESOURCES * N_PRICE_LEVELS)
    _block(layout, "market_own_asks", N_RESOURCES * N_PRICE_LEVELS)
    _block(layout, "market_other_bids", N_RESOURCES * N_PRICE_LEVELS)
    _block(layout, "market_other_asks", N_RESOURCES * N_PRICE_LEVELS)
    _block(layout, "market_avg_price", N_RESOURCES)
    _block(layout, "market_trade_counts", N_RESOURCES * N_PRICE_LEVELS)
    _block(layout, "tax_rates", N_BRACKETS)
    _block(layout, "period_progress", 1)
    _block(layout, "own_marginal_rate", 1)
    _block(layout, "prev_sorted_incomes", n_agents)
    _block(layout, "own_vote", N_PERMUTATIONS)
    return tuple(layout)


def planner_observation_layout(n_agents: int = 6):
    """(name, offset, length) blocks of the flat planner observation.

    Deliberately carries no payment-multiplier or skill fields; those
    are private to agents.
    """
    layout = []
    _block(layout, "map_summary", 10)
    _block(layout, "inventories", n_agents * 4)
    _block(layout, "market_bids", N_RESOURCES * N_PRICE_LEVELS)
    _block(layout, "market_asks", N_RESOURCES * N_PRICE_LEVELS)
    _block(layout, "market_avg_price", N_RESOURCES)
    _block(layout, "market_trade_counts", N_RESOURCES * N_PRICE_LEVELS)
    _block(layout, "tax_rates", N_BRACKETS)
    _block(layout, "period_progress", 1)
    _block(layout, "prev_incomes", n_agents)
    _block(layout, "prev_marginal_rates", n_agents)
    _block(layout, "agent_votes", n_agents * N_PERMUTATIONS)
    _block(layout, "planner_vote", N_PERMUTATIONS)
    return tuple(layout)


def layout_size(layout) -> int:
    name, offset, length = layout[-1]
    return offset + length


AGENT_OBSERVATION_SIZE = layout_size(agent_observation_layout())
PLANNER_OBSERVATION_SIZE = layout_size(planner_observation_layout())


@dataclass
class StepRewards:
    """Fixed-point reward deltas; float views for consumers."""

    agent_micro: list
    planner_micro: int

    @property
    def agent(self):
        return [micro_to_float(r) for r in self.agent_micro]

    @property
    def planner(self) -> float:
        return micro_to_float(self.planner_micro)


@dataclass
class Observations:
    agent: list              # one float64 vector per agent
    planner: np.ndarray


class Simulation:
    """One deterministic episode environment.

    Strictly single-threaded; independent instances may run in
    parallel. All randomness flows from the seed through named
    substreams, so a (seed, config, action stream) triple fully
    determines every event.
    """

    def __init__(self, config: EconomyConfig, seed: int):
        config.validate()
        self.config = config
        self.seed = int(seed)
        self.done = False
        self._was_reset = False

    # Lifecycle -------------------------------------------------------------

    def reset(self) -> Observations:
        config = self.config
        root = np.random.SeedSequence(self.seed)
        streams = root.spawn(5)
        self._world_rng = np.random.default_rng(streams[0])
        self._spawn_rng = np.random.default_rng(streams[1])
        self._regen_rng = np.random.default_rng(streams[2])
        self._market_rng = np.random.default_rng(streams[3])
        self._jitter_rng = np.random.default_rng(streams[4])

        self.grid = init_world(config, self._world_rng)
        positions = draw_start_positions(self.grid, config.n_agents, self._spawn_rng)
        self.agents = spawn_agents(config, positions, self._spawn_rng)
        self.book = OrderBook(
            config.max_price + 1, config.max_open_orders, config.order_lifetime
        )
        self.schedule = zero_schedule(config.cutoff_cents)
        self.registry = VoteRegistry(config.n_agents)
        self.step_index = 0
        self.period = 0
        self.done = False
        self._was_reset = True
        self._period_start_cents = [a.total_coin_cents for a in self.agents]
        self.prev_incomes_cents = [0] * config.n_agents
        self.prev_marginal_rates = [0.0] * config.n_agents
        self.period_records: list[MetricsRecord] = []
        self._period_builds = 0
        self._period_house_trades = 0
        self._period_skill_trades = 0
        self.total_builds = 0
        self.total_house_trades = 0
        self.total_skill_trades = 0
        self._threshold_milli = round(config.build_threshold * MILLI)
        self._labor = config.labor_micro
        self._agent_obs_size = layout_size(agent_observation_layout(config.n_agents))
        self._planner_obs_size = layout_size(
            planner_observation_layout(config.n_agents)
        )
        self._mask_cache = {}
        self._u_prev = [self._utility_micro(a) for a in self.agents]
        self._swf_prev = self._swf_micro()
        return self._observe()

    # Fixed-point level values ---------------------------------------------

    def _utility_micro(self, agent: AgentState) -> int:
        u = agent_utility(
            agent.total_coin_cents / 100,
            micro_to_float(agent.labor_micro),
            self.config.crra_eta,
        )
        return round(u * MICRO)

    def _swf_micro(self) -> int:
        coins = [a.total_coin_cents / 100 for a in self.agents]
        utils = [micro_to_float(self._utility_micro(a)) for a in self.agents]
        value = social_welfare(
            self.config.governing.planner_reward.value,
            coins,
            utils,
            self.config.inverse_income_floor,
        )
        return round(value * MICRO)

    # Masks -----------------------------------------------------------------

    def agent_mask(self, agent_id: int) -> np.ndarray:
        """Boolean legality mask over the agent catalog.

        Cached within a step; treat the returned array as read-only.
        """
        cached = self._mask_cache.get(agent_id)
        if cached is not None:
            return cached
        mask = np.zeros(N_AGENT_ACTIONS, dtype=bool)
        mask[A_NOOP] = True
        agent = self.agents[agent_id]
        row, col = agent.position
        for direction, (dr, dc) in enumerate(DIRECTION_DELTAS):
            if self.grid.passable(row + dr, col + dc, agent_id):
                mask[A_MOVE_BASE + direction] = True
        counts, max_bid, min_ask = self.book.agent_stats(agent_id)
        cap = self.config.max_open_orders
        affordable = agent.coin_cents // 100
        for resource in range(N_RESOURCES):
            if counts[resource] >= cap:
                continue
            base = A_ORDER_BASE + resource * 22
            bid_hi = min(
                affordable,
                N_PRICE_LEVELS - 1 if min_ask[resource] is None
                else min_ask[resource] - 1,
            )
            if bid_hi >= 0:
                mask[base : base + bid_hi + 1] = True
            if agent.inventory[resource] >= 1:
                ask_lo = 0 if max_bid[resource] is None else max_bid[resource] + 1
                if ask_lo < N_PRICE_LEVELS:
                    mask[base + N_PRICE_LEVELS + ask_lo : base + 22] = True
        can_build = (
            agent.multiplier_milli >= self._threshold_milli
            and self.grid.buildable(row, col)
        )
        if can_build:
            for color, recipe in enumerate(HOUSE_RECIPES):
                if all(agent.inventory[r] >= 1 for r in recipe):
                    mask[agent_build_action(color)] = True
        if agent.multiplier_milli < self._threshold_milli:
            for color in range(N_HOUSE_COLORS):
                if any(
                    h.color == color and self.agents[h.owner].is_expert
                    for h in self.grid.houses
                ):
                    mask[agent_house_buy_action(color)] = True
            if any(
                a.is_expert and a.multiplier_milli > agent.multiplier_milli
                for a in self.agents
            ):
                mask[A_SKILL_BUY] = True
        mask[A_VOTE_BASE : A_VOTE_BASE + N_PERMUTATIONS] = True
        self._mask_cache[agent_id] = mask
        return mask

    def planner_mask(self) -> np.ndarray:
        mask = np.zeros(N_PLANNER_ACTIONS, dtype=bool)
        mask[P_NOOP] = True
        if self.step_index % self.config.period_length == 0:
            mask[P_RATE_BASE:P_VOTE_BASE] = True
        if self.config.governing.system is GoverningSystem.FULL_UTILITARIAN:
            mask[P_VOTE_BASE:] = True
        return mask

    def legal_actions(self, actor: str, index: int = 0) -> np.ndarray:
        if actor == "agent":
            return self.agent_mask(index)
        if actor == "planner":
            return self.planner_mask()
        raise ValueError(f"unknown actor kind: {actor}")

    # Stepping --------------------------------------------------------------

    def step(self, agent_actions, planner_action=P_NOOP):
        """Advance one step. Returns (observations, rewards, events, done)."""
        if not self._was_reset:
            raise RuntimeError("call reset() before step()")
        if self.done:
            raise RuntimeError("episode is finished; call reset()")
        config = self.config
        agent_actions = [int(a) for a in agent_actions]
        if len(agent_actions) != config.n_agents:
            raise ContractViolation(
                f"expected {config.n_agents} agent actions, got {len(agent_actions)}"
            )
        if isinstance(planner_action, (int, np.integer)):
            planner_batch = [int(planner_action)]
        else:
            planner_batch = [int(a) for a in planner_action]

        planner_mask = self.planner_mask()
        for action in planner_batch:
            if not 0 <= action < N_PLANNER_ACTIONS or not planner_mask[action]:
                raise ContractViolation(f"planner submitted illegal action {action}")
        decoded = []
        for agent_id, action in enumerate(agent_actions):
            mask = self.agent_mask(agent_id)
            if not 0 <= action < N_AGENT_ACTIONS or not mask[action]:
                raise ContractViolation(
                    f"agent {agent_id} submitted illegal action {action}"
                )
            decoded.append(decode_agent_action(action))

        events = []
        step = self.step_index

        # Phase 1: planner rate settings.
        rates_changed = False
        for action in planner_batch:
            kind, params = decode_planner_action(action)
            if kind == "rate":
                bracket, setting = params
                if setting != KEEP_RATE_SETTING:
                    self.schedule = self.schedule.with_rate(
                        bracket, RATE_GRID[setting]
                    )
                rates_changed = True
        if rates_changed:
            events.append(
                {
                    "kind": "rates_set",
                    "step": step,
                    "rates": list(self.schedule.rates),
                }
            )

        # Phase 2: votes, agents then planner.
        for agent_id, (kind, params) in enumerate(decoded):
            if kind == "vote":
                self.registry.record_agent_vote(agent_id, params[0])
                events.append(
                    {
                        "kind": "vote",
                        "step": step,
                        "agent": agent_id,
                        "ranking": params[0],
                    }
                )
        for action in planner_batch:
            kind, params = decode_planner_action(action)
            if kind == "vote":
                self.registry.record_planner_vote(params[0])
                events.append(
                    {"kind": "planner_vote", "step": step, "ranking": params[0]}
                )

        # Phase 3: market orders in agent-id order.
        for agent_id, (kind, params) in enumerate(decoded):
            if kind != "order":
                continue
            resource, side, price = params
            agent = self.agents[agent_id]
            agent.labor_micro += self._labor["trade"]
            trade = self.book.submit(
                agent, resource, side, price, step, self.agents, self._market_rng
            )
            events.append(
                {
                    "kind": "order",
                    "step": step,
                    "agent": agent_id,
                    "resource": resource,
                    "side": side,
                    "price": price,
                }
            )
            if trade is not None:
                events.append(
                    {
                        "kind": "trade",
                        "step": step,
                        "resource": trade.resource,
                        "price": trade.price,
                        "buyer": trade.buyer,
                        "seller": trade.seller,
                    }
                )

        # Phase 4: house and skill trades in agent-id order.
        for agent_id, (kind, params) in enumerate(decoded):
            agent = self.agents[agent_id]
            if kind == "house_buy":
                trade = execute_house_trade(
                    agent, params[0], self.grid, self.agents,
                    self._jitter_rng, config, step,
                )
                if trade is None:
                    events.append(
                        {
                            "kind": "house_trade_bounce",
                            "step": step,
                            "agent": agent_id,
                            "color": params[0],
                        }
                    )
                else:
                    agent.labor_micro += self._labor["house_trade"]
                    self._period_house_trades += 1
                    self.total_house_trades += 1
                    events.append(
                        {
                            "kind": "house_trade",
                            "step": step,
                            "buyer": trade.buyer,
                            "seller": trade.seller,
                            "color": trade.color,
                            "buyer_income_cents": trade.buyer_income_cents,
                            "seller_income_cents": trade.seller_income_cents,
                        }
                    )
            elif kind == "skill_buy":
                trade = execute_skill_trade(
                    agent, self.agents, self._jitter_rng, config, step
                )
                agent.labor_micro += self._labor["skill_trade"]
                self._period_skill_trades += 1
                self.total_skill_trades += 1
                events.append(
                    {
                        "kind": "skill_trade",
                        "step": step,
                        "buyer": trade.buyer,
                        "seller": trade.seller,
                        "buyer_income_cents": trade.buyer_income_cents,
                        "seller_income_cents": trade.seller_income_cents,
                    }
                )

        # Phase 5: builds in agent-id order.
        for agent_id, (kind, params) in enumerate(decoded):
            if kind != "build":
                continue
            agent = self.agents[agent_id]
            color = params[0]
            house = place_house(self.grid, agent, color, step)
            income = build_income(agent, self._jitter_rng, config)
            agent.coin_cents += income
            agent.labor_micro += self._labor["build"]
            self._period_builds += 1
            self.total_builds += 1
            events.append(
                {
                    "kind": "build",
                    "step": step,
                    "agent": agent_id,
                    "color": color,
                    "cell": list(house.cell),
                    "income_cents": income,
                }
            )

        # Phase 6: moves and gathers in agent-id order.
        for agent_id, (kind, params) in enumerate(decoded):
            if kind != "move":
                continue
            agent = self.agents[agent_id]
            outcome = apply_move(self.grid, agent, params[0], self._world_rng)
            if outcome["moved"]:
                agent.labor_micro += self._labor["move"]
                if outcome["gathered"]:
                    agent.labor_micro += self._labor["gather"]
            events.append(
                {
                    "kind": "move",
                    "step": step,
                    "agent": agent_id,
                    "direction": params[0],
                    "moved": outcome["moved"],
                    "gathered": outcome["gathered"],
                    "resource": outcome["resource"],
                }
            )

        # Phase 7: order expiry.
        for order in self.book.expire(step, self.agents):
            events.append(
                {
                    "kind": "order_expired",
                    "step": step,
                    "agent": order.agent_id,
                    "resource": order.resource,
                    "side": order.side,
                    "price": order.price,
                    "placed_at": order.placed_at,
                }
            )

        # Phase 8: resource regeneration.
        spawned = regen_step(self.grid, self._regen_rng)
        if spawned:
            events.append(
                {
                    "kind": "regen",
                    "step": step,
                    "cells": [
                        [int(res), int(row), int(col)]
                        for res, row, col in spawned
                    ],
                }
            )

        # Phase 9: period-end tax collection and disposition.
        if step % config.period_length == config.period_length - 1:
            events.extend(self._collect_taxes(step))

        rewards = self._compute_rewards()
        self._mask_cache = {}
        self.step_index += 1
        self.done = self.step_index >= config.episode_steps
        return self._observe(), rewards, events, self.done

    def _compute_rewards(self) -> StepRewards:
        u_now = [self._utility_micro(a) for a in self.agents]
        agent_rewards = [u - p for u, p in zip(u_now, self._u_prev)]
        self._u_prev = u_now
        swf_now = self._swf_micro()
        planner_reward = swf_now - self._swf_prev
        self._swf_prev = swf_now
        return StepRewards(agent_rewards, planner_reward)

    # Taxes -----------------------------------------------------------------

    def _free_coins_for_tax(self, agent: AgentState, tax_cents: int, events, step):
        """Cancel the agent's newest resting bids until the tax is payable.

        A resting bid escrows its full price, so canceling bids always
        frees enough: taxable income never exceeds total coins.
        """
        if agent.coin_cents >= tax_cents:
            return
        bids = [
            o
            for o in self.book.open_orders(agent.agent_id)
            if o.side == BID
        ]
        bids.sort(key=lambda o: (-o.placed_at, -o.order_id))
        for order in bids:
            if agent.coin_cents >= tax_cents:
                break
            self.book.levels[order.side][order.resource][order.price].remove(order)
            agent.release_coins(order.price * 100)
            events.append(
                {
                    "kind": "order_canceled",
                    "step": step,
                    "agent": agent.agent_id,
                    "resource": order.resource,
                    "side": order.side,
                    "price": order.price,
                    "reason": "tax_due",
                }
            )

    def _collect_taxes(self, step: int):
        config = self.config
        events = []
        totals_before = [a.total_coin_cents for a in self.agents]
        incomes = [
            t - s for t, s in zip(totals_before, self._period_start_cents)
        ]
        taxes = [compute_tax(self.schedule, z) for z in incomes]
        for agent, tax in zip(self.agents, taxes):
            self._free_coins_for_tax(agent, tax, events, step)
            agent.coin_cents -= tax
        revenue = sum(taxes)

        shares = None
        allocation = None
        eligible = None
        if config.disposition == "redistribute":
            shares = redistribution_shares(revenue, config.n_agents)
            for agent, share in zip(self.agents, shares):
                agent.coin_cents += share
        else:
            eligible = filter_voters(
                config.governing.institution, totals_before, self.seed, self.period
            )
            allocation = allocate_revenue(
                config.governing.system, self.registry, taxes, eligible
            )
            self.grid.regen_profile = boosted_regen_profile(
                config.base_regen,
                allocation,
                config.invest_alpha,
                config.invest_coin_scale,
                config.regen_max,
            )

        self.prev_incomes_cents = incomes
        self.prev_marginal_rates = [
            marginal_rate(self.schedule, z) for z in incomes
        ]
        events.append(
            {
                "kind": "collection",
                "step": step,
                "period": self.period,
                "rates": list(self.schedule.rates),
                "incomes_cents": incomes,
                "taxes_cents": taxes,
                "revenue_cents": revenue,
                "shares_cents": shares,
                "allocation_cents": allocation,
                "eligible_voters": eligible,
                "agent_votes": [
                    self.registry.effective_agent_vote(i)
                    for i in range(config.n_agents)
                ],
                "planner_vote": self.registry.effective_planner_vote(),
                "coin_cents": [a.total_coin_cents for a in self.agents],
                "labor_micro": [a.labor_micro for a in self.agents],
                "regen_profile": list(self.grid.regen_profile),
            }
        )
        self.period_records.append(
            build_metrics_record(
                period=self.period,
                coin_cents=[a.total_coin_cents for a in self.agents],
                labor_micro=[a.labor_micro for a in self.agents],
                utility_micro=[self._utility_micro(a) for a in self.agents],
                swf_kind=config.governing.planner_reward.value,
                inverse_income_floor=config.inverse_income_floor,
                builds=self._period_builds,
                house_trades=self._period_house_trades,
                skill_trades=self._period_skill_trades,
            )
        )
        self.registry.clear()
        self.period += 1
        self._period_start_cents = [a.total_coin_cents for a in self.agents]
        self._period_builds = 0
        self._period_house_trades = 0
        self._period_skill_trades = 0
        return events

    # Observations ----------------------------------------------------------

    def _frame(self):
        """Shared per-step inputs for observation assembly.

        Returns (padded channel stack, padded house-owner grid, per-agent
        book depth, total book depth). The stack holds the twelve
        agent-independent spatial channels with a HALF_WINDOW pad ring;
        channel 0 flags padding.
        """
        grid = self.grid
        h, w = grid.height, grid.width
        pad = HALF_WINDOW
        stack = np.zeros((N_SPATIAL_CHANNELS - 1, h + 2 * pad, w + 2 * pad))
        stack[0] = 1.0
        inner = stack[:, pad : pad + h, pad : pad + w]
        inner[0] = 0.0
        inner[1] = grid.water
        for resource in range(N_RESOURCES):
            is_source = grid.source == resource
            inner[5 + resource] = is_source
            inner[2 + resource] = is_source & grid.unit
        for color in range(N_HOUSE_COLORS):
            inner[8 + color] = grid.house_color == color
        inner[11] = grid.agent_at >= 0
        owner = np.full((h + 2 * pad, w + 2 * pad), -9, dtype=np.int16)
        owner[pad : pad + h, pad : pad + w] = grid.house_owner
        by_agent, total = self.book.depth_snapshot(self.config.n_agents)
        return stack, owner, by_agent, total

    def _observe(self) -> Observations:
        frame = self._frame()
        return Observations(
            agent=[
                self._agent_observation(i, frame)
                for i in range(self.config.n_agents)
            ],
            planner=self._planner_observation(frame),
        )

    def build_agent_observation(self, agent_id: int) -> np.ndarray:
        return self._agent_observation(agent_id, self._frame())

    def build_planner_observation(self) -> np.ndarray:
        return self._planner_observation(self._frame())

    def _agent_observation(self, agent_id: int, frame) -> np.ndarray:
        config = self.config
        agent = self.agents[agent_id]
        grid = self.grid
        stack, owner, by_agent, total_depth = frame
        obs = np.zeros(self._agent_obs_size, dtype=np.float64)

        arow, acol = agent.position
        spatial = np.zeros((N_SPATIAL_CHANNELS, WINDOW, WINDOW))
        spatial[:-1] = stack[:, arow : arow + WINDOW, acol : acol + WINDOW]
        spatial[11, HALF_WINDOW, HALF_WINDOW] = 0.0  # self is not an "other"
        spatial[12] = owner[arow : arow + WINDOW, acol : acol + WINDOW] == agent_id
        cursor = 0
        obs[cursor : cursor + spatial.size] = spatial.ravel()
        cursor += spatial.size

        obs[cursor : cursor + 3] = agent.inventory
        obs[cursor + 3] = agent.total_coin_cents / 100
        cursor += 4
        obs[cursor] = agent.multiplier_milli / MILLI
        obs[cursor + 1] = agent.skill_units_bought
        obs[cursor + 2] = sum(1 for h in grid.houses if h.owner == agent_id)
        obs[cursor + 3] = micro_to_float(agent.labor_micro)
        cursor += 4

        own = by_agent[agent_id]
        other = total_depth - own
        block = N_RESOURCES * N_PRICE_LEVELS
        obs[cursor : cursor + block] = own[BID].ravel()
        obs[cursor + block : cursor + 2 * block] = own[ASK].ravel()
        obs[cursor + 2 * block : cursor + 3 * block] = other[BID].ravel()
        obs[cursor + 3 * block : cursor + 4 * block] = other[ASK].ravel()
        cursor += 4 * block

        for resource in range(N_RESOURCES):
            obs[cursor + resource] = self.book.average_price(resource)
        cursor += N_RESOURCES
        obs[cursor : cursor + block] = self.book.trades_by_price.ravel()
        cursor += block

        obs[cursor : cursor + N_BRACKETS] = self.schedule.rates
        cursor += N_BRACKETS
        obs[cursor] = (self.step_index % config.period_length) / config.period_length
        cursor += 1
        income_so_far = agent.total_coin_cents - self._period_start_cents[agent_id]
        obs[cursor] = marginal_rate(self.schedule, income_so_far)
        cursor += 1
        obs[cursor : cursor + config.n_agents] = [
            c / 100 for c in sorted(self.prev_incomes_cents)
        ]
        cursor += config.n_agents
        vote = self.registry.agent_votes[agent_id]
        if vote is not None:
            obs[cursor + vote] = 1.0
        cursor += N_PERMUTATIONS
        assert cursor == self._agent_obs_size
        return obs

    def _planner_observation(self, frame) -> np.ndarray:
        config = self.config
        grid = self.grid
        _, _, _, total_depth = frame
        obs = np.zeros(self._planner_obs_size, dtype=np.float64)
        cursor = 0
        for resource in range(N_RESOURCES):
            cells = grid.source_cells[resource]
            if len(cells):
                obs[cursor + resource] = int(
                    grid.unit[cells[:, 0], cells[:, 1]].sum()
                )
            obs[cursor + 3 + resource] = len(cells)
        house_counts = [0] * N_HOUSE_COLORS
        for house in grid.houses:
            house_counts[house.color] += 1
        obs[cursor + 6 : cursor + 9] = house_counts
        obs[cursor + 9] = self.step_index / config.episode_steps
        cursor += 10

        for agent in self.agents:
            obs[cursor : cursor + 3] = agent.inventory
            obs[cursor + 3] = agent.total_coin_cents / 100
            cursor += 4

        block = N_RESOURCES * N_PRICE_LEVELS
        obs[cursor : cursor + block] = total_depth[BID].ravel()
        obs[cursor + block : cursor + 2 * block] = total_depth[ASK].ravel()
        cursor += 2 * block
        for resource in range(N_RESOURCES):
            obs[cursor + resource] = self.book.average_price(resource)
        cursor += N_RESOURCES
        obs[cursor : cursor + block] = self.book.trades_by_price.ravel()
        cursor += block

        obs[cursor : cursor + N_BRACKETS] = self.schedule.rates
        cursor += N_BRACKETS
        obs[cursor] = (self.step_index % config.period_length) / config.period_length
        cursor += 1
        obs[cursor : cursor + config.n_agents] = [
            c / 100 for c in self.prev_incomes_cents
        ]
        cursor += config.n_agents
        obs[cursor : cursor + config.n_agents] = self.prev_marginal_rates
        cursor += config.n_agents
        for agent_id in range(config.n_agents):
            vote = self.registry.agent_votes[agent_id]
            if vote is not None:
                obs[cursor + vote] = 1.0
            cursor += N_PERMUTATIONS
        if self.registry.planner_vote is not None:
            obs[cursor + self.registry.planner_vote] = 1.0
        cursor += N_PERMUTATIONS
        assert cursor == self._planner_obs_size
        return obs
