"""Markets: a continuous double auction for raw resources, plus the
mediated house and skill trades.

Auction rules
-------------
Orders are single-unit limit orders at integer coin prices. A submitted
order matches immediately against the best resting counterparty when the
bid price covers the ask price; priority runs best price, then earliest
placement step, then a uniform draw from the tie-break stream. The trade
executes at the resting order's price (the order placed first). Unmatched
orders rest until matched or expired.

Coins backing a bid and units backing an ask are escrowed at placement,
so resting orders can never be left unfunded.

Mediated trades
---------------
House and skill trades have fixed roles: an expert sells, a novice buys.
Neither moves coins between the parties; both sides are paid freshly
minted income scaled by their own payment multiplier (halved for skill
trades), with a small uniform jitter factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .agents import AgentState
from .constants import ASK, BID, N_RESOURCES
from .fixedpoint import MILLI
from .world import WorldGrid, transfer_house


@dataclass
class Order:
    order_id: int
    agent_id: int
    resource: int
    side: int
    price: int          # coins, 0..max_price
    placed_at: int      # step index


@dataclass
class TradeEvent:
    kind: str           # "resource", "house", or "skill"
    step: int
    buyer: int
    seller: int
    resource: int = -1
    color: int = -1
    price: int = -1                 # coins, resource trades only
    buyer_income_cents: int = 0     # mediated trades only
    seller_income_cents: int = 0
    buy_order_id: int = -1
    sell_order_id: int = -1


class OrderBook:
    """Resting bids and asks per resource, grouped by price level."""

    def __init__(self, n_price_levels: int, max_open_orders: int, lifetime: int):
        self.n_price_levels = n_price_levels
        self.max_open_orders = max_open_orders
        self.lifetime = lifetime
        self._next_order_id = 0
        # levels[side][resource][price] -> arrival-ordered orders
        self.levels = [
            [
                [[] for _ in range(n_price_levels)]
                for _ in range(N_RESOURCES)
            ]
            for _ in range(2)
        ]
        self.trades_by_price = np.zeros((N_RESOURCES, n_price_levels), dtype=np.int64)
        self.traded_value = np.zeros(N_RESOURCES, dtype=np.int64)
        self.traded_count = np.zeros(N_RESOURCES, dtype=np.int64)

    # Queries ---------------------------------------------------------------

    def open_orders(self, agent_id: int | None = None):
        for side in (BID, ASK):
            for resource in range(N_RESOURCES):
                for level in self.levels[side][resource]:
                    for order in level:
                        if agent_id is None or order.agent_id == agent_id:
                            yield order

    def open_count(self, agent_id: int, resource: int) -> int:
        count = 0
        for side in (BID, ASK):
            for level in self.levels[side][resource]:
                count += sum(1 for o in level if o.agent_id == agent_id)
        return count

    def own_ask_at_or_below(self, agent_id: int, resource: int, price: int) -> bool:
        for p in range(price + 1):
            if any(o.agent_id == agent_id for o in self.levels[ASK][resource][p]):
                return True
        return False

    def own_bid_at_or_above(self, agent_id: int, resource: int, price: int) -> bool:
        for p in range(price, self.n_price_levels):
            if any(o.agent_id == agent_id for o in self.levels[BID][resource][p]):
                return True
        return False

    def depth(self, side: int, resource: int, own_agent: int | None = None):
        """Counts per price level, split into (own, others) when asked."""
        counts = np.zeros(self.n_price_levels, dtype=np.int64)
        own = np.zeros(self.n_price_levels, dtype=np.int64)
        for price, level in enumerate(self.levels[side][resource]):
            for order in level:
                if own_agent is not None and order.agent_id == own_agent:
                    own[price] += 1
                else:
                    counts[price] += 1
        return (own, counts) if own_agent is not None else counts

    def agent_stats(self, agent_id: int):
        """One-pass (open counts, best own bid, best own ask) per resource.

        Best prices are None where the agent has no resting order on that
        side. Used to assemble order-legality masks without rescanning the
        book per price level.
        """
        counts = [0] * N_RESOURCES
        max_bid = [None] * N_RESOURCES
        min_ask = [None] * N_RESOURCES
        for side in (BID, ASK):
            for resource in range(N_RESOURCES):
                for price, level in enumerate(self.levels[side][resource]):
                    for order in level:
                        if order.agent_id != agent_id:
                            continue
                        counts[resource] += 1
                        if side == BID:
                            if max_bid[resource] is None or price > max_bid[resource]:
                                max_bid[resource] = price
                        else:
                            if min_ask[resource] is None or price < min_ask[resource]:
                                min_ask[resource] = price
        return counts, max_bid, min_ask

    def depth_snapshot(self, n_agents: int):
        """One-pass order counts: (per-agent, total) arrays.

        Shapes: (n_agents, 2, resources, prices) and (2, resources,
        prices).
        """
        total = np.zeros((2, N_RESOURCES, self.n_price_levels), dtype=np.int64)
        by_agent = np.zeros(
            (n_agents, 2, N_RESOURCES, self.n_price_levels), dtype=np.int64
        )
        for side in (BID, ASK):
            for resource in range(N_RESOURCES):
                for price, level in enumerate(self.levels[side][resource]):
                    for order in level:
                        total[side, resource, price] += 1
                        by_agent[order.agent_id, side, resource, price] += 1
        return by_agent, total

    def average_price(self, resource: int) -> float:
        if self.traded_count[resource] == 0:
            return 0.0
        return float(self.traded_value[resource] / self.traded_count[resource])

    def best_prices(self, resource: int):
        """(max bid, min ask) or None where that side is empty."""
        best_bid = None
        for price in range(self.n_price_levels - 1, -1, -1):
            if self.levels[BID][resource][price]:
                best_bid = price
                break
        best_ask = None
        for price in range(self.n_price_levels):
            if self.levels[ASK][resource][price]:
                best_ask = price
                break
        return best_bid, best_ask

    # Submission ------------------------------------------------------------

    def order_is_legal(
        self, agent: AgentState, resource: int, side: int, price: int
    ) -> bool:
        """Backing, cap, and self-cross screens for a prospective order."""
        if not 0 <= price < self.n_price_levels:
            return False
        if self.open_count(agent.agent_id, resource) >= self.max_open_orders:
            return False
        if side == BID:
            if agent.coin_cents < price * 100:
                return False
            # An order that could only cross the agent's own resting
            # opposite order is disallowed outright.
            if self.own_ask_at_or_below(agent.agent_id, resource, price):
                return False
        else:
            if agent.inventory[resource] < 1:
                return False
            if self.own_bid_at_or_above(agent.agent_id, resource, price):
                return False
        return True

    def submit(
        self,
        agent: AgentState,
        resource: int,
        side: int,
        price: int,
        step: int,
        agents: list,
        rng: np.random.Generator,
    ) -> TradeEvent | None:
        """Escrow the backing, then match or rest the order.

        Returns the TradeEvent when the order executed immediately, else
        None (the order now rests in the book).
        """
        if not self.order_is_legal(agent, resource, side, price):
            raise ValueError(
                f"illegal order: agent {agent.agent_id} {('bid', 'ask')[side]} "
                f"{price} for resource {resource}"
            )
        order = Order(self._next_order_id, agent.agent_id, resource, side, price, step)
        self._next_order_id += 1
        if side == BID:
            agent.lock_coins(price * 100)
        else:
            agent.lock_unit(resource)

        counter = self._best_counterparty(order, rng)
        if counter is None:
            self.levels[side][resource][price].append(order)
            return None
        return self._execute(order, counter, step, agents)

    def _best_counterparty(self, order: Order, rng: np.random.Generator):
        """Best-priced, earliest, randomly tie-broken crossing order."""
        resource = order.resource
        if order.side == BID:
            price_range = range(order.price + 1)
            book_side = ASK
        else:
            price_range = range(self.n_price_levels - 1, order.price - 1, -1)
            book_side = BID
        for price in price_range:
            level = [
                o
                for o in self.levels[book_side][resource][price]
                if o.agent_id != order.agent_id
            ]
            if not level:
                continue
            earliest = min(o.placed_at for o in level)
            ties = [o for o in level if o.placed_at == earliest]
            if len(ties) == 1:
                return ties[0]
            ties.sort(key=lambda o: o.order_id)
            return ties[int(rng.integers(len(ties)))]
        return None

    def _execute(
        self, incoming: Order, resting: Order, step: int, agents: list
    ) -> TradeEvent:
        """Settle a match at the resting order's price."""
        price = resting.price
        price_cents = price * 100
        if incoming.side == BID:
            buy, sell = incoming, resting
        else:
            buy, sell = resting, incoming
        buyer = agents[buy.agent_id]
        seller = agents[sell.agent_id]

        buyer.spend_escrowed(price_cents)
        refund = buy.price * 100 - price_cents
        if refund:
            buyer.release_coins(refund)
        seller.coin_cents += price_cents
        seller.deliver_escrowed_unit(sell.resource)
        buyer.inventory[buy.resource] += 1

        self.levels[resting.side][resting.resource][resting.price].remove(resting)
        self.trades_by_price[incoming.resource][price] += 1
        self.traded_value[incoming.resource] += price
        self.traded_count[incoming.resource] += 1
        return TradeEvent(
            kind="resource",
            step=step,
            buyer=buy.agent_id,
            seller=sell.agent_id,
            resource=incoming.resource,
            price=price,
            buy_order_id=buy.order_id,
            sell_order_id=sell.order_id,
        )

    def expire(self, step: int, agents: list) -> list:
        """Remove orders that have rested a full lifetime; refund escrow."""
        expired = []
        for side in (BID, ASK):
            for resource in range(N_RESOURCES):
                for level in self.levels[side][resource]:
                    keep = []
                    for order in level:
                        if step - order.placed_at >= self.lifetime:
                            expired.append(order)
                        else:
                            keep.append(order)
                    level[:] = keep
        for order in expired:
            agent = agents[order.agent_id]
            if order.side == BID:
                agent.release_coins(order.price * 100)
            else:
                agent.release_unit(order.resource)
        return expired


# Mediated trades -----------------------------------------------------------


def _minted_income(
    pay_base_cents: int,
    multiplier_milli: int,
    jitter: float,
    halved: bool,
) -> int:
    scale = 2 * MILLI if halved else MILLI
    return round(pay_base_cents * multiplier_milli * jitter / scale)


def draw_jitter(rng: np.random.Generator, config) -> float:
    return float(rng.uniform(config.income_jitter_low, config.income_jitter_high))


def find_sellable_house(grid: WorldGrid, agents: list, color: int):
    """Oldest expert-owned house of the color; ties go to the lower owner id."""
    candidates = [
        h
        for h in grid.houses
        if h.color == color and agents[h.owner].is_expert
    ]
    if not candidates:
        return None
    return min(candidates, key=lambda h: (h.built_step, h.owner))


def execute_house_trade(
    buyer: AgentState,
    color: int,
    grid: WorldGrid,
    agents: list,
    rng: np.random.Generator,
    config,
    step: int,
) -> TradeEvent | None:
    """Transfer the oldest sellable house of ``color`` to a novice buyer.

    Both parties receive minted income scaled by their own multiplier;
    no coins change hands between them. Returns None when no sellable
    house of the color remains (possible when an earlier buyer in the
    same step took the last one).
    """
    house = find_sellable_house(grid, agents, color)
    if house is None:
        return None
    seller = agents[house.owner]
    seller_income = _minted_income(
        config.pay_base_cents, seller.multiplier_milli, draw_jitter(rng, config), False
    )
    buyer_income = _minted_income(
        config.pay_base_cents, buyer.multiplier_milli, draw_jitter(rng, config), False
    )
    seller.coin_cents += seller_income
    buyer.coin_cents += buyer_income
    transfer_house(grid, house, buyer.agent_id)
    return TradeEvent(
        kind="house",
        step=step,
        buyer=buyer.agent_id,
        seller=seller.agent_id,
        color=color,
        buyer_income_cents=buyer_income,
        seller_income_cents=seller_income,
    )


def execute_skill_trade(
    buyer: AgentState,
    agents: list,
    rng: np.random.Generator,
    config,
    step: int,
) -> TradeEvent:
    """Sell one unit of building skill from the strongest expert.

    The buyer's payment multiplier rises by the configured increment; the
    seller's is untouched. Both sides are paid minted income at half their
    multiplier-scaled rate.
    """
    experts = [a for a in agents if a.is_expert]
    seller = min(experts, key=lambda a: (-a.multiplier_milli, a.agent_id))
    seller_income = _minted_income(
        config.pay_base_cents, seller.multiplier_milli, draw_jitter(rng, config), True
    )
    buyer_income = _minted_income(
        config.pay_base_cents, buyer.multiplier_milli, draw_jitter(rng, config), True
    )
    seller.coin_cents += seller_income
    buyer.coin_cents += buyer_income
    buyer.multiplier_milli += round(config.skill_delta * MILLI)
    buyer.skill_units_bought += 1
    return TradeEvent(
        kind="skill",
        step=step,
        buyer=buyer.agent_id,
        seller=seller.agent_id,
        buyer_income_cents=buyer_income,
        seller_income_cents=seller_income,
    )


def build_income(agent: AgentState, rng: np.random.Generator, config) -> int:
    """Minted income for completing a house, in cents."""
    return _minted_income(
        config.pay_base_cents, agent.multiplier_milli, draw_jitter(rng, config), False
    )
