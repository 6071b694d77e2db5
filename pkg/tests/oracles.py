"""Independent reference implementations used to cross-check the engine.

Everything here is deliberately written along a different route than the
library code: exact rational arithmetic instead of scaled integers, flat
scans instead of price-level structures. Tests compare outputs, never
share code.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def tax_oracle(cutoff_cents, rates, income_cents: int) -> int:
    """Bracketed tax via exact rationals, floored once, in cents."""
    if income_cents <= 0:
        return 0
    total = Fraction(0)
    for j, rate in enumerate(rates):
        lo = cutoff_cents[j]
        hi = cutoff_cents[j + 1] if j + 1 < len(cutoff_cents) else None
        top = income_cents if hi is None else min(income_cents, hi)
        if top <= lo:
            continue
        total += Fraction(rate).limit_denominator(20) * (top - lo)
    return int(total)  # Fraction -> int truncates toward zero


def borda_oracle(permutations, vote_indices) -> int:
    """Winning ranking by summed position points (2, 1, 0), ties by id.

    Returns the index of the permutation that sorts resources by
    descending points, lower resource id first on equal points.
    """
    points = {0: 0, 1: 0, 2: 0}
    for index in vote_indices:
        ranking = permutations[index]
        for position, resource in enumerate(ranking):
            points[resource] += (2, 1, 0)[position]
    final = sorted(points, key=lambda r: (-points[r], r))
    return permutations.index(tuple(final))


def split_oracle(amount_cents: int, ranking, weights=(3, 2, 1)) -> list:
    """Largest-remainder split of an amount across the ranked resources."""
    total_weight = sum(weights)
    shares = [Fraction(0)] * 3
    for position, resource in enumerate(ranking):
        shares[resource] = Fraction(amount_cents * weights[position], total_weight)
    floors = [int(s) for s in shares]
    leftover = amount_cents - sum(floors)
    remainders = sorted(
        range(3), key=lambda r: (-(shares[r] - floors[r]), r)
    )
    for k in range(leftover):
        floors[remainders[k]] += 1
    return floors


def gini_oracle(coins) -> float:
    """Gini via the sorted cumulative form instead of pairwise sums."""
    values = sorted(float(c) for c in coins)
    n = len(values)
    total = sum(values)
    if total <= 0:
        return 0.0
    weighted = sum((2 * (i + 1) - n - 1) * v for i, v in enumerate(values))
    return weighted / (n * total)


def pearson_oracle(x, y) -> float | None:
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    num = sum((a - mx) * (b - my) for a, b in zip(x, y))
    vx = sum((a - mx) ** 2 for a in x)
    vy = sum((b - my) ** 2 for b in y)
    if vx == 0 or vy == 0:
        return None
    return num / (vx * vy) ** 0.5


# Brute-force auction -------------------------------------------------------


@dataclass
class OracleOrder:
    order_id: int
    agent_id: int
    resource: int
    side: int          # 0 bid, 1 ask
    price: int
    placed_at: int


class AuctionOracle:
    """Single flat list of resting orders, scanned per submission.

    Same matching contract as the engine: a new order trades against the
    best-priced crossing counterparty, earliest placement step first,
    with a uniform draw from ``rng`` among remaining ties, at the resting
    order's price. No escrow bookkeeping; callers feed only orders that
    the engine also accepted.
    """

    def __init__(self):
        self.resting: list[OracleOrder] = []

    def submit(self, order: OracleOrder, rng: np.random.Generator):
        """Returns (price, resting_order) on a trade, else None."""
        if order.side == 0:
            crossing = [
                o
                for o in self.resting
                if o.resource == order.resource
                and o.side == 1
                and o.price <= order.price
                and o.agent_id != order.agent_id
            ]
            crossing.sort(key=lambda o: (o.price, o.placed_at, o.order_id))
        else:
            crossing = [
                o
                for o in self.resting
                if o.resource == order.resource
                and o.side == 0
                and o.price >= order.price
                and o.agent_id != order.agent_id
            ]
            crossing.sort(key=lambda o: (-o.price, o.placed_at, o.order_id))
        if not crossing:
            self.resting.append(order)
            return None
        best_price = crossing[0].price
        best_step = crossing[0].placed_at
        ties = [
            o
            for o in crossing
            if o.price == best_price and o.placed_at == best_step
        ]
        if len(ties) == 1:
            chosen = ties[0]
        else:
            chosen = ties[int(rng.integers(len(ties)))]
        self.resting.remove(chosen)
        return chosen.price, chosen

    def expire(self, step: int, lifetime: int) -> list:
        gone = [o for o in self.resting if step - o.placed_at >= lifetime]
        self.resting = [o for o in self.resting if step - o.placed_at < lifetime]
        return gone
