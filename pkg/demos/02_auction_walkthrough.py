#!/usr/bin/env python3
"""The double auction step by step: rest, match, escrow, expire."""

import numpy as np

from gridecon.agents import AgentState
from gridecon.constants import ASK, BID, N_RESOURCES, WOOD
from gridecon.market import OrderBook

book = OrderBook(n_price_levels=11, max_open_orders=5, lifetime=50)
rng = np.random.default_rng(0)
agents = [
    AgentState(i, i < 1, (0, i), 1300, 0.0, coin_cents=1000,
               inventory=[3] * N_RESOURCES)
    for i in range(3)
]


def wallet(agent):
    return f"coins {agent.coin_cents / 100:.2f}, escrow {agent.escrow_cents / 100:.2f}"


# Two asks rest: agent 0 at 3 coins, agent 1 at 7. The unit leaves the
# seller's inventory into escrow the moment the order is placed.
book.submit(agents[0], WOOD, ASK, 3, step=0, agents=agents, rng=rng)
book.submit(agents[1], WOOD, ASK, 7, step=0, agents=agents, rng=rng)
print("agent 0 after asking 3:", agents[0].inventory, "escrowed", agents[0].escrow_units)

# A bid at 8 crosses both asks. The cheaper ask wins, and the trade
# settles at the resting price 3, not at the bid's 8.
trade = book.submit(agents[2], WOOD, BID, 8, step=1, agents=agents, rng=rng)
print(f"bid 8 vs asks 3 and 7 -> trade at {trade.price}, seller {trade.seller}")
print("buyer:", wallet(agents[2]))
print("seller:", wallet(agents[0]))

# The ask at 7 still rests; the book never holds crossing orders.
resting = list(book.open_orders())
print("resting:", [(o.agent_id, "ask", o.price) for o in resting])

# A lone bid escrows its coins until it fills or expires. Orders live
# lifetime steps; expiry refunds the escrow in full.
book.submit(agents[2], WOOD, BID, 2, step=1, agents=agents, rng=rng)
print("\nafter bidding 2:", wallet(agents[2]))
expired = book.expire(step=51, agents=agents)
print(f"step 51 expires {len(expired)} orders; buyer back to:", wallet(agents[2]))
