#!/usr/bin/env python3
"""One full episode: heuristic agents under a progressive planner."""

import numpy as np

from gridecon.config import EconomyConfig
from gridecon.env import Simulation
from gridecon.policy import make_agent_policy, make_planner_policy

config = EconomyConfig()  # 6 agents, 1000 steps, 10 tax periods
seed = 11
sim = Simulation(config, seed)
observations = sim.reset()

policies = [
    make_agent_policy("heuristic", sim.agents[i].is_expert)
    for i in range(config.n_agents)
]
planner = make_planner_policy("progressive_us")
rngs = [np.random.default_rng([seed, i]) for i in range(config.n_agents)]
planner_rng = np.random.default_rng([seed, 99])

counts = {"build": 0, "house_trade": 0, "skill_trade": 0, "trade": 0}
done = False
while not done:
    actions = [
        policies[i].decide(observations.agent[i], sim.agent_mask(i), rngs[i])
        for i in range(config.n_agents)
    ]
    batch = planner.decide(observations.planner, sim.planner_mask(), planner_rng)
    observations, rewards, events, done = sim.step(actions, batch)
    for event in events:
        if event["kind"] in counts:
            counts[event["kind"]] += 1
        elif event["kind"] == "collection":
            coins = [c / 100 for c in event["coin_cents"]]
            print(
                f"period {event['period']}: revenue "
                f"{event['revenue_cents'] / 100:>7.2f} coins, "
                f"wealth spread {min(coins):7.2f} .. {max(coins):7.2f}"
            )

print("\nactivity:", counts)
record = sim.period_records[-1]
print(
    f"final period: equality {record.equality:.3f}, "
    f"productivity {record.productivity:.1f}, swf {record.swf:.2f}"
)
roles = ["expert" if a.is_expert else "novice" for a in sim.agents]
for agent, role in zip(sim.agents, roles):
    print(
        f"agent {agent.agent_id} ({role:>6}): "
        f"{agent.total_coin_cents / 100:>8.2f} coins, "
        f"multiplier {agent.multiplier:.2f}, "
        f"houses {sum(1 for h in sim.grid.houses if h.owner == agent.agent_id)}"
    )
