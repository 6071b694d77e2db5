#!/usr/bin/env python3
"""Bracketed income tax and what the planner does with the take."""

from gridecon.config import EconomyConfig
from gridecon.fiscal import (
    TaxSchedule,
    compute_tax,
    marginal_rate,
    redistribution_shares,
)

config = EconomyConfig()
cutoffs = config.cutoff_cents

# Bracket cutoffs in coins. Each bracket taxes only the income that
# falls inside it, so the schedule is continuous and monotone.
print("cutoffs (coins):", [c / 100 for c in cutoffs])

progressive = TaxSchedule(cutoffs, (0.10, 0.10, 0.20, 0.25, 0.30, 0.35, 0.35))
for coins in (5, 20, 60, 120, 180, 400, 600):
    income = coins * 100
    tax = compute_tax(progressive, income)
    rate = marginal_rate(progressive, income)
    print(
        f"income {coins:>4} coins -> tax {tax / 100:>7.2f}, "
        f"marginal rate {rate:.2f}, average {tax / income:.3f}"
    )

# Against a flat 25% schedule the progressive one taxes low earners
# less and high earners more; the curves cross between the extremes.
flat = TaxSchedule(cutoffs, (0.25,) * 7)
print("\nincome  progressive  flat25")
for coins in (10, 50, 150, 500):
    income = coins * 100
    print(
        f"{coins:>6}  {compute_tax(progressive, income) / 100:>11.2f}"
        f"  {compute_tax(flat, income) / 100:>6.2f}"
    )

# Redistribution splits revenue into equal whole-cent shares; leftover
# cents go to the lowest agent ids so nothing is minted or burned.
revenue = 1003
shares = redistribution_shares(revenue, config.n_agents)
print(f"\nrevenue {revenue} cents across {config.n_agents} agents -> {shares}")
print("sum check:", sum(shares) == revenue)
