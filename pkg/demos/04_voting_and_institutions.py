#!/usr/bin/env python3
"""Ranked votes, who gets to cast them, and where invested revenue goes."""

from gridecon.constants import PERMUTATIONS, RESOURCE_NAMES
from gridecon.governance import (
    Institution,
    borda_aggregate,
    filter_voters,
    split_by_ranking,
)


def ranking_name(index):
    return " > ".join(RESOURCE_NAMES[r] for r in PERMUTATIONS[index])


# Votes are rankings over the three resources, scored 2, 1, 0 by
# position. Ties go to the lexicographically first ranking.
votes = [0, 0, 3]  # two for wood > stone > iron, one for stone > iron > wood
winner = borda_aggregate(votes)
print("votes:", [ranking_name(v) for v in votes])
print("winner:", ranking_name(winner))

# Institutions decide whose votes count. Extractive keeps the richest
# half; arbitrary redraws a random half each period.
coins = [120, 45, 300, 80, 210, 15]
for institution in Institution:
    eligible = filter_voters(institution, coins, seed=5, period=0)
    print(f"{institution.value:>10}: agents {eligible}")

# An arbitrary electorate changes from period to period under the same
# seed, so no agent is permanently locked out.
drawn = [filter_voters(Institution.ARBITRARY, coins, 5, p) for p in range(4)]
print("arbitrary by period:", drawn)

# Invested revenue splits 3:2:1 across the winning ranking, largest
# share to the top choice, whole cents conserved.
revenue = 1250
split = split_by_ranking(revenue, winner)
for resource, cents in enumerate(split):
    print(f"{RESOURCE_NAMES[resource]:>5} gets {cents / 100:.2f} coins")
print("sum check:", sum(split) == revenue)
