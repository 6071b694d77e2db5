#!/usr/bin/env python3
"""A walk through the grid: sources, gathering, and building a house."""

import numpy as np

from gridecon.config import EconomyConfig
from gridecon.constants import HOUSE_RECIPES, N_RESOURCES, RESOURCE_NAMES
from gridecon.world import DIRECTION_DELTAS, draw_start_positions, init_world

config = EconomyConfig()
rng = np.random.default_rng(7)
grid = init_world(config, rng)

# Source cells regenerate one resource each; density 0.05 of the grid
# per resource, placed on distinct cells, all filled at the start.
for resource in range(N_RESOURCES):
    cells = grid.source_cells[resource]
    print(
        f"{RESOURCE_NAMES[resource]:>5}: {len(cells)} sources, "
        f"{grid.units_on_grid(resource)} units filled, "
        f"first at {tuple(int(c) for c in cells[0])}"
    )

positions = draw_start_positions(grid, config.n_agents, rng)
print("agent starts:", positions)

# Walk agent 0 around. Water, other agents, and foreign houses block.
row, col = positions[0]
print(f"\nagent 0 starts at ({row}, {col})")
for name, (dr, dc) in zip(("up", "down", "left", "right"), DIRECTION_DELTAS):
    target = (row + dr, col + dc)
    open_cell = grid.passable(*target, agent_id=0)
    print(f"  {name:>5} -> {target} {'open' if open_cell else 'blocked'}")

# House recipes pair two distinct resources: red wants wood and stone,
# blue wood and iron, green stone and iron.
print()
for color, recipe in enumerate(HOUSE_RECIPES):
    names = " + ".join(RESOURCE_NAMES[r] for r in recipe)
    print(f"house color {color}: {names}")
