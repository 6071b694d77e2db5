"""The 2-D grid: resource sources, regeneration, movement, and houses.

Cell state lives in small numpy arrays indexed [row, col]:

* ``water``       - impassable cells
* ``source``      - resource id of a fixed regeneration cell, -1 elsewhere
* ``unit``        - whether a source cell currently holds a harvestable unit
* ``house_color`` / ``house_owner`` - placed houses, -1 where none
* ``agent_at``    - occupying agent id, -1 where none

Source cells never move during an episode; only their harvestable flag and
the regeneration profile change.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ConfigurationError, EconomyConfig
from .constants import HOUSE_RECIPES, N_RESOURCES

UP, DOWN, LEFT, RIGHT = 0, 1, 2, 3
DIRECTION_NAMES = ("up", "down", "left", "right")
DIRECTION_DELTAS = ((-1, 0), (1, 0), (0, -1), (0, 1))


@dataclass
class House:
    cell: tuple
    color: int
    owner: int
    built_step: int
    builder_is_expert: bool


@dataclass
class WorldGrid:
    height: int
    width: int
    water: np.ndarray
    source: np.ndarray
    unit: np.ndarray
    house_color: np.ndarray
    house_owner: np.ndarray
    agent_at: np.ndarray
    regen_profile: tuple
    source_cells: list          # per resource, (k, 2) arrays of coordinates
    houses: list
    spawned: list               # units ever spawned, per resource

    def in_bounds(self, row: int, col: int) -> bool:
        return 0 <= row < self.height and 0 <= col < self.width

    def units_on_grid(self, resource: int) -> int:
        cells = self.source_cells[resource]
        if len(cells) == 0:
            return 0
        return int(self.unit[cells[:, 0], cells[:, 1]].sum())

    def passable(self, row: int, col: int, agent_id: int) -> bool:
        """Whether ``agent_id`` may step onto a cell.

        Water, other agents, and houses owned by someone else block; an
        agent's own house does not.
        """
        if not self.in_bounds(row, col):
            return False
        if self.water[row, col]:
            return False
        if self.agent_at[row, col] >= 0:
            return False
        owner = self.house_owner[row, col]
        return owner < 0 or owner == agent_id

    def buildable(self, row: int, col: int) -> bool:
        """Houses may not go on source cells or on existing houses."""
        return self.source[row, col] < 0 and self.house_color[row, col] < 0

    def snapshot(self) -> dict:
        return {
            "height": self.height,
            "width": self.width,
            "regen_profile": list(self.regen_profile),
            "sources": {
                r: [[int(a), int(b)] for a, b in self.source_cells[r]]
                for r in range(N_RESOURCES)
            },
            "units": [
                [int(r), int(c)] for r, c in np.argwhere(self.unit)
            ],
            "houses": [
                {
                    "cell": list(h.cell),
                    "color": h.color,
                    "owner": h.owner,
                    "built_step": h.built_step,
                }
                for h in self.houses
            ],
            "agents": [
                [int(r), int(c)] for r, c in np.argwhere(self.agent_at >= 0)
            ],
        }


def init_world(config: EconomyConfig, rng: np.random.Generator) -> WorldGrid:
    """Place the fixed source cells for all three resources.

    Each resource gets floor(density * cells) sources, drawn uniformly
    from the non-water cells without overlap. Sources start filled.
    """
    h, w = config.world_height, config.world_width
    water = np.zeros((h, w), dtype=bool)
    for row, col in config.water_cells:
        if not (0 <= row < h and 0 <= col < w):
            raise ConfigurationError(f"water cell {(row, col)} outside the grid")
        water[row, col] = True

    n_cells = h * w
    per_resource = int(config.source_density * n_cells)
    open_flat = np.flatnonzero(~water.ravel())
    if 3 * per_resource > len(open_flat):
        raise ConfigurationError(
            "source density too high for the available open cells"
        )

    source = np.full((h, w), -1, dtype=np.int8)
    source_cells = []
    if per_resource > 0:
        chosen = rng.choice(open_flat, size=3 * per_resource, replace=False)
    else:
        chosen = np.empty(0, dtype=int)
    for r in range(N_RESOURCES):
        flat = chosen[r * per_resource : (r + 1) * per_resource]
        coords = np.stack([flat // w, flat % w], axis=1).astype(np.int16)
        source[coords[:, 0], coords[:, 1]] = r
        source_cells.append(coords)

    unit = source >= 0
    return WorldGrid(
        height=h,
        width=w,
        water=water,
        source=source,
        unit=unit.copy(),
        house_color=np.full((h, w), -1, dtype=np.int8),
        house_owner=np.full((h, w), -1, dtype=np.int16),
        agent_at=np.full((h, w), -1, dtype=np.int16),
        regen_profile=tuple(config.base_regen),
        source_cells=source_cells,
        houses=[],
        spawned=[per_resource] * N_RESOURCES,
    )


def draw_start_positions(
    grid: WorldGrid, n_agents: int, rng: np.random.Generator
) -> list:
    """Uniform random distinct empty cells (no water, source, or house)."""
    empty = ~grid.water & (grid.source < 0) & (grid.house_color < 0)
    flat = np.flatnonzero(empty.ravel())
    if len(flat) < n_agents:
        raise ConfigurationError("not enough empty cells for agent placement")
    chosen = rng.choice(flat, size=n_agents, replace=False)
    positions = []
    for agent_id, f in enumerate(chosen):
        row, col = int(f) // grid.width, int(f) % grid.width
        grid.agent_at[row, col] = agent_id
        positions.append((row, col))
    return positions


def regen_step(grid: WorldGrid, rng: np.random.Generator) -> list:
    """Refill empty source cells stochastically; returns spawned cells.

    Each empty source cell of resource r refills independently with
    probability ``regen_profile[r]``; cells already holding a unit are
    untouched.
    """
    spawned_cells = []
    for r in range(N_RESOURCES):
        cells = grid.source_cells[r]
        if len(cells) == 0:
            continue
        p = grid.regen_profile[r]
        if p <= 0.0:
            continue
        empty_mask = ~grid.unit[cells[:, 0], cells[:, 1]]
        empties = cells[empty_mask]
        if len(empties) == 0:
            continue
        refill = rng.random(len(empties)) < p
        hit = empties[refill]
        grid.unit[hit[:, 0], hit[:, 1]] = True
        grid.spawned[r] += len(hit)
        spawned_cells.extend((r, int(a), int(b)) for a, b in hit)
    return spawned_cells


def gather_resource(grid: WorldGrid, agent, cell: tuple, rng: np.random.Generator) -> int:
    """Harvest the unit at ``cell`` into the agent's inventory.

    One unit always, plus a bonus unit with probability equal to the
    agent's gather skill. The cell's harvestable flag is cleared.
    """
    row, col = cell
    resource = int(grid.source[row, col])
    grid.unit[row, col] = False
    units = 1
    if agent.gather_skill > 0.0 and rng.random() < agent.gather_skill:
        units = 2
        grid.spawned[resource] += 1  # bonus unit is minted, not taken from the cell
    agent.inventory[resource] += units
    return units


def apply_move(
    grid: WorldGrid, agent, direction: int, rng: np.random.Generator
) -> dict:
    """Move one step; harvest if the target holds a unit.

    Returns an outcome dict with ``moved`` False when the target is
    blocked (callers resolving simultaneous moves treat that as a bounce,
    not an error).
    """
    dr, dc = DIRECTION_DELTAS[direction]
    row, col = agent.position
    target = (row + dr, col + dc)
    if not grid.passable(target[0], target[1], agent.agent_id):
        return {"moved": False, "gathered": 0, "resource": -1}
    grid.agent_at[row, col] = -1
    grid.agent_at[target[0], target[1]] = agent.agent_id
    agent.position = target
    gathered = 0
    resource = -1
    if grid.unit[target[0], target[1]]:
        resource = int(grid.source[target[0], target[1]])
        gathered = gather_resource(grid, agent, target, rng)
    return {"moved": True, "gathered": gathered, "resource": resource}


def place_house(grid: WorldGrid, agent, color: int, step: int) -> House:
    """Consume the recipe resources and put the agent's house at its cell.

    Callers must have checked the build preconditions (payment multiplier
    at or above the threshold, recipe resources held, cell buildable).
    """
    row, col = agent.position
    if not grid.buildable(row, col):
        raise ValueError(f"cell {(row, col)} cannot hold a house")
    for resource in HOUSE_RECIPES[color]:
        if agent.inventory[resource] < 1:
            raise ValueError("missing recipe resource")
        agent.inventory[resource] -= 1
    grid.house_color[row, col] = color
    grid.house_owner[row, col] = agent.agent_id
    house = House(
        cell=(row, col),
        color=color,
        owner=agent.agent_id,
        built_step=step,
        builder_is_expert=agent.is_expert,
    )
    grid.houses.append(house)
    return house


def transfer_house(grid: WorldGrid, house: House, new_owner: int) -> None:
    row, col = house.cell
    house.owner = new_owner
    grid.house_owner[row, col] = new_owner
