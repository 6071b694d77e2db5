"""Shared enumerations of resources, house colors, and rank permutations."""

WOOD, STONE, IRON = 0, 1, 2
RESOURCE_NAMES = ("wood", "stone", "iron")
N_RESOURCES = 3

RED, BLUE, GREEN = 0, 1, 2
HOUSE_COLOR_NAMES = ("red", "blue", "green")
N_HOUSE_COLORS = 3

# Two resource units consumed per house, by color.
HOUSE_RECIPES = (
    (WOOD, STONE),   # red
    (WOOD, IRON),    # blue
    (STONE, IRON),   # green
)

# All rankings of the three resources, best first, in lexicographic order.
# Index 0 (wood > stone > iron) doubles as the default for actors who have
# not cast a vote.
PERMUTATIONS = (
    (WOOD, STONE, IRON),
    (WOOD, IRON, STONE),
    (STONE, WOOD, IRON),
    (STONE, IRON, WOOD),
    (IRON, WOOD, STONE),
    (IRON, STONE, WOOD),
)
N_PERMUTATIONS = 6
DEFAULT_PERMUTATION_INDEX = 0

BID, ASK = 0, 1
SIDE_NAMES = ("bid", "ask")
