"""Simulation configuration and environment-variable overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace

from .constants import N_RESOURCES
from .fixedpoint import coins_to_cents, to_micro
from .governance import GoverningConfig, GoverningSystem, Institution, PlannerReward


class ConfigurationError(ValueError):
    """Raised when a configuration cannot produce a valid simulation."""


# Marginal tax rates available to the planner: 0.00 to 1.00 in 0.05 steps.
RATE_GRID = tuple(k / 20 for k in range(21))
N_RATE_VALUES = len(RATE_GRID)
# Per bracket the planner chooses one of the grid rates or leaves the
# bracket unchanged, giving N_RATE_VALUES + 1 settings per bracket.
N_BRACKET_SETTINGS = N_RATE_VALUES + 1
KEEP_RATE_SETTING = N_RATE_VALUES

N_BRACKETS = 7

# Fixed income bracket cutoffs in coins (lower edges; the top bracket is
# unbounded). Scaled by ``cutoff_scale``.
DEFAULT_BRACKET_CUTOFFS = (0.0, 9.05, 37.0, 82.35, 157.5, 200.0, 510.0)


@dataclass(frozen=True)
class EconomyConfig:
    """All tunable constants of the economy.

    Defaults give the six-agent, 25x25, 1000-step setting with ten
    100-step tax periods. Every numeric field can be overridden through a
    ``GRIDECON_<FIELDNAME>`` environment variable (see :func:`apply_env_overrides`).
    """

    n_agents: int = 6
    world_height: int = 25
    world_width: int = 25
    source_density: float = 0.05          # per resource, fraction of all cells
    water_cells: tuple = ()               # optional (row, col) water mask
    base_regen: tuple = (0.01, 0.01, 0.01)
    regen_max: float = 0.25
    invest_alpha: float = 0.02
    invest_coin_scale: float = 1.0

    labor_move: float = 0.21
    labor_gather: float = 0.21
    labor_trade: float = 0.05
    labor_build: float = 2.1
    labor_house_trade: float = 0.0
    labor_skill_trade: float = 0.0

    pay_base: float = 10.0                # coins minted per build at multiplier 1
    build_threshold: float = 1.0          # minimum payment multiplier to build
    skill_delta: float = 0.1              # multiplier gained per skill purchase
    income_jitter_low: float = 0.9
    income_jitter_high: float = 1.1
    expert_multiplier_low: float = 1.1
    expert_multiplier_high: float = 1.5
    novice_multiplier_low: float = 0.5
    novice_multiplier_high: float = 0.9
    gather_skill_low: float = 0.0
    gather_skill_high: float = 0.5
    starting_coin: float = 0.0

    crra_eta: float = 0.23
    inverse_income_floor: float = 0.01

    period_length: int = 100
    episode_steps: int = 1000
    max_price: int = 10                   # auction price levels 0..max_price
    max_open_orders: int = 5              # per agent per resource
    order_lifetime: int = 50              # steps before an open order expires

    bracket_cutoffs: tuple = DEFAULT_BRACKET_CUTOFFS
    cutoff_scale: float = 1.0
    disposition: str = "invest"           # "invest" or "redistribute"

    governing: GoverningConfig = field(default_factory=GoverningConfig)

    # Derived integer views -------------------------------------------------

    @property
    def pay_base_cents(self) -> int:
        return coins_to_cents(self.pay_base)

    @property
    def starting_coin_cents(self) -> int:
        return coins_to_cents(self.starting_coin)

    @property
    def labor_micro(self) -> dict:
        return {
            "move": to_micro(self.labor_move),
            "gather": to_micro(self.labor_gather),
            "trade": to_micro(self.labor_trade),
            "build": to_micro(self.labor_build),
            "house_trade": to_micro(self.labor_house_trade),
            "skill_trade": to_micro(self.labor_skill_trade),
        }

    @property
    def cutoff_cents(self) -> tuple:
        return tuple(
            coins_to_cents(c * self.cutoff_scale) for c in self.bracket_cutoffs
        )

    @property
    def n_experts(self) -> int:
        return self.n_agents // 2

    def validate(self) -> None:
        if self.n_agents < 2:
            raise ConfigurationError("need at least two agents")
        if self.world_height < 1 or self.world_width < 1:
            raise ConfigurationError("world dimensions must be positive")
        if not 0.0 <= self.source_density <= 1.0:
            raise ConfigurationError("source_density must lie in [0, 1]")
        if 3 * self.source_density > 1.0:
            raise ConfigurationError(
                "combined source density above 1 cannot be placed without overlap"
            )
        if len(self.base_regen) != N_RESOURCES:
            raise ConfigurationError("base_regen needs one rate per resource")
        if any(not 0.0 <= p <= 1.0 for p in self.base_regen):
            raise ConfigurationError("regeneration rates must be probabilities")
        if self.crra_eta <= 0 or self.crra_eta == 1.0:
            raise ConfigurationError("crra_eta must be positive and not 1")
        if self.period_length < 1 or self.episode_steps < 1:
            raise ConfigurationError("period_length and episode_steps must be positive")
        if self.episode_steps % self.period_length != 0:
            raise ConfigurationError(
                "episode_steps must be a whole number of tax periods"
            )
        if len(self.bracket_cutoffs) != N_BRACKETS:
            raise ConfigurationError(f"expected {N_BRACKETS} bracket cutoffs")
        cents = self.cutoff_cents
        if cents[0] != 0 or any(a >= b for a, b in zip(cents, cents[1:])):
            raise ConfigurationError(
                "bracket cutoffs must start at 0 and be strictly increasing"
            )
        if self.disposition not in ("invest", "redistribute"):
            raise ConfigurationError("disposition must be 'invest' or 'redistribute'")
        if self.build_threshold <= 0 or self.skill_delta <= 0:
            raise ConfigurationError("build_threshold and skill_delta must be positive")
        if self.income_jitter_low > self.income_jitter_high:
            raise ConfigurationError("income jitter bounds are inverted")
        if self.max_price < 0 or self.max_open_orders < 1 or self.order_lifetime < 1:
            raise ConfigurationError("market limits out of range")


_ENV_PREFIX = "GRIDECON_"

# Fields that may be overridden via environment variables, with their parsers.
_OVERRIDABLE = {
    "source_density": float,
    "regen_max": float,
    "invest_alpha": float,
    "invest_coin_scale": float,
    "labor_move": float,
    "labor_gather": float,
    "labor_trade": float,
    "labor_build": float,
    "labor_house_trade": float,
    "labor_skill_trade": float,
    "pay_base": float,
    "build_threshold": float,
    "skill_delta": float,
    "income_jitter_low": float,
    "income_jitter_high": float,
    "expert_multiplier_low": float,
    "expert_multiplier_high": float,
    "novice_multiplier_low": float,
    "novice_multiplier_high": float,
    "gather_skill_low": float,
    "gather_skill_high": float,
    "starting_coin": float,
    "crra_eta": float,
    "inverse_income_floor": float,
    "cutoff_scale": float,
    "n_agents": int,
    "world_height": int,
    "world_width": int,
    "period_length": int,
    "episode_steps": int,
    "max_price": int,
    "max_open_orders": int,
    "order_lifetime": int,
    "disposition": str,
}


def env_override_names() -> list:
    """Environment variable names recognised by :func:`apply_env_overrides`."""
    return [_ENV_PREFIX + name.upper() for name in sorted(_OVERRIDABLE)]


def apply_env_overrides(config: EconomyConfig, environ=None) -> EconomyConfig:
    """Return a copy of ``config`` with GRIDECON_* variables applied."""
    environ = os.environ if environ is None else environ
    overrides = {}
    for name, parser in _OVERRIDABLE.items():
        raw = environ.get(_ENV_PREFIX + name.upper())
        if raw is None:
            continue
        try:
            overrides[name] = parser(raw)
        except ValueError as exc:
            raise ConfigurationError(
                f"cannot parse {_ENV_PREFIX + name.upper()}={raw!r}"
            ) from exc
    return replace(config, **overrides) if overrides else config


def config_as_dict(config: EconomyConfig) -> dict:
    """JSON-friendly dump of every config field."""
    out = {}
    for f in fields(config):
        value = getattr(config, f.name)
        if isinstance(value, GoverningConfig):
            out[f.name] = {
                "system": value.system.value,
                "institution": value.institution.value,
                "planner_reward": value.planner_reward.value,
            }
        elif isinstance(value, tuple):
            out[f.name] = list(value)
        else:
            out[f.name] = value
    return out


def governing_from_names(
    system: str, institution: str, planner_reward: str
) -> GoverningConfig:
    try:
        return GoverningConfig(
            system=GoverningSystem(system),
            institution=Institution(institution),
            planner_reward=PlannerReward(planner_reward),
        )
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc
