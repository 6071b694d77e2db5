"""Welfare and activity measurements.

Population measures take per-agent coin endowments in any one consistent
unit (reported values use coins); utilities are isoelastic in coin minus
accumulated labor. Equality is the normalised complement of the Gini
index and lies in [0, 1] for any non-negative endowment vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ConfigurationError
from .fixedpoint import MICRO


def agent_utility(coin: float, labor: float, eta: float) -> float:
    """Isoelastic utility of coin, linear disutility of labor.

    ``coin`` is in coins (not cents); negative balances are clamped to
    zero before the power is taken.
    """
    if eta <= 0 or eta == 1.0:
        raise ConfigurationError("eta must be positive and not equal to 1")
    c = max(0.0, coin)
    return (c ** (1.0 - eta) - 1.0) / (1.0 - eta) - labor


def gini(coins) -> float:
    """Mean absolute difference Gini index, in [0, (N-1)/N]."""
    values = [float(c) for c in coins]
    n = len(values)
    if n < 2:
        raise ValueError("gini needs at least two agents")
    total = sum(values)
    if total <= 0:
        return 0.0
    diff = sum(abs(a - b) for a in values for b in values)
    return diff / (2.0 * n * total)


def equality(coins) -> float:
    """1 - N/(N-1) * gini; equals 1 for a uniform (or empty) economy."""
    n = len(coins)
    if n < 2:
        raise ValueError("equality needs at least two agents")
    if sum(float(c) for c in coins) <= 0:
        return 1.0
    return 1.0 - gini(coins) * n / (n - 1)


def productivity(coins) -> float:
    """Total coin across the population."""
    return float(sum(float(c) for c in coins))


def maximin(coins) -> float:
    """Lowest coin endowment across the population."""
    values = [float(c) for c in coins]
    if not values:
        raise ValueError("maximin needs at least one agent")
    return min(values)


def inverse_income_weights(coins, floor: float) -> list:
    """Weights proportional to 1/coin, floored and normalised to sum to 1."""
    inverses = [1.0 / max(float(c), floor) for c in coins]
    total = sum(inverses)
    return [w / total for w in inverses]


def social_welfare(
    kind: str, coins, utilities, inverse_income_floor: float = 0.01
) -> float:
    """Planner objective: equality*productivity or inverse-income-weighted utility."""
    if kind == "eq_times_prod":
        return equality(coins) * productivity(coins)
    if kind == "inverse_income":
        weights = inverse_income_weights(coins, inverse_income_floor)
        return float(sum(w * float(u) for w, u in zip(weights, utilities)))
    raise ConfigurationError(f"unknown social welfare kind {kind!r}")


@dataclass(frozen=True)
class ActivityRatios:
    build_to_house_trade: float
    build_to_skill_trade: float
    house_trade_denominator_clamped: bool
    skill_trade_denominator_clamped: bool


def activity_ratios(builds: int, house_trades: int, skill_trades: int) -> ActivityRatios:
    """Builds per trade of each kind; zero trades divide by one, flagged."""
    return ActivityRatios(
        build_to_house_trade=builds / max(house_trades, 1),
        build_to_skill_trade=builds / max(skill_trades, 1),
        house_trade_denominator_clamped=house_trades == 0,
        skill_trade_denominator_clamped=skill_trades == 0,
    )


def pearson_correlation(x, y) -> float | None:
    """Pearson product-moment correlation, or None when variance degenerates."""
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("series must be one-dimensional and equally long")
    if len(xs) < 2:
        raise ValueError("correlation needs at least two samples")
    xc = xs - xs.mean()
    yc = ys - ys.mean()
    denom = math.sqrt(float(xc @ xc) * float(yc @ yc))
    if denom == 0.0:
        return None
    return float((xc @ yc) / denom)


@dataclass(frozen=True)
class MetricsRecord:
    """Per-period snapshot of the economy used for reporting and replay."""

    period: int
    coin_cents: tuple
    labor_micro: tuple
    utility_micro: tuple
    equality: float
    productivity: float
    maximin: float
    swf: float
    builds: int
    house_trades: int
    skill_trades: int
    ratio_build_house: float
    ratio_build_skill: float
    house_denominator_clamped: bool
    skill_denominator_clamped: bool


def build_metrics_record(
    period: int,
    coin_cents,
    labor_micro,
    utility_micro,
    swf_kind: str,
    inverse_income_floor: float,
    builds: int,
    house_trades: int,
    skill_trades: int,
) -> MetricsRecord:
    """Derive every reported measure from raw per-agent state."""
    coins = [c / 100.0 for c in coin_cents]
    utilities = [u / MICRO for u in utility_micro]
    ratios = activity_ratios(builds, house_trades, skill_trades)
    return MetricsRecord(
        period=period,
        coin_cents=tuple(int(c) for c in coin_cents),
        labor_micro=tuple(int(v) for v in labor_micro),
        utility_micro=tuple(int(v) for v in utility_micro),
        equality=equality(coins),
        productivity=productivity(coins),
        maximin=maximin(coins),
        swf=social_welfare(swf_kind, coins, utilities, inverse_income_floor),
        builds=builds,
        house_trades=house_trades,
        skill_trades=skill_trades,
        ratio_build_house=ratios.build_to_house_trade,
        ratio_build_skill=ratios.build_to_skill_trade,
        house_denominator_clamped=ratios.house_trade_denominator_clamped,
        skill_denominator_clamped=ratios.skill_trade_denominator_clamped,
    )
