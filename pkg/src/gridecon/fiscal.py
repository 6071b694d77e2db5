"""Bracketed marginal taxation and the tax-period ledger.

All amounts are integer cents. A schedule's marginal rates must sit on the
0.05 grid, so every rate is an exact multiple of 1/20 and the tax bill can
be computed in integer arithmetic: brackets accumulate
``rate_twentieths * taxed_portion`` twentieths of a cent, floored once at
the end. The single floor keeps the total within a cent of the
real-valued formula while preserving monotonicity and the
payable-at-most-income bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .config import ConfigurationError, RATE_GRID


def rate_to_twentieths(rate: float) -> int:
    """Validate a rate against the 0.05 grid and return it as twentieths."""
    k = round(rate * 20)
    if not 0 <= k <= 20 or abs(rate - k / 20) > 1e-9:
        raise ConfigurationError(f"tax rate {rate} is not on the 0.05 grid")
    return k


@dataclass(frozen=True)
class TaxSchedule:
    """Marginal rates over fixed income brackets.

    ``cutoff_cents`` holds the lower edge of each bracket starting at 0;
    the top bracket is unbounded. ``rates`` must all be on the 0.05 grid.
    """

    cutoff_cents: tuple
    rates: tuple

    def __post_init__(self):
        if len(self.rates) != len(self.cutoff_cents):
            raise ConfigurationError("one rate per bracket cutoff required")
        if not self.cutoff_cents or self.cutoff_cents[0] != 0:
            raise ConfigurationError("first bracket cutoff must be 0")
        if any(a >= b for a, b in zip(self.cutoff_cents, self.cutoff_cents[1:])):
            raise ConfigurationError("bracket cutoffs must be strictly increasing")
        for rate in self.rates:
            rate_to_twentieths(rate)

    @property
    def n_brackets(self) -> int:
        return len(self.rates)

    def with_rate(self, bracket: int, rate: float) -> "TaxSchedule":
        rates = list(self.rates)
        rates[bracket] = RATE_GRID[rate_to_twentieths(rate)]
        return TaxSchedule(self.cutoff_cents, tuple(rates))


def zero_schedule(cutoff_cents) -> TaxSchedule:
    return TaxSchedule(tuple(cutoff_cents), (0.0,) * len(cutoff_cents))


def compute_tax(schedule: TaxSchedule, income_cents: int) -> int:
    """Payable tax on a period income, in cents.

    Income below zero owes nothing. Each bracket taxes the portion of
    income lying inside it at the bracket's marginal rate. Bracket
    amounts accumulate exactly in twentieths of a cent (rates live on a
    0.05 grid) and the total is floored once, so no cents are lost to
    per-bracket rounding and the result stays monotone, 1-Lipschitz, and
    never above the income itself.
    """
    if income_cents <= 0:
        return 0
    cutoffs = schedule.cutoff_cents
    twentieths = 0
    for j, rate in enumerate(schedule.rates):
        lo = cutoffs[j]
        hi = cutoffs[j + 1] if j + 1 < len(cutoffs) else math.inf
        if income_cents <= lo:
            break
        portion = min(income_cents, hi) - lo
        twentieths += rate_to_twentieths(rate) * portion
    return twentieths // 20


def marginal_rate(schedule: TaxSchedule, income_cents: int) -> float:
    """Rate of the bracket containing this income.

    Brackets are half-open above their lower edge, so income exactly on a
    cutoff belongs to the bracket below it; zero income sees the first
    bracket's rate.
    """
    if income_cents <= 0:
        return schedule.rates[0]
    cutoffs = schedule.cutoff_cents
    for j in range(len(cutoffs) - 1, -1, -1):
        if income_cents > cutoffs[j]:
            return schedule.rates[j]
    return schedule.rates[0]


@dataclass
class PeriodLedger:
    """Per-period fiscal record: incomes, taxes, and revenue disposition."""

    period: int
    coin_start_cents: list
    income_cents: list = field(default_factory=list)
    tax_cents: list = field(default_factory=list)
    revenue_cents: int = 0
    disposition: str = ""
    # redistribute mode: per-agent subsidy; invest mode: per-resource coins.
    shares_cents: list = field(default_factory=list)


def period_incomes(coin_start_cents, coin_end_cents) -> list:
    """Pretax income per agent: the change in total coin over the period."""
    return [end - start for start, end in zip(coin_start_cents, coin_end_cents)]


def assess_taxes(schedule: TaxSchedule, income_cents) -> list:
    """Tax owed per agent; negative period incomes owe zero."""
    return [compute_tax(schedule, max(0, z)) for z in income_cents]


def redistribution_shares(revenue_cents: int, n_agents: int) -> list:
    """Equal split of revenue, remainder cents going to the lowest ids.

    The shares always sum to the revenue exactly, which keeps total agent
    coin invariant across a collect-and-redistribute event.
    """
    base, leftover = divmod(revenue_cents, n_agents)
    return [base + (1 if i < leftover else 0) for i in range(n_agents)]
