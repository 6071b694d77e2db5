"""Bracketed tax computation and per-period fiscal bookkeeping."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridecon.config import RATE_GRID, ConfigurationError, EconomyConfig
from gridecon.fiscal import (
    TaxSchedule,
    compute_tax,
    marginal_rate,
    period_incomes,
    rate_to_twentieths,
    redistribution_shares,
    zero_schedule,
)

from oracles import tax_oracle

CUTOFFS = EconomyConfig().cutoff_cents


def schedule(rates) -> TaxSchedule:
    return TaxSchedule(CUTOFFS, tuple(rates))


rates_strategy = st.tuples(*[st.sampled_from(RATE_GRID)] * 7)
income_strategy = st.integers(min_value=-10_000, max_value=200_000)


class TestComputeTax:
    def test_zero_rates_owe_nothing(self):
        assert compute_tax(zero_schedule(CUTOFFS), 123_456) == 0

    def test_negative_income_owes_nothing(self):
        sched = schedule([0.5] * 7)
        assert compute_tax(sched, -500) == 0
        assert compute_tax(sched, 0) == 0

    def test_flat_ten_percent_of_fifty_coins_is_five_coins(self):
        sched = schedule([0.10] * 7)
        assert compute_tax(sched, 5000) == 500

    def test_full_rate_takes_everything(self):
        sched = schedule([1.0] * 7)
        assert compute_tax(sched, 7_777) == 7_777

    def test_only_portion_above_cutoff_taxed_at_upper_rate(self):
        # First bracket free, second at 100%: tax = income - 9.05 coins.
        sched = schedule([0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0])
        assert compute_tax(sched, 2000) == 2000 - 905

    @given(rates=rates_strategy, income=income_strategy)
    def test_matches_rational_oracle(self, rates, income):
        assert compute_tax(schedule(rates), income) == tax_oracle(
            CUTOFFS, rates, income
        )

    @given(rates=rates_strategy, income=income_strategy, bump=st.integers(1, 5_000))
    def test_monotone_and_lipschitz(self, rates, income, bump):
        sched = schedule(rates)
        lo = compute_tax(sched, income)
        hi = compute_tax(sched, income + bump)
        assert lo <= hi
        assert hi - lo <= bump

    @given(rates=rates_strategy, income=st.integers(0, 200_000))
    def test_never_exceeds_income(self, rates, income):
        assert compute_tax(schedule(rates), income) <= income


class TestMarginalRate:
    def test_zero_income_sees_first_bracket(self):
        sched = schedule([0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35])
        assert marginal_rate(sched, 0) == 0.05
        assert marginal_rate(sched, -100) == 0.05

    def test_cutoff_income_belongs_to_lower_bracket(self):
        sched = schedule([0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35])
        assert marginal_rate(sched, 905) == 0.05
        assert marginal_rate(sched, 906) == 0.10

    def test_top_bracket_is_unbounded(self):
        sched = schedule([0.0] * 6 + [0.85])
        assert marginal_rate(sched, 10_000_000) == 0.85


class TestScheduleValidation:
    def test_off_grid_rate_rejected(self):
        with pytest.raises(ConfigurationError):
            rate_to_twentieths(0.07)

    def test_rate_outside_unit_interval_rejected(self):
        with pytest.raises(ConfigurationError):
            rate_to_twentieths(1.05)

    def test_cutoffs_must_increase(self):
        with pytest.raises(ConfigurationError):
            TaxSchedule((0, 100, 100), (0.0, 0.0, 0.0))

    def test_first_cutoff_must_be_zero(self):
        with pytest.raises(ConfigurationError):
            TaxSchedule((5, 100, 200), (0.0, 0.0, 0.0))

    def test_with_rate_replaces_one_bracket(self):
        sched = zero_schedule(CUTOFFS).with_rate(2, 0.4)
        assert sched.rates[2] == 0.4
        assert sum(sched.rates) == 0.4


class TestPeriodAccounting:
    def test_incomes_are_end_minus_start(self):
        assert period_incomes([100, 200], [150, 120]) == [50, -80]

    def test_redistribution_shares_sum_to_revenue(self):
        shares = redistribution_shares(1003, 6)
        assert sum(shares) == 1003
        assert shares == [168, 167, 167, 167, 167, 167]

    def test_redistribution_remainder_goes_to_low_ids(self):
        assert redistribution_shares(5, 3) == [2, 2, 1]

    def test_zero_revenue_means_zero_shares(self):
        assert redistribution_shares(0, 4) == [0, 0, 0, 0]
