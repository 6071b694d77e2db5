"""Welfare measures, activity ratios, and correlations."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gridecon.config import ConfigurationError
from gridecon.metrics import (
    activity_ratios,
    agent_utility,
    equality,
    gini,
    inverse_income_weights,
    maximin,
    pearson_correlation,
    productivity,
    social_welfare,
)

from oracles import gini_oracle, pearson_oracle

coins_strategy = st.lists(
    st.floats(0, 1e6, allow_nan=False, allow_infinity=False), min_size=2, max_size=12
)


class TestUtility:
    def test_zero_coin_zero_labor(self):
        eta = 0.23
        assert agent_utility(0.0, 0.0, eta) == pytest.approx(-1.0 / (1.0 - eta))

    def test_labor_is_linear_penalty(self):
        base = agent_utility(10.0, 0.0, 0.23)
        assert agent_utility(10.0, 2.5, 0.23) == pytest.approx(base - 2.5)

    def test_concave_in_coin(self):
        u = [agent_utility(c, 0.0, 0.23) for c in (10.0, 20.0, 30.0)]
        assert u[1] - u[0] > u[2] - u[1] > 0

    def test_negative_coin_clamped(self):
        assert agent_utility(-5.0, 0.0, 0.23) == agent_utility(0.0, 0.0, 0.23)

    @pytest.mark.parametrize("eta", [0.0, -1.0, 1.0])
    def test_bad_eta_rejected(self, eta):
        with pytest.raises(ConfigurationError):
            agent_utility(1.0, 0.0, eta)


class TestEqualityGini:
    def test_uniform_coins_are_fully_equal(self):
        assert equality([5, 5, 5, 5]) == 1.0
        assert gini([5, 5, 5, 5]) == 0.0

    def test_single_holder_is_maximally_unequal(self):
        n = 6
        coins = [0] * (n - 1) + [100]
        assert gini(coins) == pytest.approx((n - 1) / n)
        assert equality(coins) == pytest.approx(0.0)

    def test_one_two_three_gives_two_thirds(self):
        assert equality([1, 2, 3]) == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_all_zero_is_equal_by_convention(self):
        assert equality([0, 0, 0]) == 1.0
        assert gini([0, 0, 0]) == 0.0

    @given(coins=coins_strategy)
    def test_matches_sorted_cumulative_oracle(self, coins):
        assert gini(coins) == pytest.approx(gini_oracle(coins), abs=1e-9)

    @given(coins=coins_strategy)
    def test_bounds(self, coins):
        n = len(coins)
        g = gini(coins)
        assert 0.0 <= g <= (n - 1) / n + 1e-12
        assert -1e-12 <= equality(coins) <= 1.0 + 1e-12

    @given(coins=coins_strategy, k=st.floats(0.1, 1000))
    def test_scale_invariance(self, coins, k):
        if sum(coins) > 0:
            assert equality([k * c for c in coins]) == pytest.approx(
                equality(coins), abs=1e-9
            )


class TestAggregates:
    def test_productivity_is_total(self):
        assert productivity([1.5, 2.5, 6.0]) == 10.0

    def test_maximin_examples(self):
        assert maximin([5, 5, 5]) == 5
        assert maximin([0, 9, 4]) == 0

    @given(coins=coins_strategy)
    def test_maximin_at_most_mean(self, coins):
        assert maximin(coins) <= productivity(coins) / len(coins) + 1e-9


class TestSocialWelfare:
    def test_product_form(self):
        coins = [10, 20, 30]
        assert social_welfare("eq_times_prod", coins, [0, 0, 0]) == pytest.approx(
            equality(coins) * 60.0
        )

    def test_equal_coins_give_uniform_weights(self):
        weights = inverse_income_weights([7, 7, 7, 7], 0.01)
        assert weights == pytest.approx([0.25] * 4)

    def test_weighted_sum_example(self):
        # C=(1,3) -> weights (0.75, 0.25); u=(2,6) -> 1.5 + 1.5 = 3.
        value = social_welfare("inverse_income", [1, 3], [2, 6])
        assert value == pytest.approx(3.0, abs=1e-12)

    def test_floor_guards_broke_agents(self):
        weights = inverse_income_weights([0, 1], 0.01)
        assert weights[0] > weights[1]
        assert sum(weights) == pytest.approx(1.0)

    def test_zero_productivity_zeroes_product_form(self):
        assert social_welfare("eq_times_prod", [0, 0], [1, 1]) == 0.0

    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigurationError):
            social_welfare("nash", [1], [1])


class TestActivityRatios:
    def test_plain_division(self):
        ratios = activity_ratios(10, 5, 4)
        assert ratios.build_to_house_trade == 2.0
        assert ratios.build_to_skill_trade == 2.5
        assert not ratios.house_trade_denominator_clamped

    def test_zero_denominator_clamps_and_flags(self):
        ratios = activity_ratios(7, 0, 0)
        assert ratios.build_to_house_trade == 7.0
        assert ratios.house_trade_denominator_clamped
        assert ratios.skill_trade_denominator_clamped


class TestPearson:
    def test_perfect_positive(self):
        assert pearson_correlation([1, 2, 3], [10, 20, 30]) == pytest.approx(1.0)

    def test_perfect_negative(self):
        assert pearson_correlation([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)

    def test_direct_formula_case(self):
        r = pearson_correlation([1, 2, 3], [2, 4, 7])
        assert r == pytest.approx(5 / math.sqrt(2 * (114 / 9)), abs=1e-12)

    def test_degenerate_variance_is_none(self):
        assert pearson_correlation([1, 1, 1], [1, 2, 3]) is None

    @given(
        x=st.lists(st.floats(-100, 100, allow_nan=False), min_size=2, max_size=10),
        y=st.lists(st.floats(-100, 100, allow_nan=False), min_size=2, max_size=10),
    )
    def test_matches_direct_oracle_and_bounds(self, x, y):
        n = min(len(x), len(y))
        x, y = x[:n], y[:n]
        r = pearson_correlation(x, y)
        expected = pearson_oracle(x, y)
        if expected is None:
            assert r is None
        else:
            assert r == pytest.approx(expected, abs=1e-9)
            assert -1.0 - 1e-9 <= r <= 1.0 + 1e-9
