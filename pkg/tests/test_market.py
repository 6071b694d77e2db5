"""Order book matching, escrow, expiry, and the mediated trades."""

import numpy as np
import pytest

from gridecon.agents import AgentState
from gridecon.config import EconomyConfig
from gridecon.constants import ASK, BID, N_RESOURCES
from gridecon.market import (
    OrderBook,
    build_income,
    execute_house_trade,
    execute_skill_trade,
    find_sellable_house,
    _minted_income,
)
from gridecon.world import init_world, place_house

from oracles import AuctionOracle, OracleOrder

WOOD = 0


def make_book():
    return OrderBook(n_price_levels=11, max_open_orders=5, lifetime=50)


def make_agents(n=4, coins=10_000, units=10):
    agents = []
    for i in range(n):
        agents.append(
            AgentState(
                agent_id=i,
                is_expert=i < n // 2,
                position=(0, i),
                multiplier_milli=1300,
                gather_skill=0.0,
                coin_cents=coins,
                inventory=[units] * N_RESOURCES,
            )
        )
    return agents


def total_wealth(agents):
    return sum(a.total_coin_cents for a in agents)


def total_units(agents, resource):
    return sum(a.total_units(resource) for a in agents)


class TestMatching:
    def test_incoming_bid_takes_cheapest_ask(self):
        # Asks rest at 3 and 7; a bid at 8 trades at 3, the cheaper ask.
        book = make_book()
        agents = make_agents()
        rng = np.random.default_rng(0)
        assert book.submit(agents[0], WOOD, ASK, 3, step=0, agents=agents, rng=rng) is None
        assert book.submit(agents[1], WOOD, ASK, 7, step=0, agents=agents, rng=rng) is None
        event = book.submit(agents[2], WOOD, BID, 8, step=1, agents=agents, rng=rng)
        assert event is not None
        assert event.price == 3
        assert event.seller == 0 and event.buyer == 2
        # The ask at 7 still rests.
        assert book.open_count(1, WOOD) == 1

    def test_incoming_ask_takes_highest_bid(self):
        book = make_book()
        agents = make_agents()
        rng = np.random.default_rng(0)
        book.submit(agents[0], WOOD, BID, 4, step=0, agents=agents, rng=rng)
        book.submit(agents[1], WOOD, BID, 6, step=0, agents=agents, rng=rng)
        event = book.submit(agents[2], WOOD, ASK, 2, step=1, agents=agents, rng=rng)
        assert event.price == 6
        assert event.buyer == 1 and event.seller == 2

    def test_trade_settles_at_resting_price_with_refund(self):
        book = make_book()
        agents = make_agents(coins=800, units=1)
        rng = np.random.default_rng(0)
        book.submit(agents[0], WOOD, ASK, 3, step=0, agents=agents, rng=rng)
        book.submit(agents[1], WOOD, BID, 8, step=1, agents=agents, rng=rng)
        # Buyer paid 3 coins, not 8; the 5-coin difference came back.
        assert agents[1].coin_cents == 800 - 300
        assert agents[1].escrow_cents == 0
        assert agents[0].coin_cents == 800 + 300
        assert agents[1].inventory[WOOD] == 2
        assert agents[0].inventory[WOOD] == 0

    def test_earlier_step_beats_better_order_id(self):
        book = make_book()
        agents = make_agents()
        rng = np.random.default_rng(0)
        book.submit(agents[0], WOOD, ASK, 5, step=0, agents=agents, rng=rng)
        book.submit(agents[1], WOOD, ASK, 5, step=3, agents=agents, rng=rng)
        event = book.submit(agents[2], WOOD, BID, 5, step=4, agents=agents, rng=rng)
        assert event.seller == 0

    def test_price_beats_placement_step(self):
        book = make_book()
        agents = make_agents()
        rng = np.random.default_rng(0)
        book.submit(agents[0], WOOD, ASK, 6, step=0, agents=agents, rng=rng)
        book.submit(agents[1], WOOD, ASK, 4, step=5, agents=agents, rng=rng)
        event = book.submit(agents[2], WOOD, BID, 9, step=6, agents=agents, rng=rng)
        assert event.seller == 1 and event.price == 4

    def test_same_step_tie_drawn_from_stream(self):
        # Two asks at the same price and step: the winner follows the
        # seeded stream over the order-id-sorted tie list.
        sellers = set()
        for seed in range(40):
            book = make_book()
            agents = make_agents()
            rng = np.random.default_rng(seed)
            book.submit(agents[0], WOOD, ASK, 5, step=0, agents=agents, rng=rng)
            book.submit(agents[1], WOOD, ASK, 5, step=0, agents=agents, rng=rng)
            probe = np.random.default_rng(seed)
            book.submit(agents[0], 1, ASK, 5, step=0, agents=agents, rng=rng)  # burn nothing
            event = book.submit(agents[2], WOOD, BID, 5, step=1, agents=agents, rng=rng)
            expected = int(probe.integers(2))
            assert event.seller == expected
            sellers.add(event.seller)
        assert sellers == {0, 1}

    def test_non_crossing_orders_rest(self):
        book = make_book()
        agents = make_agents()
        rng = np.random.default_rng(0)
        assert book.submit(agents[0], WOOD, ASK, 7, step=0, agents=agents, rng=rng) is None
        assert book.submit(agents[1], WOOD, BID, 6, step=0, agents=agents, rng=rng) is None
        assert book.open_count(0, WOOD) == 1
        assert book.open_count(1, WOOD) == 1

    def test_resources_are_independent_books(self):
        book = make_book()
        agents = make_agents()
        rng = np.random.default_rng(0)
        book.submit(agents[0], 0, ASK, 2, step=0, agents=agents, rng=rng)
        assert book.submit(agents[1], 1, BID, 9, step=0, agents=agents, rng=rng) is None

    def test_own_resting_order_never_matched(self):
        # A crossing order from the same agent is skipped in matching even
        # when it is the only candidate at the best price.
        book = make_book()
        agents = make_agents()
        rng = np.random.default_rng(0)
        book.submit(agents[0], WOOD, ASK, 3, step=0, agents=agents, rng=rng)
        book.submit(agents[1], WOOD, ASK, 6, step=0, agents=agents, rng=rng)
        # Agent 0 bids 6 from a fresh book state: own ask at 3 would cross,
        # so the legality screen refuses the order outright.
        assert not book.order_is_legal(agents[0], WOOD, BID, 6)


class TestOrderLegality:
    def test_price_range(self):
        book = make_book()
        agents = make_agents()
        assert not book.order_is_legal(agents[0], WOOD, BID, -1)
        assert not book.order_is_legal(agents[0], WOOD, BID, 11)
        assert book.order_is_legal(agents[0], WOOD, BID, 0)
        assert book.order_is_legal(agents[0], WOOD, BID, 10)

    def test_bid_needs_free_coins(self):
        book = make_book()
        poor = make_agents(coins=399)[0]
        assert book.order_is_legal(poor, WOOD, BID, 3)
        assert not book.order_is_legal(poor, WOOD, BID, 4)

    def test_ask_needs_free_unit(self):
        book = make_book()
        bare = make_agents(units=0)[0]
        assert not book.order_is_legal(bare, WOOD, ASK, 5)
        bare.inventory[WOOD] = 1
        assert book.order_is_legal(bare, WOOD, ASK, 5)

    def test_open_order_cap_per_resource(self):
        book = make_book()
        agents = make_agents()
        rng = np.random.default_rng(0)
        for price in (1, 2, 3, 4, 5):
            book.submit(agents[0], WOOD, ASK, price, step=0, agents=agents, rng=rng)
        assert not book.order_is_legal(agents[0], WOOD, ASK, 6)
        # The cap is per resource, so a different book is still open.
        assert book.order_is_legal(agents[0], 1, ASK, 6)

    def test_self_cross_refused_both_ways(self):
        book = make_book()
        agents = make_agents()
        rng = np.random.default_rng(0)
        book.submit(agents[0], WOOD, ASK, 4, step=0, agents=agents, rng=rng)
        assert not book.order_is_legal(agents[0], WOOD, BID, 4)
        assert not book.order_is_legal(agents[0], WOOD, BID, 7)
        assert book.order_is_legal(agents[0], WOOD, BID, 3)
        other = make_book()
        other.submit(agents[1], WOOD, BID, 6, step=0, agents=agents, rng=rng)
        assert not other.order_is_legal(agents[1], WOOD, ASK, 6)
        assert not other.order_is_legal(agents[1], WOOD, ASK, 2)
        assert other.order_is_legal(agents[1], WOOD, ASK, 7)

    def test_illegal_submit_raises(self):
        book = make_book()
        agents = make_agents(coins=0)
        with pytest.raises(ValueError):
            book.submit(agents[0], WOOD, BID, 5, step=0, agents=agents, rng=np.random.default_rng(0))


class TestEscrow:
    def test_bid_locks_coins_at_placement(self):
        book = make_book()
        agents = make_agents(coins=1000)
        book.submit(agents[0], WOOD, BID, 7, step=0, agents=agents, rng=np.random.default_rng(0))
        assert agents[0].coin_cents == 300
        assert agents[0].escrow_cents == 700
        assert agents[0].total_coin_cents == 1000

    def test_ask_locks_unit_at_placement(self):
        book = make_book()
        agents = make_agents(units=2)
        book.submit(agents[0], WOOD, ASK, 7, step=0, agents=agents, rng=np.random.default_rng(0))
        assert agents[0].inventory[WOOD] == 1
        assert agents[0].escrow_units[WOOD] == 1
        assert agents[0].total_units(WOOD) == 2

    def test_wealth_and_units_conserved_through_trades(self):
        book = make_book()
        agents = make_agents()
        rng = np.random.default_rng(5)
        start_wealth = total_wealth(agents)
        start_units = [total_units(agents, r) for r in range(N_RESOURCES)]
        for step in range(60):
            agent = agents[int(rng.integers(len(agents)))]
            resource = int(rng.integers(N_RESOURCES))
            side = int(rng.integers(2))
            price = int(rng.integers(11))
            if book.order_is_legal(agent, resource, side, price):
                book.submit(agent, resource, side, price, step, agents, rng)
            book.expire(step, agents)
        assert total_wealth(agents) == start_wealth
        assert [total_units(agents, r) for r in range(N_RESOURCES)] == start_units

    def test_expiry_refunds_escrow(self):
        book = make_book()
        agents = make_agents(coins=500, units=1)
        rng = np.random.default_rng(0)
        book.submit(agents[0], WOOD, BID, 5, step=0, agents=agents, rng=rng)
        book.submit(agents[1], WOOD, ASK, 9, step=0, agents=agents, rng=rng)
        assert book.expire(49, agents) == []
        gone = book.expire(50, agents)
        assert len(gone) == 2
        assert agents[0].coin_cents == 500 and agents[0].escrow_cents == 0
        assert agents[1].inventory[WOOD] == 1 and agents[1].escrow_units[WOOD] == 0
        assert list(book.open_orders()) == []

    def test_expiry_is_age_based_per_order(self):
        book = make_book()
        agents = make_agents()
        rng = np.random.default_rng(0)
        book.submit(agents[0], WOOD, ASK, 9, step=0, agents=agents, rng=rng)
        book.submit(agents[1], WOOD, ASK, 9, step=10, agents=agents, rng=rng)
        assert len(book.expire(50, agents)) == 1
        assert len(book.expire(60, agents)) == 1


class TestBookQueries:
    def test_depth_and_stats(self):
        book = make_book()
        agents = make_agents()
        rng = np.random.default_rng(0)
        book.submit(agents[0], WOOD, ASK, 4, step=0, agents=agents, rng=rng)
        book.submit(agents[0], WOOD, ASK, 4, step=0, agents=agents, rng=rng)
        book.submit(agents[1], WOOD, BID, 2, step=0, agents=agents, rng=rng)
        by_agent, total = book.depth_snapshot(len(agents))
        assert total[ASK][WOOD][4] == 2
        assert total[BID][WOOD][2] == 1
        assert by_agent[0][ASK][WOOD][4] == 2
        assert by_agent[1][BID][WOOD][2] == 1
        counts, max_bid, min_ask = book.agent_stats(0)
        assert counts[WOOD] == 2 and min_ask[WOOD] == 4 and max_bid[WOOD] is None

    def test_average_price_tracks_trades(self):
        book = make_book()
        agents = make_agents()
        rng = np.random.default_rng(0)
        assert book.average_price(WOOD) == 0.0
        book.submit(agents[0], WOOD, ASK, 3, step=0, agents=agents, rng=rng)
        book.submit(agents[1], WOOD, BID, 3, step=1, agents=agents, rng=rng)
        book.submit(agents[0], WOOD, ASK, 5, step=2, agents=agents, rng=rng)
        book.submit(agents[1], WOOD, BID, 5, step=3, agents=agents, rng=rng)
        assert book.average_price(WOOD) == 4.0


class TestOracleAgreement:
    def test_fuzzed_streams_match_reference(self):
        # Price, step, and tie handling all agree with the flat-scan
        # reference on random order streams, including the rng draws.
        for seed in range(30):
            rng_a = np.random.default_rng(seed)
            rng_b = np.random.default_rng(seed)
            feed = np.random.default_rng(seed + 1000)
            book = make_book()
            oracle = AuctionOracle()
            agents = make_agents(n=6, coins=100_000, units=50)
            next_id = 0
            for k in range(120):
                step = k // 4
                agent = agents[int(feed.integers(6))]
                resource = int(feed.integers(N_RESOURCES))
                side = int(feed.integers(2))
                price = int(feed.integers(11))
                if not book.order_is_legal(agent, resource, side, price):
                    continue
                event = book.submit(agent, resource, side, price, step, agents, rng_a)
                result = oracle.submit(
                    OracleOrder(next_id, agent.agent_id, resource, side, price, step),
                    rng_b,
                )
                next_id += 1
                if event is None:
                    assert result is None
                else:
                    price_o, resting = result
                    assert event.price == price_o
                    counter = event.seller if side == BID else event.buyer
                    assert resting.agent_id == counter
                if k % 4 == 3:
                    engine_gone = book.expire(step, agents)
                    oracle_gone = oracle.expire(step, 50)
                    assert len(engine_gone) == len(oracle_gone)


class TestMintedIncome:
    def test_scales_with_multiplier(self):
        assert _minted_income(1000, 1000, 1.0, False) == 1000
        assert _minted_income(1000, 1400, 1.0, False) == 1400
        assert _minted_income(1000, 1400, 1.0, True) == 700

    def test_jitter_scales_linearly(self):
        assert _minted_income(1000, 1000, 0.95, False) == 950
        assert _minted_income(1000, 1000, 1.05, False) == 1050

    def test_build_income_uses_builder_multiplier(self):
        config = EconomyConfig()
        agent = make_agents()[0]
        agent.multiplier_milli = 1500
        incomes = {
            build_income(agent, np.random.default_rng(s), config) for s in range(20)
        }
        lo = config.pay_base_cents * 1.5 * config.income_jitter_low
        hi = config.pay_base_cents * 1.5 * config.income_jitter_high
        assert all(lo - 1 <= x <= hi + 1 for x in incomes)
        assert len(incomes) > 1


def grid_with_houses(config, specs):
    """specs: list of (owner_id, color, built_step) placed on distinct cells."""
    grid = init_world(
        EconomyConfig(world_height=8, world_width=8, source_density=0.0),
        np.random.default_rng(0),
    )
    agents = make_agents(n=6)
    for i, (owner, color, built_step) in enumerate(specs):
        agent = agents[owner]
        agent.position = (i, 0)
        agent.inventory = [2, 2, 2]
        house = place_house(grid, agent, color, step=built_step)
        house.built_step = built_step
        house.builder_is_expert = agent.is_expert
    return grid, agents


class TestHouseTrade:
    def test_oldest_expert_house_sells_first(self):
        config = EconomyConfig()
        grid, agents = grid_with_houses(config, [(0, 0, 30), (1, 0, 10), (2, 0, 20)])
        house = find_sellable_house(grid, agents, 0)
        assert house.owner == 1 and house.built_step == 10

    def test_built_step_tie_goes_to_lower_owner(self):
        config = EconomyConfig()
        grid, agents = grid_with_houses(config, [(2, 1, 5), (1, 1, 5)])
        assert find_sellable_house(grid, agents, 1).owner == 1

    def test_novice_houses_not_sellable(self):
        config = EconomyConfig()
        grid, agents = grid_with_houses(config, [(4, 0, 0)])
        assert find_sellable_house(grid, agents, 0) is None

    def test_color_filter(self):
        config = EconomyConfig()
        grid, agents = grid_with_houses(config, [(0, 2, 0)])
        assert find_sellable_house(grid, agents, 0) is None
        assert find_sellable_house(grid, agents, 2).owner == 0

    def test_trade_transfers_house_and_mints_income(self):
        config = EconomyConfig()
        grid, agents = grid_with_houses(config, [(0, 0, 0)])
        buyer = agents[3]
        buyer.multiplier_milli = 700
        seller_before = agents[0].coin_cents
        buyer_before = buyer.coin_cents
        event = execute_house_trade(
            buyer, 0, grid, agents, np.random.default_rng(2), config, step=40
        )
        assert event.kind == "house" and event.buyer == 3 and event.seller == 0
        assert grid.houses[0].owner == 3
        assert agents[0].coin_cents == seller_before + event.seller_income_cents
        assert buyer.coin_cents == buyer_before + event.buyer_income_cents
        # Income scales with each side's own multiplier.
        assert event.seller_income_cents > event.buyer_income_cents

    def test_exhausted_supply_returns_none(self):
        config = EconomyConfig()
        grid, agents = grid_with_houses(config, [(0, 0, 0)])
        execute_house_trade(agents[3], 0, grid, agents, np.random.default_rng(2), config, step=0)
        # The only red house now belongs to a novice; a second buyer bounces.
        assert (
            execute_house_trade(agents[4], 0, grid, agents, np.random.default_rng(2), config, step=0)
            is None
        )


class TestSkillTrade:
    def test_strongest_expert_sells(self):
        config = EconomyConfig()
        agents = make_agents(n=6)
        agents[0].multiplier_milli = 1200
        agents[1].multiplier_milli = 1450
        agents[2].multiplier_milli = 1300
        event = execute_skill_trade(agents[4], agents, np.random.default_rng(0), config, step=0)
        assert event.seller == 1

    def test_multiplier_tie_goes_to_lower_id(self):
        config = EconomyConfig()
        agents = make_agents(n=6)
        for a in agents[:3]:
            a.multiplier_milli = 1400
        event = execute_skill_trade(agents[4], agents, np.random.default_rng(0), config, step=0)
        assert event.seller == 0

    def test_buyer_multiplier_rises_by_increment(self):
        config = EconomyConfig()
        agents = make_agents(n=6)
        buyer = agents[5]
        buyer.multiplier_milli = 830
        execute_skill_trade(buyer, agents, np.random.default_rng(0), config, step=0)
        assert buyer.multiplier_milli == 930
        assert buyer.skill_units_bought == 1

    def test_incomes_are_halved(self):
        config = EconomyConfig()
        agents = make_agents(n=6)
        seller = agents[0]
        seller.multiplier_milli = 1400
        buyer = agents[5]
        buyer.multiplier_milli = 600
        event = execute_skill_trade(buyer, agents, np.random.default_rng(3), config, step=0)
        half_base = config.pay_base_cents / 2
        lo, hi = config.income_jitter_low, config.income_jitter_high
        assert half_base * 1.4 * lo - 1 <= event.seller_income_cents <= half_base * 1.4 * hi + 1
        assert half_base * 0.6 * lo - 1 <= event.buyer_income_cents <= half_base * 0.6 * hi + 1

    def test_repeated_purchases_cross_threshold_exactly(self):
        config = EconomyConfig()
        agents = make_agents(n=6)
        buyer = agents[5]
        buyer.multiplier_milli = 700
        for _ in range(3):
            execute_skill_trade(buyer, agents, np.random.default_rng(0), config, step=0)
        assert buyer.multiplier_milli == 1000
        assert buyer.multiplier >= config.build_threshold
