# Copyright 2025 The qpow developers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
Test the profitability algebra and the break-even table.
"""
import math
import pytest
from qpow.src.econ_model import (ChainParams, MinerSpec, Market, BTC_2025, YEAR_S,
                                 CLASSICAL, QUANTUM, TABLE1_RATES, TABLE1_FRATES,
                                 block_probability, income, profit, profit_report,
                                 profit_ratio, break_even_opex, table1_scenarios,
                                 halved_reward)
from qpow.src.errors import (PreconditionError, DegenerateRatioError, RangeError)

# break-even yearly opex for 40 MHz and 640 MHz devices at four prices
TABLE1_REFERENCE = [6258.27, 2761.51, 8242.92, 26590.06,
                    100132.28, 44184.12, 131886.68, 425440.90]

UNIT_CHAIN = ChainParams(block_time_s=1, hash_size=1, difficulty=1, block_reward=1)


@pytest.fixture
def spot_market():
    return Market(23536.12)


@pytest.mark.parametrize('kind, rate, chain, expected', (
    # identity case
    (CLASSICAL, 1, UNIT_CHAIN, 1.0),
    (QUANTUM, 1, UNIT_CHAIN, 1.0),
    # quantum search only pays sqrt(D)
    (QUANTUM, 4e7, BTC_2025, 1.6187e-6),
    (CLASSICAL, 4e7, ChainParams(600, 2**32, 4), 4e7 * 600**2 / (2**32 * 4)),
))
def test_block_probability(kind, rate, chain, expected):
    prob = block_probability(MinerSpec(kind, rate), chain)
    assert math.isclose(prob, expected, rel_tol=1e-4)


@pytest.mark.parametrize('difficulty', (1, 4, 1e6, 4.29e18))
def test_quantum_classical_ratio(difficulty):
    chain = ChainParams(600, 2**32, difficulty, 3.125)
    market = Market(1.0)
    classical = income(MinerSpec(CLASSICAL, 4e7), chain, market, YEAR_S)
    quantum = income(MinerSpec(QUANTUM, 4e7), chain, market, YEAR_S)
    assert math.isclose(quantum / classical, math.sqrt(difficulty), rel_tol=1e-12)


def test_income_table1_row(spot_market):
    value = income(MinerSpec(QUANTUM, 4e7), BTC_2025, spot_market, YEAR_S)
    assert math.isclose(value, 6258.27, rel_tol=1e-3)
    scaled = income(MinerSpec(QUANTUM, 6.4e8), BTC_2025, spot_market, YEAR_S)
    assert math.isclose(scaled, 16 * value, rel_tol=1e-12)


def test_income_zero_reward(spot_market):
    chain = BTC_2025._replace(block_reward=0.0)
    assert income(MinerSpec(QUANTUM, 4e7), chain, spot_market, YEAR_S) == 0


@pytest.mark.parametrize('field', ('rate', 'reward', 'frate', 'timespan'))
def test_income_linearity(field):
    args = {'rate': 4e7, 'reward': 3.125, 'frate': 23536.12, 'timespan': YEAR_S}

    def evaluate(values):
        chain = BTC_2025._replace(block_reward=values['reward'])
        return income(MinerSpec(QUANTUM, values['rate']), chain,
                      Market(values['frate']), values['timespan'])

    base = evaluate(args)
    args[field] *= 2
    assert math.isclose(evaluate(args), 2 * base, rel_tol=1e-12)


def test_profit_break_even(spot_market):
    miner = MinerSpec(QUANTUM, 4e7)
    annual = income(miner, BTC_2025, spot_market, YEAR_S)
    assert math.isclose(profit(miner, BTC_2025, spot_market, YEAR_S), annual)
    loaded = MinerSpec(QUANTUM, 4e7, opex_rate=annual)
    assert abs(profit(loaded, BTC_2025, spot_market, YEAR_S)) <= 1e-9 * annual


def test_profit_setup_cost(spot_market):
    miner = MinerSpec(QUANTUM, 4e7, opex_rate=1000, setup_cost=500)
    annual = income(miner, BTC_2025, spot_market, YEAR_S)
    # half a year of operation
    value = profit(miner, BTC_2025, spot_market, YEAR_S / 2)
    assert math.isclose(value, annual / 2 - 500 - 500)


def test_profit_report(spot_market):
    miner = MinerSpec(QUANTUM, 4e7)
    report = profit_report(miner, BTC_2025, spot_market, YEAR_S)
    assert report.block_probability == block_probability(miner, BTC_2025)
    assert report.income_usd == income(miner, BTC_2025, spot_market, YEAR_S)
    assert report.timespan_s == YEAR_S


def test_profit_ratio_symmetry():
    market = Market(1.0)
    classical = MinerSpec(CLASSICAL, 1.0)
    quantum = MinerSpec(QUANTUM, 1.0)
    # at D = 1 both kinds mine at the same rate
    assert profit_ratio(classical, quantum, UNIT_CHAIN, market, YEAR_S) == 1.0


def test_profit_ratio_opex_offsets():
    market = Market(1.0)
    annual = income(MinerSpec(CLASSICAL, 1.0), UNIT_CHAIN, market, YEAR_S)
    classical = MinerSpec(CLASSICAL, 1.0, opex_rate=annual - 5)
    quantum = MinerSpec(QUANTUM, 1.0, opex_rate=annual - 10)
    assert math.isclose(profit_ratio(classical, quantum, UNIT_CHAIN, market, YEAR_S), 0.5)


def test_profit_ratio_equal_rates(spot_market):
    ratio = profit_ratio(MinerSpec(CLASSICAL, 4e7), MinerSpec(QUANTUM, 4e7),
                         BTC_2025, spot_market, YEAR_S)
    assert math.isclose(ratio, 1 / math.sqrt(BTC_2025.difficulty), rel_tol=1e-9)
    assert math.isclose(ratio, 4.828e-10, rel_tol=1e-3)


def test_profit_ratio_degenerate():
    chain = UNIT_CHAIN._replace(block_reward=0.0)
    with pytest.raises(DegenerateRatioError):
        profit_ratio(MinerSpec(CLASSICAL, 1.0), MinerSpec(QUANTUM, 1.0), chain,
                     Market(1.0), YEAR_S)


@pytest.mark.parametrize('rate, frate, expected', (
    (4e7, 10385.49, 2761.51),
    (6.4e8, 31000.00, 131886.68),
))
def test_break_even_opex(rate, frate, expected):
    value = break_even_opex(MinerSpec(QUANTUM, rate), BTC_2025, Market(frate))
    assert math.isclose(value, expected, rel_tol=1e-3)


def test_break_even_opex_zero_income():
    chain = BTC_2025._replace(block_reward=0.0)
    assert break_even_opex(MinerSpec(QUANTUM, 4e7), chain, Market(1.0)) == 0


def test_table1_defaults():
    rows = table1_scenarios()
    assert len(rows) == 8
    for row, expected in zip(rows, TABLE1_REFERENCE):
        assert math.isclose(row.break_even_opex_usd, expected, rel_tol=1e-3)
    assert [row.h_q for row in rows] == [4e7] * 4 + [6.4e8] * 4
    assert [row.f_usd for row in rows] == list(TABLE1_FRATES) * 2


def test_table1_column_ratios():
    rows = table1_scenarios()
    for first, second in zip(rows[:4], rows[4:]):
        assert math.isclose(second.break_even_opex_usd / first.break_even_opex_usd, 16)
    for row in rows[1:4]:
        ratio = row.break_even_opex_usd / rows[0].break_even_opex_usd
        assert math.isclose(ratio, row.f_usd / rows[0].f_usd, rel_tol=1e-12)


def test_table1_single_row(spot_market):
    rows = table1_scenarios(rates=[4e7], frates=[23536.12])
    assert len(rows) == 1
    expected = break_even_opex(MinerSpec(QUANTUM, 4e7), BTC_2025, spot_market)
    assert rows[0].break_even_opex_usd == expected


def test_table1_rates_after_doublings():
    assert TABLE1_RATES == (4e7, 6.4e8)


@pytest.mark.parametrize('rates, frates', (([], [1.0]), ([4e7], [])))
def test_table1_empty(rates, frates):
    with pytest.raises(PreconditionError):
        table1_scenarios(rates=rates, frates=frates)


@pytest.mark.parametrize('height, expected', (
    (0, 50.0),
    (209999, 50.0),
    (210000, 25.0),
    (840000, 3.125),
))
def test_halved_reward(height, expected):
    assert halved_reward(height) == expected


def test_income_follows_halving(spot_market):
    chain = BTC_2025._replace(block_reward=50.0, halving_interval=210000, height=840000)
    miner = MinerSpec(QUANTUM, 4e7)
    assert income(miner, chain, spot_market, YEAR_S) == income(miner, BTC_2025, spot_market,
                                                               YEAR_S)


@pytest.mark.parametrize('kwargs', (
    {'block_time_s': 0},
    {'block_time_s': 600, 'hash_size': 0.5},
    {'block_time_s': 600, 'difficulty': 0.5},
    {'block_time_s': 600, 'block_reward': -1},
    {'block_time_s': 600, 'retarget_interval': 0},
    {'block_time_s': 600, 'clamp': 0.5},
))
def test_chain_params_invalid(kwargs):
    with pytest.raises(PreconditionError):
        ChainParams(**kwargs)


@pytest.mark.parametrize('args', (
    ('asic', 1.0),
    (CLASSICAL, 0.0),
    (QUANTUM, 1.0, -1.0),
    (QUANTUM, 1.0, 0.0, -1.0),
))
def test_miner_spec_invalid(args):
    with pytest.raises(PreconditionError):
        MinerSpec(*args)


def test_market_invalid():
    with pytest.raises(PreconditionError):
        Market(0)


def test_block_probability_overflow():
    chain = ChainParams(block_time_s=1e200, hash_size=1, difficulty=1)
    with pytest.raises(RangeError):
        block_probability(MinerSpec(CLASSICAL, 1e10), chain)
