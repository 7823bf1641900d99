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
Profitability algebra for classical and quantum PoW miners.

A miner of hash rate H on a chain with block time t, hash size eta and
difficulty D wins a block period with probability

    P_C = H t^2 / (eta D)          (classical)
    P_Q = H t^2 / (eta sqrt(D))    (quantum, H is the equivalent rate)

and earns I = f(T/t * P * B) over a timespan T. Profit subtracts the
operating cost accumulated over T and the setup cost. All amounts are
kept at full precision; rounding happens in the front end only.
"""
import math
from collections import namedtuple
from itertools import product
from vermouth.log_helpers import StyleAdapter, get_logger
from .errors import PreconditionError, DegenerateRatioError, check_finite
from .forecast import GrowthModel

LOGGER = StyleAdapter(get_logger(__name__))

CLASSICAL = "classical"
QUANTUM = "quantum"
MINER_KINDS = (CLASSICAL, QUANTUM)

# opex rates are quoted per year of 365 days
YEAR_S = 365 * 24 * 3600.0


class ChainParams(namedtuple("ChainParams", ["block_time_s", "hash_size", "difficulty",
                                             "block_reward", "retarget_interval", "clamp",
                                             "halving_interval", "height"])):
    """
    Protocol constants of a PoW chain.

    Parameters
    ----------
    block_time_s: float
        target block time t in seconds
    hash_size: float
        hash size constant eta; 2**32 for Bitcoin
    difficulty: float
        difficulty D, at least 1
    block_reward: float
        coins paid per block B
    retarget_interval: int
        number of blocks between difficulty adjustments
    clamp: float or None
        bound c on a single adjustment D'/D in [1/c, c]
    halving_interval: int or None
        when set, the reward halves every `halving_interval` blocks
        counted from height 0 and `block_reward` is the initial reward
    height: int
        chain height at which the first simulated epoch starts
    """
    __slots__ = ()

    def __new__(cls, block_time_s, hash_size=2**32, difficulty=1.0, block_reward=0.0,
                retarget_interval=2016, clamp=None, halving_interval=None, height=0):
        if not block_time_s > 0:
            raise PreconditionError("block time must be positive, got {}".format(block_time_s))
        if not hash_size >= 1:
            raise PreconditionError("hash size must be at least 1, got {}".format(hash_size))
        if not difficulty >= 1:
            raise PreconditionError("difficulty must be at least 1, got {}".format(difficulty))
        if not block_reward >= 0:
            raise PreconditionError("block reward must be nonnegative, got {}".format(block_reward))
        if int(retarget_interval) != retarget_interval or retarget_interval < 1:
            raise PreconditionError("retarget interval must be a positive integer, "
                                    "got {}".format(retarget_interval))
        if clamp is not None and not clamp >= 1:
            raise PreconditionError("retarget clamp must be at least 1, got {}".format(clamp))
        if halving_interval is not None and halving_interval < 1:
            msg = "halving interval must be positive, got {}"
            raise PreconditionError(msg.format(halving_interval))
        if height < 0:
            raise PreconditionError("chain height must be nonnegative, got {}".format(height))
        return super().__new__(cls, float(block_time_s), float(hash_size), float(difficulty),
                               float(block_reward), int(retarget_interval), clamp,
                               halving_interval, int(height))

    def reward_at(self, height):
        """
        Block reward paid at `height`, taking halvings into account
        when a halving interval is configured.
        """
        if self.halving_interval is None:
            return self.block_reward
        return halved_reward(height, self.block_reward, self.halving_interval)


class MinerSpec(namedtuple("MinerSpec", ["kind", "rate", "opex_rate", "setup_cost"])):
    """
    A single mining entity. For quantum miners `rate` is the
    equivalent hash rate. `opex_rate` is in USD per year.
    """
    __slots__ = ()

    def __new__(cls, kind, rate, opex_rate=0.0, setup_cost=0.0):
        if kind not in MINER_KINDS:
            msg = "miner kind must be one of {}, got {}"
            raise PreconditionError(msg.format(", ".join(MINER_KINDS), kind))
        if not rate > 0:
            raise PreconditionError("miner rate must be positive, got {}".format(rate))
        if not opex_rate >= 0:
            raise PreconditionError("operating cost must be nonnegative, got {}".format(opex_rate))
        if not setup_cost >= 0:
            raise PreconditionError("setup cost must be nonnegative, got {}".format(setup_cost))
        return super().__new__(cls, kind, float(rate), float(opex_rate), float(setup_cost))

    @property
    def is_quantum(self):
        return self.kind == QUANTUM


class Market(namedtuple("Market", ["rate_usd_per_coin"])):
    """
    Fiat conversion f(x) = x * rate_usd_per_coin.
    """
    __slots__ = ()

    def __new__(cls, rate_usd_per_coin):
        if not rate_usd_per_coin > 0:
            msg = "conversion rate must be positive, got {}"
            raise PreconditionError(msg.format(rate_usd_per_coin))
        return super().__new__(cls, float(rate_usd_per_coin))

    def convert(self, coins):
        return coins * self.rate_usd_per_coin


ProfitReport = namedtuple("ProfitReport", ["block_probability", "income_usd",
                                           "profit_usd", "timespan_s"])

Table1Row = namedtuple("Table1Row", ["h_q", "f_usd", "break_even_opex_usd"])

# 40 MHz today and the same device after four Moore's law doublings
QUANTUM_CLOCK_TODAY = 4e7
TABLE1_RATES = (QUANTUM_CLOCK_TODAY,
                GrowthModel(QUANTUM_CLOCK_TODAY, 1.0).after_doublings(4))
# spot price, 12 month average, conservative and high-end prediction
TABLE1_FRATES = (23536.12, 10385.49, 31000.00, 100000.00)
BTC_2025 = ChainParams(block_time_s=600, hash_size=2**32, difficulty=4.2903e18,
                       block_reward=3.125, retarget_interval=2016)


def halved_reward(height, initial_reward=50.0, halving_interval=210000):
    """
    Block reward at chain `height` for a reward that starts at
    `initial_reward` and halves every `halving_interval` blocks.
    """
    if height < 0:
        raise PreconditionError("chain height must be nonnegative, got {}".format(height))
    return initial_reward / 2**(int(height) // int(halving_interval))


def _effective_difficulty(miner, chain):
    # quantum search only pays the square root of the difficulty
    if miner.is_quantum:
        return math.sqrt(chain.difficulty)
    return chain.difficulty


def block_probability(miner, chain):
    """
    Probability that `miner` finds a block within one block period.

    Parameters
    ----------
    miner: :class:`MinerSpec`
    chain: :class:`ChainParams`

    Returns
    -------
    float
        H t^2 / (eta D) for classical and H t^2 / (eta sqrt(D))
        for quantum miners

    Raises
    ------
    PreconditionError
        difficulty below 1
    RangeError
        the result is not finite
    """
    if chain.difficulty < 1:
        raise PreconditionError("difficulty must be at least 1, got {}".format(chain.difficulty))
    period = chain.block_time_s * chain.block_time_s
    prob = miner.rate * period / (chain.hash_size * _effective_difficulty(miner, chain))
    return check_finite(prob, "block probability")


def income(miner, chain, market, timespan_s):
    """
    Fiat income f(T/t * P * B) of `miner` over `timespan_s` seconds.
    """
    if not timespan_s > 0:
        raise PreconditionError("timespan must be positive, got {}".format(timespan_s))
    blocks = timespan_s / chain.block_time_s * block_probability(miner, chain)
    return check_finite(market.convert(blocks * chain.reward_at(chain.height)), "income")


def operating_cost(miner, timespan_s):
    """
    Operating cost of `miner` accumulated over `timespan_s`.
    """
    return timespan_s / YEAR_S * miner.opex_rate


def profit(miner, chain, market, timespan_s):
    """
    Profit I - T*O - S of `miner` over `timespan_s` seconds, with the
    yearly operating cost scaled to the timespan.
    """
    return (income(miner, chain, market, timespan_s)
            - operating_cost(miner, timespan_s)
            - miner.setup_cost)


def profit_report(miner, chain, market, timespan_s):
    """
    Collect probability, income and profit of `miner` in a
    :class:`ProfitReport`.
    """
    return ProfitReport(block_probability=block_probability(miner, chain),
                        income_usd=income(miner, chain, market, timespan_s),
                        profit_usd=profit(miner, chain, market, timespan_s),
                        timespan_s=timespan_s)


def profit_ratio(classical, quantum, chain, market, timespan_s):
    """
    Profit ratio G = R_C / R_Q. Values below 1 mean the quantum
    miner is the more profitable one.

    Raises
    ------
    DegenerateRatioError
        the quantum profit is exactly zero
    """
    profit_c = profit(classical, chain, market, timespan_s)
    profit_q = profit(quantum, chain, market, timespan_s)
    if profit_q == 0:
        raise DegenerateRatioError("quantum profit is zero; the profit ratio is undefined")
    ratio = profit_c / profit_q
    if ratio < 0:
        LOGGER.warning("negative profit ratio {:.4g}: one of the miners runs at a loss", ratio)
    return ratio


def break_even_opex(miner, chain, market, timespan_s=YEAR_S):
    """
    Yearly operating cost at which `miner` exactly breaks even over
    `timespan_s`, ignoring setup cost. For a timespan of one year this
    is the yearly income.
    """
    return income(miner, chain, market, timespan_s) / (timespan_s / YEAR_S)


def table1_scenarios(chain=BTC_2025, rates=TABLE1_RATES, frates=TABLE1_FRATES,
                     timespan_s=YEAR_S):
    """
    Break-even operating cost for every combination of quantum
    equivalent rate and fiat conversion rate.

    Parameters
    ----------
    chain: :class:`ChainParams`
    rates: list[float]
        quantum equivalent hash rates
    frates: list[float]
        USD per coin
    timespan_s: float

    Returns
    -------
    list[:class:`Table1Row`]
        rows ordered by rate first, conversion rate second
    """
    if not rates or not frates:
        raise PreconditionError("both the rate and the conversion rate lists must be non-empty")

    rows = []
    for rate, frate in product(rates, frates):
        miner = MinerSpec(QUANTUM, rate)
        opex = break_even_opex(miner, chain, Market(frate), timespan_s)
        rows.append(Table1Row(h_q=rate, f_usd=frate, break_even_opex_usd=opex))
    return rows
