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
Epoch by epoch simulation of a PoW chain mined by a mix of classical
and quantum miners. Each epoch mines `retarget_interval` blocks at a
fixed difficulty, after which the difficulty is retargeted from the
elapsed time. An optional adoption rule adds quantum miners whenever
quantum mining is the more profitable option.

Mining is modelled as memoryless: a miner with block probability P per
block period t finds blocks at rate P / t.
"""
import math
from collections import namedtuple
import numpy as np
from tqdm import tqdm
from vermouth.log_helpers import StyleAdapter, get_logger
from .econ_model import (ChainParams, MinerSpec, Market, block_probability,
                         profit_ratio)
from .errors import (PreconditionError, StallError, RetargetError,
                     DegenerateRatioError)

LOGGER = StyleAdapter(get_logger(__name__))

DETERMINISTIC = "deterministic"
STOCHASTIC = "stochastic"
SIM_MODES = (DETERMINISTIC, STOCHASTIC)
GENERATOR_ID = "numpy.random.PCG64"
MIN_DIFFICULTY = 1.0


class AdoptionRule(namedtuple("AdoptionRule", ["threshold", "count", "template"])):
    """
    Add `count` copies of the quantum miner `template` after every
    epoch in which the profit ratio G drops below `threshold`.
    """
    __slots__ = ()

    def __new__(cls, threshold, count, template):
        if not math.isfinite(threshold):
            raise PreconditionError("adoption threshold must be finite, got {}".format(threshold))
        if int(count) != count or count < 1:
            msg = "adoption count must be a positive integer, got {}"
            raise PreconditionError(msg.format(count))
        if not isinstance(template, MinerSpec) or not template.is_quantum:
            raise PreconditionError("the adoption template must be a quantum MinerSpec")
        return super().__new__(cls, float(threshold), int(count), template)


class SimConfig(namedtuple("SimConfig", ["chain", "miners", "market", "mode", "seed",
                                         "epochs", "adoption_rule"])):
    """
    Everything that determines a simulation run. Identical configs,
    seed included, give identical results.
    """
    __slots__ = ()

    def __new__(cls, chain, miners, market, mode=DETERMINISTIC, seed=0, epochs=1,
                adoption_rule=None):
        if not isinstance(chain, ChainParams):
            raise PreconditionError("chain must be a ChainParams instance")
        if not isinstance(market, Market):
            raise PreconditionError("market must be a Market instance")
        miners = tuple(miners)
        if not miners:
            raise PreconditionError("a simulation needs at least one miner")
        if mode not in SIM_MODES:
            msg = "simulation mode must be one of {}, got {}"
            raise PreconditionError(msg.format(", ".join(SIM_MODES), mode))
        if int(seed) != seed or not 0 <= seed < 2**64:
            raise PreconditionError("seed must be a 64-bit unsigned integer, got {}".format(seed))
        if int(epochs) != epochs or epochs < 1:
            raise PreconditionError("epochs must be a positive integer, got {}".format(epochs))
        return super().__new__(cls, chain, miners, market, mode, int(seed), int(epochs),
                               adoption_rule)


EpochStats = namedtuple("EpochStats", ["epoch_index", "difficulty_start", "elapsed_s",
                                       "mean_block_time_s", "per_miner_blocks",
                                       "classical_reward_share", "profit_ratio_G",
                                       "quantum_share", "difficulty_end"])


def miner_rate(miner, chain):
    """
    Expected blocks per second found by `miner`.

    Returns
    -------
    float
        H t / (eta D) for classical and H t / (eta sqrt(D)) for
        quantum miners
    """
    return block_probability(miner, chain) / chain.block_time_s


def retarget(difficulty, elapsed_s, chain):
    """
    Difficulty for the next epoch, D' = D * (retarget_interval * t) /
    elapsed_s. With a clamp c configured on `chain` the adjustment
    D'/D is limited to [1/c, c]. The result is never below 1.

    Raises
    ------
    RetargetError
        `elapsed_s` is zero
    """
    if elapsed_s == 0:
        raise RetargetError("cannot retarget over an elapsed time of zero")
    if elapsed_s < 0:
        raise PreconditionError("elapsed time must be positive, got {}".format(elapsed_s))

    factor = chain.retarget_interval * chain.block_time_s / elapsed_s
    if chain.clamp is not None and not 1.0 / chain.clamp <= factor <= chain.clamp:
        clamped = min(max(factor, 1.0 / chain.clamp), chain.clamp)
        LOGGER.warning("difficulty adjustment {:.4g} clamped to {:.4g}", factor, clamped)
        factor = clamped

    new_difficulty = difficulty * factor
    if new_difficulty < MIN_DIFFICULTY:
        LOGGER.warning("difficulty {:.4g} raised to the floor of {}", new_difficulty,
                       MIN_DIFFICULTY)
        new_difficulty = MIN_DIFFICULTY
    return new_difficulty


def _rate_share(miners, chain):
    probs = np.array([block_probability(miner, chain) for miner in miners])
    total = probs.sum()
    if total <= 0:
        raise StallError("no miner contributes any mining rate")
    quantum = sum(prob for miner, prob in zip(miners, probs) if miner.is_quantum)
    return float(quantum / total)


def majority_check(config):
    """
    Share of the block rate held by quantum miners at the configured
    difficulty, and whether it is a strict majority.

    Parameters
    ----------
    config: :class:`SimConfig`

    Returns
    -------
    tuple(float, bool)
    """
    share = _rate_share(config.miners, config.chain)
    return share, share > 0.5


def _first_of_kind(miners, quantum):
    for miner in miners:
        if miner.is_quantum == quantum:
            return miner
    return None


class ChainSimulator:
    """
    Stateful simulation of one chain. Holds the current difficulty,
    height and miner set; distinct instances share nothing.
    """

    def __init__(self, config):
        self.config = config
        self.miners = list(config.miners)
        self.difficulty = float(config.chain.difficulty)
        self.height = config.chain.height
        self.epoch_index = 0
        self.rng = np.random.Generator(np.random.PCG64(config.seed))

    @property
    def chain(self):
        """
        Chain parameters at the current difficulty, with the block
        reward in effect at the current height.
        """
        base = self.config.chain
        return base._replace(difficulty=self.difficulty,
                             block_reward=base.reward_at(self.height),
                             halving_interval=None,
                             height=self.height)

    @property
    def n_quantum(self):
        return sum(1 for miner in self.miners if miner.is_quantum)

    def quantum_share(self):
        return _rate_share(self.miners, self.chain)

    def profit_ratio(self, elapsed_s, quantum=None):
        """
        G of the first classical miner against the first quantum miner
        (or `quantum` if given) over `elapsed_s`; nan when either side
        is missing or the quantum profit is zero.
        """
        classical = _first_of_kind(self.miners, quantum=False)
        if quantum is None:
            quantum = _first_of_kind(self.miners, quantum=True)
        if classical is None or quantum is None:
            return math.nan
        try:
            return profit_ratio(classical, quantum, self.chain, self.config.market, elapsed_s)
        except DegenerateRatioError:
            return math.nan

    def _mine_deterministic(self, probs):
        interval = self.config.chain.retarget_interval
        total = float(probs.sum())
        elapsed = interval * self.config.chain.block_time_s / total
        return elapsed, interval * probs / total

    def _mine_stochastic(self, probs):
        interval = self.config.chain.retarget_interval
        rates = probs / self.config.chain.block_time_s
        # one exponential arrival per miner and block; the earliest wins
        arrivals = self.rng.exponential(1.0 / rates, size=(interval, len(rates)))
        winners = np.argmin(arrivals, axis=1)
        elapsed = float(arrivals.min(axis=1).sum())
        return elapsed, np.bincount(winners, minlength=len(rates)).astype(float)

    def run_epoch(self):
        """
        Mine one retarget interval at the current difficulty, then
        retarget.

        Returns
        -------
        :class:`EpochStats`

        Raises
        ------
        StallError
            the miners have a total rate of zero
        """
        chain = self.chain
        if chain.difficulty < MIN_DIFFICULTY:
            msg = "difficulty must be at least 1, got {}"
            raise PreconditionError(msg.format(chain.difficulty))
        probs = np.array([block_probability(miner, chain) for miner in self.miners])
        if not probs.sum() > 0:
            raise StallError("no miner contributes any mining rate; the chain stalls")

        if self.config.mode == STOCHASTIC:
            elapsed, blocks = self._mine_stochastic(probs)
        else:
            elapsed, blocks = self._mine_deterministic(probs)

        classical_blocks = sum(count for miner, count in zip(self.miners, blocks)
                               if not miner.is_quantum)
        new_difficulty = retarget(chain.difficulty, elapsed, self.config.chain)
        stats = EpochStats(epoch_index=self.epoch_index,
                           difficulty_start=chain.difficulty,
                           elapsed_s=elapsed,
                           mean_block_time_s=elapsed / chain.retarget_interval,
                           per_miner_blocks=blocks.tolist(),
                           classical_reward_share=float(classical_blocks / blocks.sum()),
                           profit_ratio_G=self.profit_ratio(elapsed),
                           quantum_share=self.quantum_share(),
                           difficulty_end=new_difficulty)

        self.difficulty = new_difficulty
        self.height += chain.retarget_interval
        self.epoch_index += 1
        return stats

    def adopt(self, stats):
        """
        Apply the adoption rule after an epoch. While no quantum miner
        exists the rule's template is evaluated as the prospective one.
        Returns the number of miners added.
        """
        rule = self.config.adoption_rule
        if rule is None:
            return 0
        ratio = stats.profit_ratio_G
        if math.isnan(ratio) and self.n_quantum == 0:
            ratio = self.profit_ratio(stats.elapsed_s, quantum=rule.template)
        if not ratio < rule.threshold:
            return 0
        self.miners.extend([rule.template] * rule.count)
        LOGGER.info("G = {:.4g} below {}; {} quantum miners join", ratio, rule.threshold,
                    rule.count, type="step")
        return rule.count

    def run(self):
        history = []
        for _ in tqdm(range(self.config.epochs)):
            stats = self.run_epoch()
            history.append(stats)
            self.adopt(stats)
        return history


def run_simulation(config):
    """
    Run `config.epochs` epochs of a fresh :class:`ChainSimulator`.

    Parameters
    ----------
    config: :class:`SimConfig`

    Returns
    -------
    list[:class:`EpochStats`]
    """
    LOGGER.info("simulating {} epochs in {} mode", config.epochs, config.mode, type="step")
    return ChainSimulator(config).run()
