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
Statevector simulation of quantum search over a toy hash based PoW
instance. A nonce solves the instance when its digest is at most the
target; the oracle flips the sign of exactly those basis states.
"""
import math
from collections import namedtuple
import numpy as np
from vermouth.log_helpers import StyleAdapter, get_logger
from .errors import PreconditionError, NoSolutionError, CapacityError

LOGGER = StyleAdapter(get_logger(__name__))

MIN_BITS = 2
MAX_BITS = 24
MASK_32 = 0xFFFFFFFF
HEADER_MULTIPLIER = 2654435761
MIX_MULTIPLIER = 2246822519


def toy_digest(header, nonce, n_bits):
    """
    Multiply-xorshift digest of (`header`, `nonce`) in [0, 2**n_bits).
    Bit exact: every step is taken modulo 2**32.

    Parameters
    ----------
    header: int
        32-bit unsigned block header
    nonce: int
        nonce in [0, 2**n_bits)
    n_bits: int

    Returns
    -------
    int
    """
    if not 0 <= nonce < 2**n_bits:
        msg = "nonce {} is outside the nonce space [0, 2**{})"
        raise PreconditionError(msg.format(nonce, n_bits))
    value = (header * HEADER_MULTIPLIER + nonce) & MASK_32
    value ^= value >> 13
    value = (value * MIX_MULTIPLIER) & MASK_32
    value ^= value >> 16
    return value % 2**n_bits


def toy_digests(header, nonces, n_bits):
    """
    Vectorised :func:`toy_digest` over an array of nonces.
    """
    # uint64 holds every 32x32 bit product before masking
    values = (np.uint64(header * HEADER_MULTIPLIER & MASK_32)
              + np.asarray(nonces, dtype=np.uint64)) & np.uint64(MASK_32)
    values ^= values >> np.uint64(13)
    values = (values * np.uint64(MIX_MULTIPLIER)) & np.uint64(MASK_32)
    values ^= values >> np.uint64(16)
    return values & np.uint64(2**n_bits - 1)


class ToyHash(namedtuple("ToyHash", ["n_bits", "header"])):
    """
    Toy hash function with an `n_bits` wide output for a fixed header.
    """
    __slots__ = ()

    def __new__(cls, n_bits, header):
        if n_bits < MIN_BITS:
            raise PreconditionError("n_bits must be at least {}, got {}".format(MIN_BITS, n_bits))
        _check_capacity(n_bits)
        if not 0 <= header <= MASK_32:
            msg = "header must be a 32-bit unsigned integer, got {}"
            raise PreconditionError(msg.format(header))
        return super().__new__(cls, int(n_bits), int(header))

    def __call__(self, nonce):
        return toy_digest(self.header, nonce, self.n_bits)

    def all_digests(self):
        return toy_digests(self.header, np.arange(2**self.n_bits, dtype=np.uint64), self.n_bits)


class PowInstance:
    """
    A toy PoW instance: find a nonce whose digest is at most `target`.
    The solution set is computed once by exhaustive scan.
    """

    def __init__(self, toy_hash, target):
        if not 0 <= target < 2**toy_hash.n_bits:
            msg = "target must lie in [0, 2**{}), got {}"
            raise PreconditionError(msg.format(toy_hash.n_bits, target))
        self.hash = toy_hash
        self.target = int(target)
        self._marked = None

    @classmethod
    def from_header(cls, header, n_bits, target):
        return cls(ToyHash(n_bits, header), target)

    @property
    def N(self):
        return 2**self.hash.n_bits

    @property
    def marked(self):
        """Boolean mask over all nonces; True for solutions."""
        if self._marked is None:
            self._marked = self.hash.all_digests() <= np.uint64(self.target)
        return self._marked

    @property
    def M(self):
        return count_solutions(self)

    def solutions(self):
        return set(np.flatnonzero(self.marked).tolist())

    def verify(self, nonce):
        """Check a single nonce; costs one digest evaluation."""
        return self.hash(nonce) <= self.target

    def __repr__(self):
        return "PowInstance(n_bits={}, header={}, target={})".format(self.hash.n_bits,
                                                                     self.hash.header,
                                                                     self.target)


def count_solutions(instance):
    """
    Number of nonces whose digest is at most the target.
    """
    return int(np.count_nonzero(instance.marked))


def optimal_iterations(N, M):
    """
    Number of Grover iterations k* = floor(pi / (4 theta)) with
    theta = asin(sqrt(M / N)), which rounds pi / (4 theta) - 1/2 to the
    nearest integer.

    Raises
    ------
    NoSolutionError
        M is zero
    """
    if M < 1:
        raise NoSolutionError("no solutions under target; Grover search cannot succeed")
    if M > N:
        raise PreconditionError("solution count {} exceeds the search space {}".format(M, N))
    theta = math.asin(math.sqrt(M / N))
    return max(0, int(math.floor(math.pi / (4 * theta))))


def analytic_success_probability(N, M, iterations):
    """Success probability sin^2((2k + 1) theta) after k iterations."""
    theta = math.asin(math.sqrt(M / N))
    return math.sin((2 * iterations + 1) * theta)**2


def _check_capacity(n_bits):
    if n_bits > MAX_BITS:
        msg = ("A statevector over 2**{} basis states needs {} amplitude slots "
               "({:.1f} MiB of float64); at most 2**{} are supported.")
        raise CapacityError(msg.format(n_bits, 2**n_bits, 2**n_bits * 8 / 2**20, MAX_BITS))


class GroverState:
    """
    Real amplitudes of the search register. The oracle and the
    inversion about the mean never leave the real subspace.
    """

    def __init__(self, n_bits):
        _check_capacity(n_bits)
        size = 2**n_bits
        self.amplitudes = np.full(size, 1.0 / math.sqrt(size))
        self.iteration_count = 0

    def apply_oracle(self, marked):
        self.amplitudes[marked] *= -1.0

    def apply_diffusion(self):
        self.amplitudes = 2.0 * self.amplitudes.mean() - self.amplitudes

    def iterate(self, marked):
        """One oracle query followed by the inversion about the mean."""
        self.apply_oracle(marked)
        self.apply_diffusion()
        self.iteration_count += 1

    def norm(self):
        return float(np.sum(self.amplitudes**2))

    def probability(self, marked):
        return float(np.sum(self.amplitudes[marked]**2))


def grover_search(instance, iterations):
    """
    Run `iterations` Grover iterations on `instance`.

    Parameters
    ----------
    instance: :class:`PowInstance`
    iterations: int

    Returns
    -------
    tuple(float, int)
        probability of measuring a solution and the number of oracle
        queries used

    Raises
    ------
    NoSolutionError
        the instance has no solutions
    CapacityError
        the statevector would be too large
    """
    _check_capacity(instance.hash.n_bits)
    if iterations < 0:
        raise PreconditionError("iterations must be nonnegative, got {}".format(iterations))
    if count_solutions(instance) == 0:
        raise NoSolutionError("no solutions under target {}".format(instance.target))

    state = GroverState(instance.hash.n_bits)
    marked = instance.marked
    for _ in range(iterations):
        state.iterate(marked)
    LOGGER.debug("{} iterations on {}, norm {}", iterations, instance, state.norm())
    return min(state.probability(marked), 1.0), state.iteration_count


def classical_search(instance, seed=None):
    """
    Draw nonces uniformly at random, with replacement, until one
    solves `instance`. The number of tries is geometric with mean N/M.

    Returns
    -------
    tuple(int, int)
        tries used and the solving nonce

    Raises
    ------
    NoSolutionError
        N draws failed and an exhaustive check finds no solution
    """
    rng = np.random.default_rng(seed)
    marked = instance.marked
    size = instance.N
    tries = 0
    checked = False
    batch = max(64, size // 4)
    while True:
        nonces = rng.integers(0, size, size=batch)
        hits = np.flatnonzero(marked[nonces])
        if hits.size:
            first = int(hits[0])
            return tries + first + 1, int(nonces[first])
        tries += batch
        if tries >= size and not checked:
            if count_solutions(instance) == 0:
                msg = "no solutions under target {} after {} tries"
                raise NoSolutionError(msg.format(instance.target, tries))
            checked = True


def ideal_speedup(n_bits):
    """
    Speed factor of a quantum search running in sqrt(2**n) over a
    brute force search running in 2**n.
    """
    return 2.0**(n_bits / 2.0)


AdvantageReport = namedtuple("AdvantageReport", ["classical_expected", "grover_queries",
                                                 "verify_ops"])


def advantage_report(instance):
    """
    Expected classical tries N/M, Grover queries k* and the cost of
    verifying a claimed nonce, which is a single digest.
    """
    n_solutions = count_solutions(instance)
    if n_solutions == 0:
        raise NoSolutionError("no solutions under target {}".format(instance.target))
    return AdvantageReport(classical_expected=instance.N / n_solutions,
                           grover_queries=optimal_iterations(instance.N, n_solutions),
                           verify_ops=1)
