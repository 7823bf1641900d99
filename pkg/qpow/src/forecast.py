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
Growth curves for network hash rates and quantum clock rates, the
year at which a single quantum device out-mines a network, and
polynomial extrapolation of difficulty histories.
"""
import math
from collections import namedtuple
from datetime import date, datetime
import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as P
import scipy.linalg
from vermouth.log_helpers import StyleAdapter, get_logger
from .errors import (PreconditionError, SingularFitError, DomainError,
                     check_finite)

LOGGER = StyleAdapter(get_logger(__name__))

# Doubling period that reproduces the ~27 year crossover of a 40 MHz
# device against 130 EH/s; it is reverse-engineered, not measured.
DEFAULT_DOUBLING_YEARS = 1.66
DEFAULT_WINDOW_S = 1.0
DEFAULT_EPOCH = date(2025, 1, 1)
DEFAULT_DEGREE = 2
JULIAN_YEAR_S = 365.25 * 24 * 3600.0

BITCOIN_NETWORK_RATE = 130e18
MONERO_NETWORK_RATE = 1.28e9
ETC_NETWORK_RATE = 6.43e12


def equivalent_hash_rate(clock_rate, window_s=DEFAULT_WINDOW_S):
    """
    Classical hash rate matched by a Grover device running at
    `clock_rate` cycles per second. Within a window of `window_s`
    seconds the device covers (clock_rate * window_s)**2 hashes.

    Parameters
    ----------
    clock_rate: float
        cycles per second
    window_s: float
        accounting window in seconds

    Returns
    -------
    float
        equivalent hashes per second
    """
    if not clock_rate > 0:
        raise PreconditionError("clock rate must be positive, got {}".format(clock_rate))
    if not window_s > 0:
        raise PreconditionError("window must be positive, got {}".format(window_s))
    cycles = clock_rate * window_s
    rate = cycles * cycles / window_s
    return check_finite(rate, "equivalent hash rate")


class GrowthModel(namedtuple("GrowthModel", ["initial_rate", "doubling_period_years",
                                             "quadratic_equivalent", "window_s"])):
    """
    Exponential (Moore's law) growth of a rate. When
    `quadratic_equivalent` is set the rate is a quantum clock rate and
    :meth:`rate_at` reports its equivalent hash rate.
    """
    __slots__ = ()

    def __new__(cls, initial_rate, doubling_period_years=DEFAULT_DOUBLING_YEARS,
                quadratic_equivalent=False, window_s=DEFAULT_WINDOW_S):
        if not initial_rate > 0:
            raise PreconditionError("initial rate must be positive, got {}".format(initial_rate))
        if not doubling_period_years > 0:
            msg = "doubling period must be positive, got {}"
            raise PreconditionError(msg.format(doubling_period_years))
        return super().__new__(cls, float(initial_rate), float(doubling_period_years),
                               bool(quadratic_equivalent), float(window_s))

    def raw_rate_at(self, years):
        """Network or clock rate after `years` of growth."""
        return self.initial_rate * 2**(years / self.doubling_period_years)

    def rate_at(self, years):
        """Hash rate, or equivalent hash rate, after `years` of growth."""
        raw = self.raw_rate_at(years)
        if self.quadratic_equivalent:
            return equivalent_hash_rate(raw, self.window_s)
        return check_finite(raw, "growth rate")

    def after_doublings(self, doublings):
        """Raw rate after an integer number of doubling periods."""
        return self.initial_rate * 2**doublings

    @property
    def log2_growth(self):
        # doublings of the reported rate per year
        factor = 2.0 if self.quadratic_equivalent else 1.0
        return factor / self.doubling_period_years


CrossoverResult = namedtuple("CrossoverResult", ["years_until_crossover", "already_crossed",
                                                 "series", "scan_years"])

PolyFit = namedtuple("PolyFit", ["degree", "coefficients", "residual_rms",
                                 "center", "centered_coefficients"])
PolyFit.__new__.__defaults__ = (0.0, None)


def _sample_years(horizon_years, step_years):
    if not step_years > 0:
        raise PreconditionError("step must be positive, got {}".format(step_years))
    if horizon_years < step_years:
        msg = "horizon {} is shorter than one step {}"
        raise PreconditionError(msg.format(horizon_years, step_years))
    n_steps = int(math.floor(horizon_years / step_years + 1e-9))
    return [idx * step_years for idx in range(n_steps + 1)]


def extrapolate_series(model, horizon_years, step_years):
    """
    Sample `model` from year 0 up to `horizon_years` every `step_years`.

    Returns
    -------
    list[tuple(float, float)]
        (year, rate) pairs
    """
    return [(year, model.rate_at(year)) for year in _sample_years(horizon_years, step_years)]


def _closed_form_crossover(network, quantum):
    start_network = network.rate_at(0)
    start_quantum = quantum.rate_at(0)
    if start_quantum >= start_network:
        return 0.0
    growth_gap = quantum.log2_growth - network.log2_growth
    if growth_gap <= 0:
        msg = ("The quantum equivalent rate starts below the network rate and does "
               "not grow faster; it never overtakes the network.")
        raise DomainError(msg)
    return math.log2(start_network / start_quantum) / growth_gap


def crossover_time(network, quantum, horizon_years=None, step_years=0.1):
    """
    Years until a single quantum device matches the network hash rate.

    With a shared doubling period p the quantum equivalent rate
    quadruples while the network doubles, so the crossover lies at
    p * log2(R_net(0) / R_q(0)). The sampled series is scanned as well;
    the first sample at or past the crossover is reported as
    `scan_years`.

    Parameters
    ----------
    network: :class:`GrowthModel`
        network hash rate, `quadratic_equivalent` unset
    quantum: :class:`GrowthModel`
        quantum clock rate, `quadratic_equivalent` set
    horizon_years: float
        extent of the series; defaults to one step past the crossover
    step_years: float
        sampling step of the series

    Returns
    -------
    :class:`CrossoverResult`
    """
    if network.quadratic_equivalent:
        raise PreconditionError("the network model must grow linearly in hash rate")
    if not quantum.quadratic_equivalent:
        raise PreconditionError("the quantum model must report equivalent hash rates")

    years = _closed_form_crossover(network, quantum)
    already_crossed = years == 0.0
    if already_crossed:
        LOGGER.info("quantum device already out-mines the network", type="step")

    if horizon_years is None:
        horizon_years = max(years + step_years, step_years)
    elif horizon_years < years:
        msg = "crossover at {:.2f} years lies beyond the requested horizon of {} years"
        LOGGER.warning(msg, years, horizon_years)

    series = []
    scan_years = None
    for year in _sample_years(horizon_years, step_years):
        network_rate = network.rate_at(year)
        quantum_rate = quantum.rate_at(year)
        series.append((year, network_rate, quantum_rate))
        if scan_years is None and quantum_rate >= network_rate:
            scan_years = year
    return CrossoverResult(years_until_crossover=years,
                           already_crossed=already_crossed,
                           series=series,
                           scan_years=scan_years)


def years_since_epoch(when, epoch=DEFAULT_EPOCH):
    """
    Fractional (Julian) years from `epoch` to `when`. Both may be
    :class:`datetime.date` or ISO formatted strings.
    """
    if isinstance(when, str):
        when = datetime.fromisoformat(when)
    if isinstance(epoch, str):
        epoch = datetime.fromisoformat(epoch)
    if not isinstance(when, datetime):
        when = datetime(when.year, when.month, when.day)
    if not isinstance(epoch, datetime):
        epoch = datetime(epoch.year, epoch.month, epoch.day)
    return (when - epoch).total_seconds() / JULIAN_YEAR_S


def fit_polynomial(points, degree=DEFAULT_DEGREE):
    """
    Ordinary least-squares polynomial through `points`. The abscissae
    are shifted to their mean before solving, which keeps date valued
    x well conditioned.

    Parameters
    ----------
    points: list[tuple(float, float)]
    degree: int

    Returns
    -------
    :class:`PolyFit`
        coefficients are in ascending powers of x

    Raises
    ------
    PreconditionError
        fewer than degree + 1 points
    SingularFitError
        the design matrix is rank deficient
    """
    if int(degree) != degree or degree < 0:
        raise PreconditionError("degree must be a nonnegative integer, got {}".format(degree))
    degree = int(degree)
    if len(points) < degree + 1:
        msg = "a degree {} fit needs at least {} points, got {}"
        raise PreconditionError(msg.format(degree, degree + 1, len(points)))

    x_values, y_values = np.asarray(points, dtype=float).T
    center = x_values.mean()
    design = np.vander(x_values - center, degree + 1, increasing=True)
    centered, _, rank, _ = scipy.linalg.lstsq(design, y_values)
    if rank < degree + 1:
        msg = ("The design matrix has rank {} but a degree {} fit needs rank {}; "
               "there are not enough distinct x values.")
        raise SingularFitError(msg.format(rank, degree, degree + 1))

    residuals = y_values - design @ centered
    residual_rms = float(np.sqrt(np.mean(residuals**2)))

    # substitute u = x - center to report coefficients in powers of x
    coefficients = Polynomial(centered)(Polynomial([-center, 1.0])).coef
    coefficients = np.pad(coefficients, (0, degree + 1 - len(coefficients)))
    LOGGER.debug("fitted degree {} polynomial with residual rms {}", degree, residual_rms)
    return PolyFit(degree=degree,
                   coefficients=[float(coef) for coef in coefficients],
                   residual_rms=residual_rms,
                   center=float(center),
                   centered_coefficients=[float(coef) for coef in centered])


def evaluate_fit(fit, x_value):
    """
    Evaluate `fit` at `x_value`, using the centered coefficients
    when the fit carries them.
    """
    if fit.centered_coefficients is not None:
        return float(P.polyval(x_value - fit.center, fit.centered_coefficients))
    return float(P.polyval(x_value, fit.coefficients))


def extrapolate_difficulty(fit, date_x):
    """
    Difficulty predicted by `fit` at `date_x`.

    Raises
    ------
    DomainError
        the polynomial is not positive at `date_x`
    """
    value = evaluate_fit(fit, date_x)
    if not value > 0:
        msg = ("The fitted polynomial extrapolates to a nonpositive difficulty ({}) at "
               "x = {}. Use a different degree or restrict the data range.")
        raise DomainError(msg.format(value, date_x), exit_code=3)
    return value
