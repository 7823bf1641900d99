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
Exceptions raised by the qpow engines. Each class carries the exit
code the command line front end reports for it.
"""
import math


class QPowError(Exception):
    """Base class for all errors raised by qpow."""
    exit_code = 1


class RangeError(QPowError, ArithmeticError):
    """Raised when a computation overflows or is not finite."""


class DegenerateRatioError(QPowError, ZeroDivisionError):
    """Raised when the profit ratio is requested for a zero quantum profit."""


class StallError(QPowError):
    """Raised when no miner contributes any mining rate."""


class RetargetError(QPowError, ZeroDivisionError):
    """Raised when difficulty is retargeted over a zero elapsed time."""


class PreconditionError(QPowError, ValueError):
    """Raised when the input violates a documented precondition."""
    exit_code = 2


class SingularFitError(QPowError, ArithmeticError):
    """Raised when a least-squares design matrix is rank deficient."""


class CapacityError(QPowError):
    """Raised when a statevector would exceed the supported size."""
    exit_code = 2


class DomainError(QPowError, ValueError):
    """Raised when a result falls outside its physical domain."""

    def __init__(self, msg, exit_code=1):
        super().__init__(msg)
        self.exit_code = exit_code


class NoSolutionError(QPowError):
    """Raised when a search instance has no nonce under the target."""
    exit_code = 3


class FileFormatError(QPowError, IOError):
    """Raised when a parser fails due to invalid file format."""
    exit_code = 2

    def __init__(self, msg, lineno=None):
        if lineno is not None:
            msg = "line {}: {}".format(lineno, msg)
        super().__init__(msg)
        self.lineno = lineno


def check_finite(value, what):
    """
    Return `value` if it is a finite number, otherwise raise
    a :class:`RangeError` mentioning `what` was computed.
    """
    if not math.isfinite(value):
        msg = "{} is not finite ({}); the inputs overflow double precision."
        raise RangeError(msg.format(what, value))
    return value
