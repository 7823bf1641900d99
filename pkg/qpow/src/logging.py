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
Package wide logger. Engines obtain child loggers through
`vermouth.log_helpers.get_logger(__name__)`, which propagate here.
"""
import logging
from vermouth.log_helpers import (StyleAdapter, BipolarFormatter,
                                  CountingHandler, TypeAdapter,)

PACKAGE_LOGGER = 'qpow'
PRETTY_FORMAT = '{levelname:} - {type} - {message}'
DETAILED_FORMAT = '{levelname:} - {type} - {name} - {message}'

LOGLEVELS = {0: logging.INFO,
             1: logging.DEBUG,
             2: 5}


def _build_logger(name):
    """
    Package logger writing to stderr. At DEBUG and below records carry
    the name of the emitting module; warnings and errors are counted
    by `COUNTER`.
    """
    logger = TypeAdapter(logging.getLogger(name))
    formatter = BipolarFormatter(logging.Formatter(fmt=DETAILED_FORMAT, style='{'),
                                 logging.Formatter(fmt=PRETTY_FORMAT, style='{'),
                                 logging.DEBUG,
                                 logger=logger)
    console = logging.StreamHandler()
    console.setFormatter(formatter)
    counter = CountingHandler()
    counter.setLevel(logging.WARNING)
    logger.addHandler(console)
    logger.addHandler(counter)
    return StyleAdapter(logger), counter


LOGGER, COUNTER = _build_logger(PACKAGE_LOGGER)


def set_verbosity(verbosity):
    """
    Set the package log level from a `-v` count; counts beyond
    the most verbose level are clipped.
    """
    level = LOGLEVELS[min(verbosity, max(LOGLEVELS))]
    LOGGER.setLevel(level)
    return level
