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
Reader for parameter files. A parameter file holds one `key = value`
pair per line with dotted keys; everything after a `#` is a comment.
Presets shipped with qpow use the same format.
"""
import re
from vermouth.parser_utils import LineParser
from vermouth.log_helpers import StyleAdapter, get_logger
import qpow
from .errors import FileFormatError, PreconditionError

LOGGER = StyleAdapter(get_logger(__name__))

KNOWN_KEYS = {"chain.t", "chain.eta", "chain.difficulty", "chain.reward",
              "chain.retarget_interval", "chain.clamp", "chain.halving_interval",
              "chain.height", "market.rate", "timespan.days",
              "network.rate", "network.doubling",
              "quantum.clock", "quantum.doubling", "quantum.window",
              "sim.mode", "sim.seed", "sim.epochs", "sim.difficulty",
              "adoption.threshold", "adoption.count", "adoption.rate",
              "adoption.opex", "adoption.setup",
              "profit.mode", "profit.rate", "profit.opex", "profit.setup",
              "profit.compare_rate", "profit.compare_opex", "profit.compare_setup",
              "table1.rates", "table1.frates", "crossover.horizon", "crossover.step",
              "grover.n_bits", "grover.header", "grover.target", "grover.iterations",
              "extrapolate.history", "extrapolate.degree", "extrapolate.at"}
# written by emit at the top of every manifest
RUN_KEYS = ("run.subcommand", "run.seed", "run.version", "run.generator")
MINER_KEY = re.compile(r"^miners\.(\d+)\.(kind|rate|opex|setup)$")
PRESET_SUFFIX = ".cfg"


def _coerce(value):
    """
    Interpret `value` as int, then float, falling back to the
    stripped string.
    """
    for convert in (int, float):
        try:
            return convert(value)
        except ValueError:
            continue
    return value


class ConfigDirector(LineParser):
    """
    Parse `key = value` lines into the flat dict `params`. Later
    definitions of a key replace earlier ones.

    A run manifest is a valid parameter file: its `run.*` entries are
    kept apart in `run` and do not become parameters. With
    `subcommand` given, a manifest written by another subcommand is
    refused.
    """
    COMMENT_CHAR = '#'

    def __init__(self, params=None, source="<config>", subcommand=None):
        super().__init__()
        self.params = params if params is not None else {}
        self.source = source
        self.subcommand = subcommand
        self.seen = {}
        self.run = {}

    @staticmethod
    def is_known_key(key):
        return key in KNOWN_KEYS or MINER_KEY.match(key) is not None

    def parse_line(self, line, lineno=0):
        key, sep, value = line.partition('=')
        key = key.strip()
        value = value.strip()
        if not sep:
            raise FileFormatError("expected 'key = value', got '{}'".format(line.strip()),
                                  lineno=lineno)
        if not key or not value:
            raise FileFormatError("empty key or value in '{}'".format(line.strip()),
                                  lineno=lineno)
        if key in RUN_KEYS:
            self.run[key] = _coerce(value)
            return
        if not self.is_known_key(key):
            raise FileFormatError("unknown parameter '{}'".format(key), lineno=lineno)

        if key in self.seen:
            msg = "{}: '{}' on line {} overrides the value from line {}"
            LOGGER.warning(msg, self.source, key, lineno, self.seen[key])
        self.seen[key] = lineno
        self.params[key] = _coerce(value)

    def finalize(self, lineno=0):
        recorded = self.run.get("run.subcommand")
        if self.subcommand is not None and recorded not in (None, self.subcommand):
            msg = "{} records a '{}' run and cannot configure '{}'"
            raise PreconditionError(msg.format(self.source, recorded, self.subcommand))
        version = self.run.get("run.version")
        if version is not None and str(version) != qpow.__version__:
            LOGGER.warning("{} was written by qpow {}; this is qpow {}", self.source,
                           version, qpow.__version__)
        super().finalize(lineno=lineno)


def read_config(lines, params=None, source="<config>", subcommand=None):
    """
    Parse `lines` of a parameter file and update `params`.

    Parameters
    ----------
    lines: iterable[str]
    params: dict
        parameters to update in place; a new dict when omitted
    source: str
        name of the input used in log messages
    subcommand: str
        the subcommand being configured; a manifest of another
        subcommand raises :class:`PreconditionError`

    Returns
    -------
    dict
        the updated parameters
    """
    director = ConfigDirector(params, source=source, subcommand=subcommand)
    list(director.parse(iter(lines)))
    return director.params


def load_config(path, params=None, subcommand=None):
    """
    Read the parameter file or run manifest at `path`.
    """
    with open(path) as file_:
        lines = file_.readlines()
    return read_config(lines, params, source=str(path), subcommand=subcommand)


def available_presets():
    return sorted(path.stem for path in (qpow.DATA_PATH / 'presets').glob('*' + PRESET_SUFFIX))


def load_preset(name, params=None):
    """
    Read the preset `name` shipped in the data directory.

    Raises
    ------
    PreconditionError
        no preset of that name exists
    """
    path = qpow.DATA_PATH / 'presets' / (name + PRESET_SUFFIX)
    if not path.is_file():
        msg = "unknown preset '{}'; available presets are: {}"
        raise PreconditionError(msg.format(name, ", ".join(available_presets())))
    LOGGER.info("loading preset {}", name, type="step")
    return load_config(path, params)
