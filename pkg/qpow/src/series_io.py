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
CSV series in and out, and the run manifests written next to every
output file.
"""
import math
import re
import sys
from collections import namedtuple
from vermouth.parser_utils import LineParser
from vermouth.log_helpers import StyleAdapter, get_logger
from vermouth.file_writer import deferred_open, DeferredFileWriter
from .config_parser import ConfigDirector
from .errors import FileFormatError
from .forecast import years_since_epoch

LOGGER = StyleAdapter(get_logger(__name__))

SERIES_HEADER = ("x", "y")
MANIFEST_SUFFIX = ".manifest"
ISO_DATE = re.compile(r"^\d{4}-\d{2}-\d{2}")

SeriesRecord = namedtuple("SeriesRecord", ["x", "y"])

RunManifest = namedtuple("RunManifest", ["subcommand", "params", "seed", "version",
                                         "generator"])


def format_number(value):
    """
    Locale independent text for `value`. Floats use their shortest
    round-tripping representation; integers are written as such.
    """
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(float(value))
    return str(value)


class SeriesDirector(LineParser):
    """
    Parse a comma separated `x,y` file. The first non-comment line is
    the header; x must increase strictly from row to row. An x that
    looks like an ISO date is converted to years since the epoch.
    """
    COMMENT_CHAR = '#'

    def __init__(self, header=SERIES_HEADER):
        super().__init__()
        self.header = tuple(header)
        self.header_seen = False
        self.records = []

    def parse_line(self, line, lineno=0):
        tokens = [token.strip() for token in line.split(',')]
        if not self.header_seen:
            if tuple(tokens) != self.header:
                msg = "expected header '{}', got '{}'"
                raise FileFormatError(msg.format(",".join(self.header), line.strip()),
                                      lineno=lineno)
            self.header_seen = True
            return

        if len(tokens) != len(self.header):
            msg = "expected {} fields, got {}"
            raise FileFormatError(msg.format(len(self.header), len(tokens)), lineno=lineno)
        try:
            if ISO_DATE.match(tokens[0]):
                x_value = years_since_epoch(tokens[0])
            else:
                x_value = float(tokens[0])
            y_value = float(tokens[1])
        except ValueError as error:
            raise FileFormatError("could not read a number: {}".format(error),
                                  lineno=lineno) from error

        if not (math.isfinite(x_value) and math.isfinite(y_value)):
            raise FileFormatError("values must be finite", lineno=lineno)
        if self.records and x_value <= self.records[-1].x:
            msg = "x = {} does not increase over the previous row (x = {})"
            raise FileFormatError(msg.format(tokens[0], self.records[-1].x), lineno=lineno)
        self.records.append(SeriesRecord(x_value, y_value))

    def finalize(self, lineno=0):
        if not self.header_seen:
            raise FileFormatError("the file has no header line", lineno=lineno)
        super().finalize(lineno=lineno)


def read_series(lines):
    """
    Parse `lines` of a series file into a list of
    :class:`SeriesRecord`.
    """
    director = SeriesDirector()
    list(director.parse(iter(lines)))
    return director.records


def load_series(path):
    """
    Read the series file at `path`.

    Raises
    ------
    FileFormatError
        malformed rows or an x column that is not strictly increasing;
        the message cites the offending line
    """
    with open(path) as file_:
        return read_series(file_.readlines())


def render_csv(header, rows):
    """
    Render `rows` below `header` as comma separated lines.
    """
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_number(value) for value in row))
    return "\n".join(lines) + "\n"


def render_manifest(manifest):
    lines = ["run.subcommand = {}".format(manifest.subcommand),
             "run.seed = {}".format(format_number(manifest.seed)),
             "run.version = {}".format(manifest.version),
             "run.generator = {}".format(manifest.generator)]
    for key in sorted(manifest.params):
        value = manifest.params[key]
        if value is None:
            continue
        lines.append("{} = {}".format(key, format_number(value)))
    return "\n".join(lines) + "\n"


def emit(text, outpath=None, manifest=None):
    """
    Write `text` to `outpath`, or to standard output when no path is
    given. With a path, `manifest` is written next to it as
    `<outpath>.manifest`.
    """
    if outpath is None:
        sys.stdout.write(text)
        return

    with deferred_open(str(outpath), 'w') as outfile:
        outfile.write(text)
    if manifest is not None:
        with deferred_open(str(outpath) + MANIFEST_SUFFIX, 'w') as outfile:
            outfile.write(render_manifest(manifest))
    DeferredFileWriter().write()
    LOGGER.info("wrote {}", outpath, type="step")


def write_series(records, outpath=None, manifest=None):
    emit(render_csv(SERIES_HEADER, records), outpath, manifest)


class ManifestDirector(ConfigDirector):
    """
    Parse a manifest. Unlike parameter files any dotted key is
    accepted.
    """
    KEY = re.compile(r"^[a-z_0-9]+(\.[a-z_0-9]+)+$")

    def is_known_key(self, key):
        return self.KEY.match(key) is not None


def read_manifest(path):
    """
    Read a manifest written by :func:`emit` back into a
    :class:`RunManifest`.
    """
    director = ManifestDirector(source=str(path))
    with open(path) as file_:
        list(director.parse(iter(file_.readlines())))
    run = director.run
    try:
        return RunManifest(subcommand=run["run.subcommand"],
                           seed=run["run.seed"],
                           version=str(run["run.version"]),
                           generator=run["run.generator"],
                           params=dict(director.params))
    except KeyError as error:
        raise FileFormatError("manifest lacks the {} entry".format(error)) from error
