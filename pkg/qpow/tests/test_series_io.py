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
Test reading and writing series files and run manifests.
"""
import math
import numpy as np
import pytest
import qpow
from qpow.src.series_io import (SeriesRecord, RunManifest, MANIFEST_SUFFIX, format_number,
                                read_series, load_series, render_csv, emit, write_series,
                                read_manifest)
from qpow.src.errors import FileFormatError


def test_read_series():
    records = read_series(["x,y", "0,1", "1.5,2e3"])
    assert records == [SeriesRecord(0.0, 1.0), SeriesRecord(1.5, 2000.0)]


def test_read_series_header_only():
    assert read_series(["# nothing measured yet", "x,y"]) == []


@pytest.mark.parametrize('lines, lineno', (
    (["x,y", "0,1", "0,2"], 3),
    (["x,y", "1,1", "0,2"], 3),
    (["x,z", "0,1"], 1),
    (["x,y", "0,1,2"], 2),
    (["x,y", "0,one"], 2),
    (["x,y", "0,nan"], 2),
))
def test_read_series_errors(lines, lineno):
    with pytest.raises(FileFormatError) as error:
        read_series(lines)
    assert error.value.lineno == lineno
    assert "line {}".format(lineno) in str(error.value)


def test_read_series_no_header():
    with pytest.raises(FileFormatError):
        read_series(["# only a comment"])


def test_load_series_quadratic():
    records = load_series(qpow.TEST_DATA / 'quadratic_history.csv')
    assert [record.x for record in records] == [0, 1, 2, 3, 4, 5]
    assert records[-1].y == 29.5


def test_load_series_dates():
    records = load_series(qpow.TEST_DATA / 'dated_history.csv')
    expected = [0.0, 365 / 365.25, 730 / 365.25]
    for record, x_value in zip(records, expected):
        assert math.isclose(record.x, x_value, abs_tol=1e-12)
    assert [record.y for record in records] == [100, 200, 300]


@pytest.mark.parametrize('value, expected', (
    (0.1, "0.1"),
    (3, "3"),
    (1e20, "1e+20"),
    (True, "true"),
    (math.nan, "nan"),
    (np.float64(360000.0), "360000.0"),
    (np.float64(0.1) + np.float64(0.2), "0.30000000000000004"),
    (np.int64(12), "12"),
    ("stochastic", "stochastic"),
))
def test_format_number(value, expected):
    assert format_number(value) == expected


def test_render_csv():
    text = render_csv(("epoch", "difficulty"), [(0, 1.5), (1, 3.0)])
    assert text == "epoch,difficulty\n0,1.5\n1,3.0\n"


def test_emit_stdout(capsys):
    emit("x,y\n1,2\n")
    assert capsys.readouterr().out == "x,y\n1,2\n"


def test_emit_with_manifest(tmp_path):
    outpath = tmp_path / 'sim.csv'
    manifest = RunManifest(subcommand="simulate",
                           params={"sim.mode": "stochastic", "sim.epochs": 3,
                                   "chain.clamp": None, "market.rate": 23536.12},
                           seed=2025, version=qpow.__version__,
                           generator="numpy.random.PCG64")
    write_series([SeriesRecord(0.0, 1.0)], outpath, manifest)
    assert outpath.read_text() == "x,y\n0.0,1.0\n"

    read_back = read_manifest(str(outpath) + MANIFEST_SUFFIX)
    assert read_back.subcommand == "simulate"
    assert read_back.seed == 2025
    assert read_back.version == qpow.__version__
    assert read_back.generator == "numpy.random.PCG64"
    # unset parameters are not recorded
    assert read_back.params == {"sim.mode": "stochastic", "sim.epochs": 3,
                                "market.rate": 23536.12}


def test_write_then_load_series(tmp_path):
    outpath = tmp_path / 'series.csv'
    records = [SeriesRecord(-1.5, 0.30000000000000004),
               SeriesRecord(0.1, 1e-300),
               SeriesRecord(1 / 3, 2.5e18),
               SeriesRecord(2e-7, -123456789.123456789)]
    write_series(records, outpath)
    assert load_series(outpath) == records


def test_read_manifest_incomplete(tmp_path):
    path = tmp_path / 'out.csv.manifest'
    path.write_text("run.subcommand = grover\n")
    with pytest.raises(FileFormatError):
        read_manifest(path)
