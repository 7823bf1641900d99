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
import logging
import pytest
from qpow.src.logging import LOGGER, LOGLEVELS, set_verbosity
from qpow.src.econ_model import ChainParams
from qpow.src.chain_sim import retarget
from qpow.src.io_cli import main


@pytest.mark.parametrize('verbosity, expected', (
    (0, logging.INFO),
    (1, logging.DEBUG),
    (2, 5),
    (7, 5),
))
def test_set_verbosity(verbosity, expected):
    assert set_verbosity(verbosity) == expected
    assert LOGGER.getEffectiveLevel() == expected
    set_verbosity(0)


def test_loglevels_ordered():
    levels = [LOGLEVELS[key] for key in sorted(LOGLEVELS)]
    assert levels == sorted(levels, reverse=True)


def test_engine_warning_propagates(caplog):
    chain = ChainParams(600, 2**32, 1000, clamp=4)
    with caplog.at_level(logging.WARNING):
        retarget(1000.0, 1.0, chain)
    records = [record for record in caplog.records if record.levelname == "WARNING"]
    assert records
    assert records[0].name.startswith("qpow.")
    assert "clamped" in records[0].getMessage()


def test_cli_error_logged(caplog):
    with caplog.at_level(logging.ERROR):
        assert main(['grover', '--bits', '25']) == 2
    messages = [record.getMessage() for record in caplog.records
                if record.levelname == "ERROR"]
    assert any("amplitude slots" in msg for msg in messages)
