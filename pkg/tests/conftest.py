import sys

import numpy as np
import pytest

from mclm.spectral import grid


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def x128():
    return grid(128)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(module.RESULTS):
        terminalreporter.write_line(line)
