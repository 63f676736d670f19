import numpy as np
import pytest

from zeno_lab.model import ModelParams

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20180517)


@pytest.fixture
def params3():
    return ModelParams(nu=1.0, n_memory=3, r=1.62, delta_t=0.6)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
