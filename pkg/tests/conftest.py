import numpy as np
import pytest

from fefficient.market import shock_statistics_matrix
from fefficient.solver import FeasibilitySpec


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def three_bank():
    """Three banks, three assets, zero-mean shocks, q = b = 0.08."""
    x = 0.08
    g = shock_statistics_matrix(np.zeros(3), (0.15, 0.2, 0.3))
    return FeasibilitySpec(np.full(3, x), np.full(3, x), (0.15, 0.1, 0.05), g)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
