import numpy as np
import pytest

from spintop import dynamics as dyn

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def example_point():
    """Rest-frame point with m = l = 1 used throughout the dynamics tests."""
    return dyn.PhasePoint([0, 0, 0, 0], [1, 0, 0, 0], [1, 0, 0, 1], [0, 0.5, 0, 0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
