import numpy as np
import pytest
from hypothesis import settings

from hermite_schrodinger import Grid

settings.register_profile("default", deadline=None, max_examples=25, derandomize=True)
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid():
    return Grid(12.0, 2048)


@pytest.fixture(scope="session")
def coarse_grid():
    return Grid(12.0, 1024)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
