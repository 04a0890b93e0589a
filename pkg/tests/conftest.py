import numpy as np
import pytest

import njrad
from _helpers import ACCEPTANCE_LINES


@pytest.fixture(scope="session")
def five():
    """(tree, exact map, perturbed map) for the five-leaf fixture."""
    return njrad.example_five_leaf()


@pytest.fixture(scope="session")
def eight():
    return njrad.example_eight_leaf()


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.line(line)
