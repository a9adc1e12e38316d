import numpy as np
import pytest

from polyshell import ElasticParams, build_model, build_polygon

# Decagon, R0 = 1, k = kappa = 1, f = 0.25 per vertex, computed with the
# projected-gradient oracle (pg_tol 1e-14) and cross-checked with a generic
# conic QP solver.
DECAGON_F025_CONTACTS = (1, 2, 10)
DECAGON_F025_HEIGHT = 1.07299637966668
DECAGON_F025_FIT_RADIUS = 1.08022886761433
# relaxed free-arc radius / R0 for 3, 5, 7 contacts (same oracle, pinned solve)
DECAGON_RELAXED_RATIO = {3: 1.02668734423781, 5: 1.23591578166533, 7: 1.60111360431802}


@pytest.fixture(scope="session")
def decagon():
    return build_polygon(10, 1.0)


@pytest.fixture(scope="session")
def decagon_model(decagon):
    return build_model(decagon, ElasticParams(1.0, 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
