import os

import pytest
from hypothesis import HealthCheck, settings

from bootperc.graph import GraphSample

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def star4():
    # K_{1,4}: center 0, leaves 1..4
    return GraphSample.from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)])


@pytest.fixture
def path3():
    return GraphSample.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def k4():
    return GraphSample.from_edges(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])
