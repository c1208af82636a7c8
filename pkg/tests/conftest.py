from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from maskirental.model import Instance, ProblemParams

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).parent / "data"

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def figure_params() -> ProblemParams:
    return ProblemParams(10, 10, 60)


@pytest.fixture
def figure_instance() -> Instance:
    return Instance(tuple(range(1, 11)))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
