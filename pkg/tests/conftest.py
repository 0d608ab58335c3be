from __future__ import annotations

import functools

import pytest
from hypothesis import HealthCheck, settings

from overcert.certify import square_up
from overcert.fixtures import quartics_fixture
from overcert.solver import SolveConfig, multistart_solve

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def quartics_pipeline():
    """Fixture, squared-up system and its solved candidates (shared across tests)."""
    q = quartics_fixture()
    g, A = square_up(q.f, seed=42)
    S = multistart_solve(g, SolveConfig(starts=1000, seed=0))
    return q, g, S


@pytest.fixture
def quartics():
    return quartics_pipeline()


ACCEPTANCE_LINES: list = []


def record_criterion(num: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"criterion {num} {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
