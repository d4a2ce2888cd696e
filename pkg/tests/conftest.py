import functools

import pytest

from dobac.scenario import load_scenario
from dobac.sim import simulate

PRESET = "msd-cubic-paper"


@functools.lru_cache(maxsize=None)
def preset_run(*overrides):
    """Full-horizon preset run, shared by every test in the session."""
    return simulate(load_scenario(PRESET, list(overrides)))


@pytest.fixture(scope="session")
def preset_scenario():
    return load_scenario(PRESET)


ACCEPTANCE_LINES = []


def record_criterion(number, title, passed, detail):
    line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append((number, line))
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
