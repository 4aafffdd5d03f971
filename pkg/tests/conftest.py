"""Shared pytest plumbing.

The acceptance tests register one verdict line per criterion; the hook below
replays them as a block at the end of the run so the pass/fail ledger is
visible regardless of output capture settings.
"""
import numpy as np
import pytest

CRITERION_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    CRITERION_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not CRITERION_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in sorted(CRITERION_LINES):
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
