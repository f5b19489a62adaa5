from __future__ import annotations

import pytest

from xpuperf import load_bundled_catalog

_ACCEPTANCE_RESULTS: list[tuple[str, str, bool]] = []


@pytest.fixture(scope="session")
def catalog():
    return load_bundled_catalog()


def record_acceptance(criterion: str, description: str, passed: bool) -> None:
    """Collect one pass/fail line per acceptance criterion for the summary."""
    _ACCEPTANCE_RESULTS.append((criterion, description, passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, description, passed in _ACCEPTANCE_RESULTS:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{criterion}] {description}: {status}")
