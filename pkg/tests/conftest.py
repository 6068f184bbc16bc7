from __future__ import annotations

import pytest

from urnlab.model import build_spec
from urnlab.verify import default_grid


@pytest.fixture(scope="session")
def grid():
    return default_grid()


@pytest.fixture(scope="session")
def large_r():
    return build_spec(2, 7, 3, 1, 4, 3, "R")


@pytest.fixture(scope="session")
def large_m():
    return build_spec(2, 7, 3, 1, 4, 3, "M")


@pytest.fixture(scope="session")
def triangular():
    return build_spec(2, 4, 1, 0, 1, 3, "M")


@pytest.fixture(scope="session")
def polya():
    return build_spec(1, 1, 1, 0, 1, 1, "M")


@pytest.fixture(scope="session")
def critical():
    return build_spec(2, 4, 2, 1, 2, 2, "M")


@pytest.fixture(scope="session")
def small_m3():
    return build_spec(3, 3, 0, 1, 3, 3, "M")


# One PASS/FAIL line per acceptance criterion, aggregated over its parts.
_CRITERIA: dict[int, list[tuple[str, bool]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, label): acceptance criterion covered by the test")


def pytest_runtest_logreport(report):
    number = getattr(report, "criterion", None)
    if number is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA.setdefault(number[0], []).append((number[1], report.outcome == "passed"))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        number, label = marker.args
        callspec = getattr(item, "callspec", None)
        outcome.get_result().criterion = (number, f"{label} ({callspec.id})" if callspec else label)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        parts = _CRITERIA[number]
        ok = all(p for _, p in parts)
        detail = "; ".join(f"{label} [{'ok' if p else 'failed'}]" for label, p in parts)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
