import re

import pytest

from layerpot import make_curve

_DOCS = {}
_OUTCOMES = {}
_CRIT = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


def pytest_collection_modifyitems(items):
    for it in items:
        m = _CRIT.search(it.nodeid)
        if m:
            doc = (it.function.__doc__ or "").strip().splitlines()
            _DOCS[int(m.group(1))] = doc[0] if doc else it.name


def pytest_runtest_logreport(report):
    m = _CRIT.search(report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or report.failed:
        if _OUTCOMES.get(n) != "FAIL":
            _OUTCOMES[n] = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_OUTCOMES):
        terminalreporter.write_line(f"criterion {n:2d}: {_OUTCOMES[n]:4s}  {_DOCS.get(n, '')}")


@pytest.fixture(scope="session")
def circle():
    return make_curve("circle")


@pytest.fixture(scope="session")
def ex4():
    return make_curve("ex4", depth=8)
