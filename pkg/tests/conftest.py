from __future__ import annotations

from collections import defaultdict

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_TITLES = {
    1: "single-dimension shift row at N=2048",
    2: "half-shift averaging bound",
    3: "fast paths agree with oracles",
    4: "proof-term properties",
    5: "greedy-stage invariants",
    6: "kappa < 1 < kappa0 pattern (reported)",
    7: "full 50-dimension table (needs vector file)",
    8: "bound engine values",
    9: "convergence slope of the derandomised rule",
}

_criterion_of: dict[str, int] = {}
_outcomes: dict[int, list[str]] = defaultdict(list)
_notes: dict[int, list[str]] = defaultdict(list)


def pytest_collection_modifyitems(config, items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None:
            _criterion_of[item.nodeid] = int(mark.args[0])


def pytest_runtest_logreport(report):
    n = _criterion_of.get(report.nodeid)
    if n is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes[n].append(report.outcome)


@pytest.fixture
def acceptance_note(request):
    """Attach a free-text line to the acceptance summary of this test's criterion."""
    n = _criterion_of.get(request.node.nodeid)

    def note(text: str) -> None:
        if n is not None:
            _notes[n].append(text)

    return note


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_TITLES):
        got = _outcomes.get(n)
        if not got:
            continue
        if "failed" in got:
            status = "FAIL"
        elif all(o == "skipped" for o in got):
            status = "SKIP"
        else:
            status = "PASS"
        passed = sum(o == "passed" for o in got)
        tr.write_line(f"AC{n} {status}  {ACCEPTANCE_TITLES[n]}  ({passed}/{len(got)} checks passed)")
        for line in _notes.get(n, []):
            tr.write_line(f"      {line}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
