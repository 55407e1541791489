import time

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

_ACCEPTANCE_LINES = []
_RUN = {"start": None, "failed": []}


def pytest_sessionstart(session):
    _RUN["start"] = time.perf_counter()


def pytest_runtest_logreport(report):
    if report.when == "call" and report.failed:
        _RUN["failed"].append(report.nodeid)


@pytest.fixture
def acceptance_line():
    """Record one PASS/FAIL line; the lines are printed at the end of the run."""

    def record(criterion, ok, detail):
        line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE_LINES.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    elapsed = time.perf_counter() - _RUN["start"]
    tr = terminalreporter
    tr.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
        tr.write_line(line)
    others = [n for n in _RUN["failed"] if "test_acceptance" not in n]
    ok = not others and elapsed < 300
    tr.write_line(
        f"full run: {'PASS' if ok else 'FAIL'}  {len(others)} non-acceptance failures, wall time {elapsed:.1f} s (limit 300 s)"
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_coeffs(rng, dim):
    c = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return c / np.linalg.norm(c)
