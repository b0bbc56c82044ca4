import time

import pytest

from cavity_cooling import PhysicalParams, choose_truncation, dyadic_sequence, run_open_protocol, thermal_state

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def reference_open_run():
    """The lossy five-atom run with the default experimental parameters, computed once; ``.elapsed`` is its wall time."""
    trunc = choose_truncation(3.6, 1e-8)
    start = time.perf_counter()
    res = run_open_protocol(PhysicalParams(), dyadic_sequence(5), thermal_state(3.6, trunc))
    res.elapsed = time.perf_counter() - start
    return res


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(label, ok, detail)``."""

    def record(label, ok, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
