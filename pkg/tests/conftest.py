import numpy as np
import pytest

from spikedgue import accel

BACKENDS = sorted(accel.backends())


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Route every accelerated kernel through one backend for the test."""
    mod = accel.backends()[request.param]
    for name in ("log_ratio_sum", "step_tail", "cauchy_sum", "gaussian_kde_grid"):
        monkeypatch.setattr(accel, name, getattr(mod, name))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(label, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  {label}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
