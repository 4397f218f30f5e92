"""Shared fixtures: canonical parameter sets and a one-time JIT warmup."""

import numpy as np
import pytest

from padic_sojourn.model import ModelParams, build_generator
from padic_sojourn import simulate


@pytest.fixture(scope="session")
def p22():
    return ModelParams(p=2, alpha=2.0)


@pytest.fixture(scope="session")
def p3_15():
    return ModelParams(p=3, alpha=1.5)


@pytest.fixture(scope="session")
def p205():
    return ModelParams(p=2, alpha=0.5)


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels(p22):
    # pay the numba compile cost once, outside any timed assertion
    gen = build_generator(p22, 8)
    simulate.run_ensemble(gen, horizon=1.0, n_paths=2, seed=0)
    yield


def assert_close(value, target, *, rel=0.0, abs_=0.0, label=""):
    tol = max(abs_, rel * abs(target))
    assert abs(value - target) <= tol, (
        f"{label or 'value'} {value!r} differs from {target!r} "
        f"by {abs(value - target):.3e} > {tol:.3e}"
    )


@pytest.fixture(scope="session")
def close():
    return assert_close


# one line per acceptance check, filled by tests/test_acceptance.py
SCOREBOARD = []


def pytest_terminal_summary(terminalreporter):
    # replay the scoreboard outside capture so it survives a plain run
    if SCOREBOARD:
        terminalreporter.write_sep("=", "acceptance scoreboard")
        for line in SCOREBOARD:
            terminalreporter.write_line(line)
