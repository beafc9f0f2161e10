import time

import numpy as np
import pytest

from dimerctl.controller import ControllerState
from dimerctl.network import NetworkParams
from dimerctl.ssa import SimulationConfig, run_closed_loop

# Example network of the closed-loop experiment
EXAMPLE = NetworkParams(k1=1.0, b=3.0, gamma1=2.0, gamma2=1.0)
MU, KC, TS = 5.0, 1.0, 0.01
SEED = 20131


@pytest.fixture(scope="session")
def example_params():
    return EXAMPLE


@pytest.fixture(scope="session")
def example_trace():
    """Closed loop with 2000 cells over 100 time units (a few seconds)."""
    config = SimulationConfig(n_cells=2000, t_final=100.0, ts=TS, seed=SEED)
    start = time.perf_counter()
    trace = run_closed_loop(config, EXAMPLE, ControllerState(0.0, KC, MU, TS))
    trace.meta["elapsed_s"] = time.perf_counter() - start
    return trace


def random_params(rng, k1=True):
    return NetworkParams(
        k1=float(rng.uniform(0.0, 20.0)) if k1 else 0.0,
        b=float(rng.uniform(0.1, 10.0)),
        gamma1=float(rng.uniform(0.1, 10.0)),
        gamma2=float(rng.uniform(0.1, 10.0)),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
