import numpy as np
import pytest

from splitcut.graph import FIXED_BENCHMARKS, benchmark_graph
from splitcut.simulator import BackendProfile, NoiseModel


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import CRITERION_LINES
    except ImportError:
        return
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERION_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def benchmarks():
    return {name: benchmark_graph(name) for name in FIXED_BENCHMARKS}


@pytest.fixture(scope="session")
def ideal_backend():
    return BackendProfile("ideal1", seed=11)


@pytest.fixture(scope="session")
def ideal_backend_2():
    return BackendProfile("ideal2", seed=12)


@pytest.fixture(scope="session")
def noisy_backend():
    return BackendProfile("hw1", noise=NoiseModel(0.002, 0.02, 0.035), seed=21)


def random_params(rng: np.random.Generator, p: int):
    from splitcut.circuit import ParamVector

    return ParamVector(
        tuple(rng.uniform(0, np.pi, size=p)),
        tuple(rng.uniform(0, np.pi / 2, size=p)),
    )
