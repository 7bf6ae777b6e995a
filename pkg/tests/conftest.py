import numpy as np
import pytest

from horolab import kernels
from horolab.heckeforms import tau_table

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def tau_big():
    # covers C * q for q = 100003 with the default cutoff C = 10
    return tau_table(1_000_040)


@pytest.fixture(scope="session")
def tau_small():
    return tau_table(30_000)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=kernels.available_backends(), ids=lambda m: m.BACKEND)
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
