import warnings

import numpy as np
import pytest
from scipy.integrate import IntegrationWarning

from qbm_esd import KernelSet, PhysicalParams


@pytest.fixture(scope="session")
def srt5():
    return KernelSet(PhysicalParams(tau=5.0))


@pytest.fixture(scope="session")
def srt02():
    return KernelSet(PhysicalParams(tau=0.2))


@pytest.fixture(scope="session")
def ohmic():
    return KernelSet(PhysicalParams())


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def _quiet_quadpack():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        yield


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
