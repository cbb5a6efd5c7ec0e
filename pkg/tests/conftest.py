import numpy as np
import pytest

from optoport.dynamics import PhysicalParams, couplings_from_params

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def ref_params():
    return PhysicalParams()


@pytest.fixture(scope="session")
def ref_couplings(ref_params):
    return couplings_from_params(ref_params)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
