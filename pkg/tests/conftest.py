import numpy as np
import pytest

from gcdeform.gt_algebra import HolPoissonBase
from gcdeform.spectral_fields import TorusGeometry


@pytest.fixture
def geo2():
    return TorusGeometry(2, 8, 2)


@pytest.fixture
def geo1():
    return TorusGeometry(1, 16, 4)


@pytest.fixture
def base2():
    return HolPoissonBase(2, [1.0])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def acceptance_lines(request):
    lines = []
    request.config._acceptance_lines = lines
    return lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
