import numpy as np
import pytest

from glpdrop.model import Model, ModelParams

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def model40():
    return Model(ModelParams(beta=2.0, d=2, L=40.0, N=320))


@pytest.fixture(scope="session")
def small_model():
    return Model(ModelParams(beta=2.0, d=2, L=8.0, N=32))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
