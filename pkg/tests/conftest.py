import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from oshimalab import build_group

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def sl2():
    return build_group("sl2r")


@pytest.fixture(scope="session")
def sl3():
    return build_group("sl3r")


@pytest.fixture(scope="session")
def sl4():
    return build_group("sl4r")


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


E2 = np.array([[0.0, 1.0], [0.0, 0.0]])
F2 = np.array([[0.0, 0.0], [1.0, 0.0]])
H2 = np.array([[1.0, 0.0], [0.0, -1.0]])


def rot(phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])
