import numpy as np
import pytest

from ddicool.geometry import magic_spacing

_CRITERIA: list[str] = []


@pytest.fixture(scope="session")
def s_m():
    return magic_spacing()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def criterion_log():
    return _CRITERIA


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
