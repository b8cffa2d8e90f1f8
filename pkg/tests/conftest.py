import numpy as np
import pytest

from qpwegner import CoefficientSchedule, RandeletteField, ShiftAction, ThetaSample

import _acceptance_log


@pytest.fixture
def golden():
    return ShiftAction()


@pytest.fixture
def schedule():
    return CoefficientSchedule(c_upper=1.0, c_lower=1.0, kappa=2.0, M=2.0)


@pytest.fixture
def field(schedule):
    return RandeletteField(schedule, ThetaSample(12345), nu=1, truncation_N=30)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_log.LINES:
            terminalreporter.write_line(line)
