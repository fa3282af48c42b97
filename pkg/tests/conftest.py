import math

import pytest

from viag.experiments import ScenarioConfig

GAMMA_CA = 2 * math.pi * 5.2e6
KAPPA = 2 * math.pi * 173e3


@pytest.fixture(scope="session")
def cfg():
    return ScenarioConfig()


@pytest.fixture(scope="session")
def medium(cfg):
    return cfg.medium()


@pytest.fixture(scope="session")
def cavity(cfg):
    return cfg.cavity()


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
