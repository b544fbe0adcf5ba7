import random

import pytest
from hypothesis import HealthCheck, settings

from mprkit.project import trial_seed

settings.register_profile(
    "mprkit",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("mprkit")

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return random.Random(trial_seed())


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
