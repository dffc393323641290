import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tricoul.kinematics import JacobiConfig, JacobiMomentum

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

Q_REF = (0.3, -0.5, 0.8, 0.6, 0.4, -0.2)


@pytest.fixture
def q_ref():
    return JacobiMomentum.from_array(Q_REF)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_config(rng, scale=1.0):
    return JacobiConfig.from_array(rng.normal(size=6) * scale)


def random_momentum(rng, kmin_frac=0.1):
    while True:
        q = JacobiMomentum.from_array(rng.normal(size=6))
        if min(q.pair_momenta()) >= kmin_frac * q.norm:
            return q


# one line per acceptance criterion, collected by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
