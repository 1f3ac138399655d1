import pytest
from hypothesis import HealthCheck, settings

from rhasym.orthocore import build_system
from rhasym.szegomodel import build_model
from rhasym.weights import WeightSpec, shipped_weights

settings.register_profile("numeric", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("numeric")


@pytest.fixture(scope="session")
def legendre():
    return WeightSpec.legendre()


@pytest.fixture(scope="session")
def chebyshev():
    return WeightSpec.chebyshev()


@pytest.fixture(scope="session")
def legendre_sys(legendre):
    return build_system(legendre, 160)


@pytest.fixture(scope="session")
def legendre_model(legendre):
    return build_model(legendre)


@pytest.fixture(scope="session")
def chebyshev_sys(chebyshev):
    return build_system(chebyshev, 160)


@pytest.fixture(scope="session")
def shipped():
    return shipped_weights()


@pytest.fixture(scope="session")
def shipped_models(shipped):
    return [build_model(w) for w in shipped]


# Acceptance verdicts, filled by tests/test_acceptance.py and echoed at the end
# of the run so they show even when output capture is on.
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[key])
