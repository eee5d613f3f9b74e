import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

from zonecast import build_grid, build_torus, ctr_order


@pytest.fixture(scope="session")
def torus10():
    return build_torus(10)


@pytest.fixture(scope="session")
def grid10():
    return build_grid(10)


@pytest.fixture(scope="session")
def torus10_w1(torus10):
    return ctr_order(torus10, 1)


@pytest.fixture(scope="session")
def torus8():
    return build_torus(8)


@pytest.fixture(scope="session")
def torus8_w2(torus8):
    return ctr_order(torus8, 2)
