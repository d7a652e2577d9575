import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from radsym.potential import CompositePotential

settings.register_profile("radsym", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("radsym")

# (alpha, beta) returned by search_alpha_beta(0.05, 0.5, 2); test_certificate
# re-derives them, other tests use the constants to stay fast.
CERTIFIED = dict(eps=0.05, alpha=0.00625, beta=0.0015625, power_s=0.5, dim=2)


@pytest.fixture(scope="session")
def certified():
    return CompositePotential(**CERTIFIED)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
