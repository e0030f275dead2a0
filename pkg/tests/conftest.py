import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from livsic.golden import fdeg2_extensions, fdeg_extension

settings.register_profile("livsic", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("livsic")


@pytest.fixture
def rng():
    return np.random.default_rng(20241017)


@pytest.fixture(scope="session")
def fdeg():
    return fdeg_extension()


@pytest.fixture(scope="session")
def fdeg2():
    """``(X over V, X over W)``."""
    return fdeg2_extensions()
