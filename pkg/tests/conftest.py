import os

import pytest
from hypothesis import HealthCheck, settings

from sepsys.instances import load_instance

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def set4():
    return load_instance("inst-set4").build()


@pytest.fixture(scope="session")
def two_tri():
    return load_instance("inst-2tri").build()


@pytest.fixture(scope="session")
def k4pair():
    return load_instance("inst-k4pair").build()


@pytest.fixture(scope="session")
def corner_small():
    return load_instance("corner-small").build()


@pytest.fixture(scope="session")
def corner_chain():
    return load_instance("corner-chain").build()


def sep(U, label):
    """Separation id by its label, e.g. ``(abc|cdef)``."""
    return U.labels.index(label)
