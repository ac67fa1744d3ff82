import numpy as np
import pytest

from subfactor_geo import family_construction, family_inclusion
from subfactor_geo.families import FAMILY_NAMES

ALL_FAMILIES = list(FAMILY_NAMES)


@pytest.fixture(scope="session")
def constructions():
    """One shared build per family; everything downstream is read-only."""
    return {name: family_construction(name) for name in ALL_FAMILIES}


@pytest.fixture(scope="session")
def inclusions():
    return {name: family_inclusion(name) for name in ALL_FAMILIES}


@pytest.fixture(params=ALL_FAMILIES, scope="session")
def family_name(request):
    return request.param


@pytest.fixture(scope="session")
def bc(family_name, constructions):
    return constructions[family_name]


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
