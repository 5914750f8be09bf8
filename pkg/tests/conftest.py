import numpy as np
import pytest

from prlab.dressing import dress, make_sin_profiles
from prlab.symplectic import IrrationalityVector, build_omega_irr
from prlab.systems import catalog_get


@pytest.fixture(scope="session")
def torus4():
    return build_omega_irr(IrrationalityVector.sqrt_primes(2))


@pytest.fixture(scope="session")
def torus6():
    return build_omega_irr(IrrationalityVector.sqrt_primes(3))


@pytest.fixture(scope="session")
def sin_profiles():
    prof = make_sin_profiles()
    prof.validate()
    return prof


@pytest.fixture(scope="session")
def fh_const(torus4, sin_profiles):
    return dress(catalog_get("constant", (1.0,)), sin_profiles, torus4)


@pytest.fixture(scope="session")
def fh_small(torus4, sin_profiles):
    return dress(catalog_get("small-autonomous", (1e-3,)), sin_profiles, torus4)


@pytest.fixture(scope="session")
def fh_kicked(torus4, sin_profiles):
    return dress(catalog_get("kicked-rotor-smooth", (6.0,)), sin_profiles, torus4)


@pytest.fixture(scope="session")
def fh_zero(torus4, sin_profiles):
    return dress(catalog_get("constant", (0.0,)), sin_profiles, torus4)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
