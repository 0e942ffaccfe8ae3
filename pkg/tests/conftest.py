import numpy as np
import pytest

from nsmx import spectral as sp


@pytest.fixture(scope="session")
def lat8():
    return sp.make_lattice(8)


@pytest.fixture(scope="session")
def lat16():
    return sp.make_lattice(16)


@pytest.fixture(scope="session")
def lat32():
    return sp.make_lattice(32)


def random_hermitian_field(lattice, seed, scale=1.0):
    """Seeded realizable field with all retained modes populated."""
    rng = np.random.default_rng(seed)
    n = lattice.n
    c = rng.standard_normal((3, n, n, n)) + 1j * rng.standard_normal((3, n, n, n))
    return sp.SpectralField(lattice, sp.hermitian_symmetrize(scale * c))


@pytest.fixture
def rand_field8(lat8):
    return random_hermitian_field(lat8, seed=711)


@pytest.fixture
def rand_field16(lat16):
    return random_hermitian_field(lat16, seed=42)
