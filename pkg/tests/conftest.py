import pytest

from scarf_spectrum import derive_params


@pytest.fixture(scope="session")
def case1_params():
    """V1 = 1, V+ = 0.25, V0 = V- = 0, L = 1."""
    return derive_params(0.0, 0.25, 0.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def case2_params():
    """Sine-bottom well: V1 = 1, everything else zero, L = 1."""
    return derive_params(0.0, 0.0, 0.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def figure1_params():
    return derive_params(1.0, 0.25, 0.1, 1.0, 1.0)
