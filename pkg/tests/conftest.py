import pytest

from eulerdisk import BasisSpec, build_basis


@pytest.fixture(scope="session")
def basis():
    """Reference resolution shared across the suite."""
    return build_basis(BasisSpec(n_theta=32, k_radial=32, dealias_pad=1.5))


@pytest.fixture(scope="session")
def basis_small():
    """Cheap basis for wiring-level tests."""
    return build_basis(BasisSpec(n_theta=16, k_radial=12, dealias_pad=1.5))
