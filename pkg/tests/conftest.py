import numpy as np
import pytest

from monoidtopos.linalg import DEFAULT_TOL, hermitian_eig
from monoidtopos.monoid import FiniteMonoid, map_monoid
from monoidtopos.reduction import ProjectorAlphabet

PZ = np.array([[1, 0], [0, 0]], dtype=complex)
PMINUS = np.array([[0, 0], [0, 1]], dtype=complex)
PPLUS = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)

E1 = np.array([1.0, 0.0], dtype=complex)
E2 = np.array([0.0, 1.0], dtype=complex)
PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)


@pytest.fixture
def tol():
    return DEFAULT_TOL


@pytest.fixture
def m2():
    """The two-element monoid {1, e} with ee = e."""
    return FiniteMonoid([[0, 1], [1, 1]])


@pytest.fixture
def mm2():
    return map_monoid(2)


@pytest.fixture
def qubit_alphabet():
    return ProjectorAlphabet({"Pz": PZ, "Pplus": PPLUS})


@pytest.fixture
def sz_op():
    return hermitian_eig(SZ, snap_to=[1.0, -1.0])
