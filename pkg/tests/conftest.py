import numpy as np
import pytest

from qretro.sampling import rng

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

BELL = np.zeros((4, 4), dtype=complex)
_psi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
BELL[:] = np.outer(_psi, _psi.conj())


@pytest.fixture
def gen():
    return rng(20260823)
