import numpy as np
import pytest

from qftc.oracle import InputVector
from qftc.reference import dft_reference


def random_state(rng, n_qubits):
    v = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return v / np.linalg.norm(v)


def real_spectrum_input(rng, N, y_max=0.9):
    """Random unit vector whose transform is real with every |y_k| <= y_max."""
    while True:
        y = rng.normal(size=N)
        y /= np.linalg.norm(y)
        if np.max(np.abs(y)) > y_max:
            continue
        # inverse transform of a real spectrum
        x = np.conj(dft_reference(np.conj(y)))
        return InputVector.normalized(x), y


def random_hermitian_c(rng, N):
    c = rng.normal(size=N) + 1j * rng.normal(size=N)
    c = c + np.conj(c[(-np.arange(N)) % N])
    return c / np.linalg.norm(c)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
