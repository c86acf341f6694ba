import numpy as np
import pytest

from qfi_disturb.model import DisturbedModel, validate_density

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def random_hermitian(rng, d, norm=None):
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    H = (X + X.conj().T) / 2
    if norm is not None:
        H = H / np.linalg.norm(H, 2) * norm
    return H


def random_density(rng, d, rank=None):
    rank = d if rank is None else rank
    X = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = X @ X.conj().T
    return validate_density(rho / np.trace(rho).real)


def random_pure(rng, d):
    return random_density(rng, d, rank=1)


def random_model(rng, d, hnorm=5.0, span=3.0):
    HI = random_hermitian(rng, d, rng.uniform(0.5, hnorm))
    H0 = random_hermitian(rng, d, rng.uniform(0.5, hnorm))
    lam, eta = rng.uniform(-span, span, 2)
    return DisturbedModel.build(HI, H0, lam, eta)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
