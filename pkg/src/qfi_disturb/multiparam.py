"""Two-parameter QFI matrix for (lambda, eta).

The off-diagonal entry is available two ways: directly, as the real part of
the mixed bilinear form of Hbar_I and Hbar_0, and through the rotated
coordinates mu1 = (lambda + eta)/sqrt(2), mu2 = (lambda - eta)/sqrt(2),
where Q_le = Q~_{mu1 mu1} - (Q_ll + Q_ee)/2.

Larger parameter sets follow the same recipe: for each pair (j, k), rotate
to (lambda_j + lambda_k)/sqrt(2) and subtract half the two diagonal entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import DensityMatrix, DisturbedModel
from .qfi_core import _check_dims, _pair_weights, average_hamiltonian, qfi_mixed

__all__ = ["QfiMatrix2", "qfi_matrix", "offdiag_via_reparam", "SINGULAR_DET"]

SINGULAR_DET = 1e-12


@dataclass(frozen=True)
class QfiMatrix2:
    q_ll: float
    q_ee: float
    q_le: float

    def as_array(self) -> np.ndarray:
        return np.array([[self.q_ll, self.q_le], [self.q_le, self.q_ee]])

    @property
    def det(self) -> float:
        return self.q_ll * self.q_ee - self.q_le**2

    @property
    def singular(self) -> bool:
        # relative to the scale of the entries; an absolute cut misfires for large QFIs
        return self.det <= SINGULAR_DET * max(1.0, self.q_ll * self.q_ee)

    def is_psd(self, tol: float = 1e-9) -> bool:
        return (
            self.q_ll >= -tol
            and self.q_ee >= -tol
            and self.det >= -tol * (1.0 + self.q_ll * self.q_ee)
        )

    def inverse(self) -> Optional[np.ndarray]:
        """Q^{-1}, the covariance bound for nu = 1; None when singular."""
        if self.singular:
            return None
        return np.array([[self.q_ee, -self.q_le], [-self.q_le, self.q_ll]]) / self.det

    def to_json(self) -> dict:
        inv = self.inverse()
        return {
            "q_ll": self.q_ll,
            "q_ee": self.q_ee,
            "q_le": self.q_le,
            "det": self.det,
            "singular": self.singular,
            "inverse": None if inv is None else [[float(x) for x in row] for row in inv],
        }


def _cross_term(rho0: DensityMatrix, A: np.ndarray, B: np.ndarray) -> float:
    V = rho0.eigenvectors
    TA = V.conj().T @ A @ V
    TB = V.conj().T @ B @ V
    w = _pair_weights(rho0)
    # <j|A|k><k|B|j> = TA[j,k] * TB[k,j]
    return float(2.0 * np.sum(w * np.real(TA * TB.T)))


def qfi_matrix(rho0: DensityMatrix, model: DisturbedModel) -> QfiMatrix2:
    """Full 2x2 QFI matrix, off-diagonal by the direct bilinear formula."""
    _check_dims(rho0, model.H_I.matrix)
    A = average_hamiltonian(model, "I").matrix
    B = average_hamiltonian(model, "0").matrix
    return QfiMatrix2(
        q_ll=qfi_mixed(rho0, A),
        q_ee=qfi_mixed(rho0, B),
        q_le=_cross_term(rho0, A, B),
    )


def offdiag_via_reparam(rho0: DensityMatrix, model: DisturbedModel) -> float:
    """Off-diagonal entry from the QFI of mu1 = (lambda + eta)/sqrt(2)."""
    _check_dims(rho0, model.H_I.matrix)
    A = average_hamiltonian(model, "I").matrix
    B = average_hamiltonian(model, "0").matrix
    # averaging is linear in the integrand, so the mu1 generator averages to (A + B)/sqrt(2)
    q_mu1 = qfi_mixed(rho0, (A + B) / math.sqrt(2.0))
    return q_mu1 - 0.5 * (qfi_mixed(rho0, A) + qfi_mixed(rho0, B))
