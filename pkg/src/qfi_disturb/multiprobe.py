"""N identical probes with local generators and local disturbance."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import DisturbedModel, HermitianOperator, ValidationError, validate_hermitian
from .qfi_core import average_hamiltonian, qfi_max, spectral_width

__all__ = [
    "MAX_COMPOSITE_DIM",
    "ProbeEnsemble",
    "ScalingCheck",
    "kron_sum",
    "build_collective",
    "heisenberg_scaling_check",
    "coupled_scaling",
]

MAX_COMPOSITE_DIM = 256
RATIO_RTOL = 1e-8


def kron_sum(local: np.ndarray, n: int) -> np.ndarray:
    """sum_j I x ... x local (slot j) x ... x I over n copies."""
    d = local.shape[0]
    total = np.zeros((d**n, d**n), dtype=np.complex128)
    for j in range(n):
        left = np.eye(d**j)
        right = np.eye(d ** (n - j - 1))
        total += np.kron(np.kron(left, local), right)
    return total


@dataclass(frozen=True)
class ProbeEnsemble:
    """``n`` copies of one local pair (H_I, H_0); heterogeneous probes are not representable."""

    n: int
    local_H_I: HermitianOperator
    local_H_0: HermitianOperator

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"need at least one probe, got n={self.n}")
        if self.local_H_I.dim != self.local_H_0.dim:
            raise ValidationError("local H_I and H_0 dimensions differ")
        if self.composite_dim > MAX_COMPOSITE_DIM:
            raise ValidationError(
                f"composite dimension {self.local_H_I.dim}^{self.n} = {self.composite_dim} "
                f"exceeds the cap of {MAX_COMPOSITE_DIM}"
            )

    @classmethod
    def from_model(cls, model: DisturbedModel, n: int) -> "ProbeEnsemble":
        return cls(n, model.H_I, model.H_0)

    @property
    def local_dim(self) -> int:
        return self.local_H_I.dim

    @property
    def composite_dim(self) -> int:
        return self.local_dim**self.n


def build_collective(pe: ProbeEnsemble) -> tuple[HermitianOperator, HermitianOperator]:
    if pe.n == 1:
        return pe.local_H_I, pe.local_H_0
    return (
        validate_hermitian(kron_sum(pe.local_H_I.matrix, pe.n)),
        validate_hermitian(kron_sum(pe.local_H_0.matrix, pe.n)),
    )


@dataclass(frozen=True)
class ScalingCheck:
    n: int
    q_n: float
    q_1: float
    asserted: bool = True

    @property
    def ratio(self) -> float:
        return self.q_n / self.q_1 if self.q_1 > 0 else float("nan")

    @property
    def expected(self) -> int:
        return self.n**2

    @property
    def ok(self) -> Optional[bool]:
        if not self.asserted:
            return None
        if self.q_1 == 0:
            return self.q_n == 0
        return abs(self.ratio - self.expected) <= RATIO_RTOL * self.expected

    def to_json(self) -> dict:
        ratio = self.ratio
        return {
            "n": self.n,
            "q_n": self.q_n,
            "q_1": self.q_1,
            "ratio": None if ratio != ratio else ratio,
            "expected": self.expected,
            "asserted": self.asserted,
            "ok": self.ok,
        }


def heisenberg_scaling_check(pe: ProbeEnsemble, lam: float, eta: float) -> ScalingCheck:
    """Optimal QFI of the collective pair against the single-probe optimum (expected n^2)."""
    HI_n, H0_n = build_collective(pe)
    q_n = qfi_max(DisturbedModel(HI_n, H0_n, lam, eta)).qfi_max
    q_1 = qfi_max(DisturbedModel(pe.local_H_I, pe.local_H_0, lam, eta)).qfi_max
    return ScalingCheck(pe.n, q_n, q_1)


def collective_width(pe: ProbeEnsemble, lam: float, eta: float) -> tuple[float, float]:
    """Spectral widths of the collective and of the single-probe average Hamiltonian."""
    HI_n, H0_n = build_collective(pe)
    wide = average_hamiltonian(DisturbedModel(HI_n, H0_n, lam, eta), "I").operator
    local = average_hamiltonian(DisturbedModel(pe.local_H_I, pe.local_H_0, lam, eta), "I").operator
    return spectral_width(wide), spectral_width(local)


def coupled_scaling(pe: ProbeEnsemble, coupled_H0, lam: float, eta: float) -> ScalingCheck:
    """Ratio for a user-supplied (possibly non-local) collective H_0; reported, never asserted."""
    HI_n, _ = build_collective(pe)
    H0_n = coupled_H0 if isinstance(coupled_H0, HermitianOperator) else validate_hermitian(coupled_H0)
    if H0_n.dim != HI_n.dim:
        raise ValidationError(
            f"coupled H_0 has dimension {H0_n.dim}, expected {HI_n.dim} for n={pe.n}"
        )
    q_n = qfi_max(DisturbedModel(HI_n, H0_n, lam, eta)).qfi_max
    q_1 = qfi_max(DisturbedModel(pe.local_H_I, pe.local_H_0, lam, eta)).qfi_max
    return ScalingCheck(pe.n, q_n, q_1, asserted=False)
