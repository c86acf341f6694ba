"""Closed-form quantum Fisher information for a disturbed unitary family.

The state is rho_lambda = U rho0 U^dagger with U = exp(-i (lambda H_I + eta H_0)).
Everything reduces to the average Hamiltonian

    Hbar_I = int_0^1 exp(iHt) H_I exp(-iHt) dt,

which in the eigenbasis of H is H_I filtered entrywise by
phi(e_j - e_k) = (exp(i D) - 1) / (i D).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import eig_hermitian
from .model import (
    DensityMatrix,
    DisturbedModel,
    HermitianOperator,
    Method,
    QfiReport,
    ValidationError,
    validate_density,
    validate_hermitian,
)

__all__ = [
    "AverageHamiltonian",
    "ContractionCheck",
    "spectral_filter",
    "average_hamiltonian",
    "qfi_mixed",
    "qfi_pure",
    "qfi_max",
    "spectral_width",
    "spectral_width_contraction_check",
]

TAYLOR_THRESHOLD = 1e-6
PAIR_CUTOFF = 1e-12


@dataclass(frozen=True)
class AverageHamiltonian:
    operator: HermitianOperator
    at: tuple[float, float]

    @property
    def matrix(self) -> np.ndarray:
        return self.operator.matrix

    @property
    def spectrum(self):
        return self.operator.spectrum


def spectral_filter(delta: np.ndarray) -> np.ndarray:
    """phi(D) = exp(iD/2) sinc(D/2) = int_0^1 exp(iDt) dt, elementwise."""
    delta = np.asarray(delta, dtype=np.float64)
    small = np.abs(delta) < TAYLOR_THRESHOLD
    safe = np.where(small, 1.0, delta)
    exact = np.exp(0.5j * safe) * np.sin(0.5 * safe) / (0.5 * safe)
    taylor = 1.0 + 0.5j * delta - delta**2 / 6.0
    return np.where(small, taylor, exact)


def _as_matrix(H) -> np.ndarray:
    return np.asarray(getattr(H, "matrix", H))


def average_hamiltonian(model: DisturbedModel, which: str = "I") -> AverageHamiltonian:
    """Interaction-picture time average of H_I (``which="I"``) or H_0 (``which="0"``)."""
    if which in ("I", "i"):
        target = model.H_I.matrix
    elif which in ("0", 0):
        target = model.H_0.matrix
    else:
        raise ValueError(f"which must be 'I' or '0', got {which!r}")
    return _average(model, target)


def _average(model: DisturbedModel, target: np.ndarray) -> AverageHamiltonian:
    S = model.hamiltonian.spectrum
    V = S.eigenvectors
    e = S.eigenvalues
    filt = spectral_filter(e[:, None] - e[None, :])
    T = V.conj().T @ target @ V
    Hbar = V @ (T * filt) @ V.conj().T
    return AverageHamiltonian(validate_hermitian(Hbar), (model.lam, model.eta))


def _pair_weights(rho0: DensityMatrix) -> np.ndarray:
    """(p_j - p_k)^2 / (p_j + p_k) over all ordered pairs, zero where p_j + p_k is negligible."""
    p = rho0.eigenvalues
    s = p[:, None] + p[None, :]
    d = p[:, None] - p[None, :]
    keep = s > PAIR_CUTOFF
    return np.where(keep, d**2 / np.where(keep, s, 1.0), 0.0)


def _check_dims(rho0: DensityMatrix, H) -> None:
    if rho0.dim != _as_matrix(H).shape[0]:
        raise ValidationError(
            f"dimension mismatch: state is {rho0.dim}-dimensional, generator is "
            f"{_as_matrix(H).shape[0]}-dimensional"
        )


def qfi_mixed(rho0: DensityMatrix, Hbar) -> float:
    """QFI of the family generated by ``Hbar`` on the (possibly mixed) probe ``rho0``.

    4 sum_{j<k} (p_j - p_k)^2 / (p_j + p_k) |<j|Hbar|k>|^2 in the eigenbasis of rho0.
    Pairs with p_j + p_k <= 1e-12 contribute nothing.
    """
    _check_dims(rho0, Hbar)
    V = rho0.eigenvectors
    T = V.conj().T @ _as_matrix(Hbar) @ V
    w = _pair_weights(rho0)
    # symmetric in (j, k): the full double sum counts each unordered pair twice
    return float(2.0 * np.sum(w * np.abs(T) ** 2))


def qfi_pure(phi0: DensityMatrix, Hbar) -> float:
    """4 Var(Hbar) on a pure probe."""
    _check_dims(phi0, Hbar)
    if not phi0.is_pure():
        raise ValidationError(
            f"probe is not pure (largest eigenvalue {phi0.eigenvalues[-1]:.12g})"
        )
    psi = phi0.eigenvectors[:, -1]
    H = _as_matrix(Hbar)
    Hpsi = H @ psi
    mean = float(np.real(np.vdot(psi, Hpsi)))
    second = float(np.real(np.vdot(Hpsi, Hpsi)))
    return max(4.0 * (second - mean**2), 0.0)


def spectral_width(H) -> float:
    e = getattr(H, "spectrum", None)
    e = (e if e is not None else eig_hermitian(H)).eigenvalues
    return float(e[-1] - e[0])


def optimal_probe(Hbar) -> DensityMatrix:
    """Projector on (|h_max> + |h_min>)/sqrt(2), first vector of each extremal eigenspace."""
    S = getattr(Hbar, "spectrum", None) or eig_hermitian(Hbar)
    e = S.eigenvalues
    V = S.eigenvectors
    tol = 1e-10 * max(1.0, float(np.max(np.abs(e))))
    lo = 0
    hi = int(np.flatnonzero(e >= e[-1] - tol)[0])
    if e[-1] - e[0] <= tol:
        # flat spectrum: every state is optimal (and useless); pick the first basis vector
        psi = V[:, 0]
    else:
        psi = (V[:, hi] + V[:, lo]) / np.sqrt(2.0)
    return DensityMatrix.from_vector(psi)


def qfi_max(model: DisturbedModel, nu: int | None = None) -> QfiReport:
    """Best QFI over all probes: the squared spectral width of Hbar_I, plus its optimal probe."""
    Hbar = average_hamiltonian(model, "I")
    width = spectral_width(Hbar.operator)
    best = optimal_probe(Hbar.operator)
    return QfiReport(
        qfi=qfi_mixed(best, Hbar.matrix),
        method=Method.closed_form,
        qfi_max=width**2,
        optimal_state=best,
        spectral_width=width,
        nu=nu,
    )


def qfi_report(rho0: DensityMatrix, model: DisturbedModel, nu: int | None = None) -> QfiReport:
    """QFI of a given probe, alongside the optimum for the same model."""
    Hbar = average_hamiltonian(model, "I")
    width = spectral_width(Hbar.operator)
    return QfiReport(
        qfi=qfi_mixed(rho0, Hbar.matrix),
        method=Method.closed_form,
        qfi_max=width**2,
        spectral_width=width,
        nu=nu,
    )


@dataclass(frozen=True)
class ContractionCheck:
    ok: bool
    max_margin: float
    min_margin: float
    partial_sum_margins: np.ndarray
    trace_difference: float

    @property
    def worst_margin(self) -> float:
        return float(min(self.max_margin, self.min_margin, np.min(self.partial_sum_margins)))


def spectral_width_contraction_check(model: DisturbedModel, tol: float = 1e-9) -> ContractionCheck:
    """Compare the spectrum of Hbar_I with that of H_I.

    Margins are oriented so that a non-negative value means the contraction
    (or majorization) inequality holds: h_max - hbar_max, hbar_min - h_min,
    and for every k the k largest eigenvalues of H_I summed minus the same
    for Hbar_I. Violations are reported, not raised.
    """
    h = model.H_I.spectrum.eigenvalues
    hbar = average_hamiltonian(model, "I").spectrum.eigenvalues
    top_h = np.cumsum(h[::-1])
    top_hbar = np.cumsum(hbar[::-1])
    partial = (top_h - top_hbar)[:-1]
    trace_diff = float(top_h[-1] - top_hbar[-1])
    max_margin = float(h[-1] - hbar[-1])
    min_margin = float(hbar[0] - h[0])
    ok = (
        max_margin >= -tol
        and min_margin >= -tol
        and bool(np.all(partial >= -tol))
        and abs(trace_diff) <= tol
    )
    return ContractionCheck(ok, max_margin, min_margin, partial, trace_diff)
