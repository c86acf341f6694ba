"""Numerical cross-checks that share no code path with the closed forms.

- ``qfi_fd``: QFI from the Bures fidelity of two nearby states, with one
  Richardson step.
- ``average_hamiltonian_quadrature``: composite Simpson rule on the
  interaction-picture integral.
- ``first_order_factorization_check``: residual of
  U(lambda + dl) ~ U(lambda) exp(-i dl Hbar_I).
"""

from __future__ import annotations

import logging

import numpy as np

from .linalg import fidelity_deficit, matrix_function
from .model import DensityMatrix, DisturbedModel, validate_hermitian
from .qfi_core import AverageHamiltonian, average_hamiltonian

__all__ = [
    "DEFAULT_DL",
    "propagator",
    "qfi_fd",
    "average_hamiltonian_quadrature",
    "first_order_factorization_check",
]

log = logging.getLogger(__name__)

DEFAULT_DL = 1e-3
MAX_DL = 1e-2


def propagator(model: DisturbedModel, t: float = 1.0) -> np.ndarray:
    """exp(-i t H(lambda, eta)) by spectral calculus."""
    return matrix_function(model.hamiltonian.spectrum, lambda e: np.exp(-1j * t * e))


def _qfi_at_step(sqrt_rho0: np.ndarray, model: DisturbedModel, h: float) -> float:
    # states at lambda -/+ h/2: the one-sided pair would be biased by dQ/dlambda * h/2
    lo = propagator(model.at(lam=model.lam - 0.5 * h))
    hi = propagator(model.at(lam=model.lam + 0.5 * h))
    # sqrt(U rho U^dagger) = U sqrt(rho) U^dagger keeps exact zeros of rank-deficient probes
    s_lo = lo @ sqrt_rho0 @ lo.conj().T
    s_hi = hi @ sqrt_rho0 @ hi.conj().T
    return 8.0 * fidelity_deficit(s_lo, s_hi) / h**2


def qfi_fd(rho0: DensityMatrix, model: DisturbedModel, dl: float = DEFAULT_DL) -> float:
    """Finite-difference QFI, 8 (1 - F) / dl^2, Richardson-extrapolated from dl and dl/2.

    Steps outside (0, 1e-2] are allowed but logged as a warning.
    """
    if not dl > 0:
        raise ValueError(f"dl must be positive, got {dl}")
    if dl > MAX_DL:
        log.warning("dl=%g is outside the recommended range (0, %g]", dl, MAX_DL)
    V = rho0.eigenvectors
    sqrt_rho0 = (V * np.sqrt(np.clip(rho0.eigenvalues, 0.0, None))) @ V.conj().T
    q_coarse = _qfi_at_step(sqrt_rho0, model, dl)
    q_fine = _qfi_at_step(sqrt_rho0, model, 0.5 * dl)
    return max((4.0 * q_fine - q_coarse) / 3.0, 0.0)


def _simpson_weights(panels: int) -> np.ndarray:
    w = np.ones(panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / (3.0 * panels)


def average_hamiltonian_quadrature(
    model: DisturbedModel, panels: int = 10_000, which: str = "I"
) -> AverageHamiltonian:
    """Simpson-rule estimate of int_0^1 exp(iHt) H_X exp(-iHt) dt.

    Each node uses a propagator built directly at time t; no filter formula
    is involved.
    """
    if panels < 2 or panels % 2:
        raise ValueError(f"panels must be an even integer >= 2, got {panels}")
    target = model.H_I.matrix if which in ("I", "i") else model.H_0.matrix
    S = model.hamiltonian.spectrum
    V = S.eigenvectors
    e = S.eigenvalues
    T = V.conj().T @ target @ V
    ts = np.linspace(0.0, 1.0, panels + 1)
    w = _simpson_weights(panels)
    # exp(iHt) T exp(-iHt) in the eigenbasis is T_jk exp(i e_j t) exp(-i e_k t);
    # the weighted node sum factorizes into one (d x nodes) @ (nodes x d) product
    phases = np.exp(1j * np.outer(ts, e))  # (nodes, d)
    kernel = (phases * w[:, None]).T @ phases.conj()
    Hbar = V @ (T * kernel) @ V.conj().T
    return AverageHamiltonian(validate_hermitian(Hbar), (model.lam, model.eta))


def first_order_factorization_check(model: DisturbedModel, dl: float = 1e-3) -> float:
    """max-abs residual of U(lambda+dl) - U(lambda) exp(-i dl Hbar_I)."""
    U = propagator(model)
    U_next = propagator(model.at(lam=model.lam + dl))
    Hbar = average_hamiltonian(model, "I").operator
    step = matrix_function(Hbar.spectrum, lambda e: np.exp(-1j * dl * e))
    return float(np.max(np.abs(U_next - U @ step)))
