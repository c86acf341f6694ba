"""Dense complex linear algebra for small Hermitian problems.

Eigendecomposition is done by cyclic complex Jacobi rotations for the
dimensions this package cares about (d <= 64). Larger operators, which only
appear in N-probe constructions, go through LAPACK with the same ordering
and phase conventions applied afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "EigensolverError",
    "SpectralDecomposition",
    "jacobi_eigh",
    "eig_hermitian",
    "matrix_function",
    "psd_sqrt",
    "trace_norm",
    "uhlmann_fidelity",
    "fidelity_deficit",
]

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
JACOBI_MAX_DIM = 64

# eigenvalues closer than this (relative to the spectral scale) share an eigenspace
DEGENERACY_RTOL = 1e-10


class EigensolverError(RuntimeError):
    """Raised when the Jacobi iteration fails to converge."""

    def __init__(self, dim: int, sweeps: int, off_norm: float):
        self.dim = dim
        self.sweeps = sweeps
        self.off_norm = off_norm
        super().__init__(
            f"Jacobi eigensolver did not converge for a {dim}x{dim} matrix "
            f"after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})"
        )


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in ascending order and the matching unitary of eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


def _off_norm(A: np.ndarray) -> float:
    # summed directly; ||A||^2 - ||diag A||^2 cancels catastrophically near convergence
    off = A - np.diag(np.diag(A))
    return float(np.linalg.norm(off))


def jacobi_eigh(H: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Returns the (unsorted) eigenvalues and a unitary whose columns are the
    eigenvectors. Iteration stops once the off-diagonal Frobenius norm drops
    below ``tol * ||H||_F``.

    Raises:
        EigensolverError: if ``max_sweeps`` sweeps do not reach the threshold.
    """
    A = np.array(H, dtype=np.complex128, copy=True)
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(A)
    if n == 1 or scale == 0.0:
        return np.real(np.diag(A)).copy(), V
    threshold = tol * scale

    sweeps = 0
    off = _off_norm(A)
    while off > threshold:
        if sweeps >= max_sweeps:
            raise EigensolverError(n, sweeps, off)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                app = A[p, p].real
                aqq = A[q, q].real
                phase = apq / r
                tau = (aqq - app) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # G acts on columns p, q: [[c, s*phase], [-s*conj(phase), c]]
                sp = s * phase
                col_p = A[:, p].copy()
                col_q = A[:, q]
                A[:, p] = c * col_p - np.conj(sp) * col_q
                A[:, q] = sp * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :]
                A[p, :] = c * row_p - sp * row_q
                A[q, :] = np.conj(sp) * row_p + c * row_q
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                vp = V[:, p].copy()
                vq = V[:, q]
                V[:, p] = c * vp - np.conj(sp) * vq
                V[:, q] = sp * vp + c * vq
        sweeps += 1
        off = _off_norm(A)
    return np.real(np.diag(A)).copy(), V


def _canonical_basis(block: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(block columns).

    Standard basis vectors are projected onto the subspace in index order and
    Gram-Schmidt orthonormalized, so the result does not depend on which
    rotation inside the subspace the solver happened to return.
    """
    k = block.shape[1]
    if k == 1:
        return block
    n = block.shape[0]
    P = block @ block.conj().T
    basis: list[np.ndarray] = []
    for idx in range(n):
        v = P[:, idx].copy()
        for u in basis:
            v -= (u.conj() @ v) * u
        # re-orthogonalize once; cheap and keeps V^dagger V = I to roundoff
        for u in basis:
            v -= (u.conj() @ v) * u
        nv = np.linalg.norm(v)
        if nv > 1e-6:
            basis.append(v / nv)
            if len(basis) == k:
                break
    return np.column_stack(basis)


def _fix_phase(V: np.ndarray) -> np.ndarray:
    out = V.copy()
    for j in range(V.shape[1]):
        col = out[:, j]
        mags = np.abs(col)
        # first index attaining the max (up to roundoff) keeps ties deterministic
        idx = int(np.flatnonzero(mags >= mags.max() * (1 - 1e-12))[0])
        out[:, j] = col * (abs(col[idx]) / col[idx])
    return out


def eig_hermitian(H, *, method: str = "auto") -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix with deterministic eigenvectors.

    Eigenvalues come back ascending. Inside each (numerically) degenerate
    eigenspace the basis is canonicalized, and every eigenvector is rotated so
    that its largest-magnitude component is real and positive.

    ``H`` may be a raw array or anything exposing a ``matrix`` attribute.
    ``method`` is ``"jacobi"``, ``"lapack"`` or ``"auto"`` (Jacobi up to
    dimension 64).
    """
    M = np.asarray(getattr(H, "matrix", H), dtype=np.complex128)
    n = M.shape[0]
    if method == "auto":
        method = "jacobi" if n <= JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        w, V = jacobi_eigh(M)
    elif method == "lapack":
        w, V = np.linalg.eigh(M)
    else:
        raise ValueError(f"unknown eigensolver method {method!r}")

    order = np.argsort(w, kind="stable")
    w = w[order]
    V = V[:, order]

    spread = max(1.0, float(np.max(np.abs(w))))
    tol = DEGENERACY_RTOL * spread
    start = 0
    for stop in range(1, n + 1):
        if stop == n or w[stop] - w[stop - 1] > tol:
            if stop - start > 1:
                V[:, start:stop] = _canonical_basis(V[:, start:stop])
            start = stop
    V = _fix_phase(V)
    w.setflags(write=False)
    V.setflags(write=False)
    return SpectralDecomposition(w, V)


def matrix_function(S: SpectralDecomposition, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Return V diag(f(e)) V^dagger; ``f`` is applied to the eigenvalue vector."""
    V = S.eigenvectors
    vals = np.asarray(f(np.asarray(S.eigenvalues)), dtype=np.complex128)
    return (V * vals) @ V.conj().T


def psd_sqrt(S: SpectralDecomposition) -> np.ndarray:
    """Square root of a positive semidefinite matrix; negative eigenvalue dust is clipped to 0."""
    return matrix_function(S, lambda e: np.sqrt(np.clip(e, 0.0, None)))


def trace_norm(M: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(M, compute_uv=False)))


def _spectrum(rho) -> SpectralDecomposition:
    spec = getattr(rho, "spectrum", None)
    if spec is not None:
        return spec
    return eig_hermitian(rho)


def _matrix(rho) -> np.ndarray:
    return np.asarray(getattr(rho, "matrix", rho))


def uhlmann_fidelity(rho, sigma) -> float:
    """Root fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)) of two density matrices.

    Evaluated as the trace norm of sqrt(rho) sqrt(sigma), which has the same
    value and is symmetric in its arguments by construction.
    """
    if _matrix(rho).shape != _matrix(sigma).shape:
        raise ValueError(
            f"dimension mismatch: {_matrix(rho).shape[0]} vs {_matrix(sigma).shape[0]}"
        )
    F = trace_norm(psd_sqrt(_spectrum(rho)) @ psd_sqrt(_spectrum(sigma)))
    return min(max(F, 0.0), 1.0)


def fidelity_deficit(sqrt_rho: np.ndarray, sqrt_sigma: np.ndarray) -> float:
    """1 - F from precomputed square roots.

    The deficit is accumulated as sum(p_k - s_k), with p the (descending)
    weights of the first state and s the singular values of the product,
    instead of subtracting the summed fidelity from 1. This keeps the small
    difference free of the trace error of the inputs.
    """
    s = np.linalg.svd(sqrt_rho @ sqrt_sigma, compute_uv=False)
    p = np.sort(np.linalg.svd(sqrt_rho, compute_uv=False) ** 2)[::-1]
    q = np.sort(np.linalg.svd(sqrt_sigma, compute_uv=False) ** 2)[::-1]
    return float(np.sum(0.5 * (p + q) - s))
