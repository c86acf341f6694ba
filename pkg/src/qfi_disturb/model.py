"""Validated operators, states, the disturbed model, and their JSON forms.

Matrices travel as ``{"dim": d, "re": [[...]], "im": [[...]]}`` (row-major).
A model file is ``{"H_I": <matrix>, "H_0": <matrix or null>, "lambda": x, "eta": y}``;
``H_0: null`` pins eta to zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Optional

import numpy as np

from .linalg import SpectralDecomposition, eig_hermitian

__all__ = [
    "ValidationError",
    "SchemaError",
    "HermitianOperator",
    "DensityMatrix",
    "DisturbedModel",
    "Method",
    "QfiReport",
    "validate_hermitian",
    "validate_density",
    "hamiltonian_at",
    "crlb",
    "matrix_to_json",
    "matrix_from_json",
    "model_to_json",
    "model_from_json",
]

HERMITIAN_RTOL = 1e-10
TRACE_ACCEPT = 1e-10
TRACE_REJECT = 1e-8
EIGEN_REJECT = 1e-8


class ValidationError(ValueError):
    """Input is well formed but violates a physical constraint."""

    def __init__(self, message: str, deviation: float | None = None):
        super().__init__(message)
        self.deviation = deviation


class SchemaError(ValueError):
    """Input does not follow the JSON layout; ``where`` names the offending field."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


def _as_square(M) -> np.ndarray:
    A = np.array(M, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValidationError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError("matrix has non-finite entries")
    return A


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def spectrum(self) -> SpectralDecomposition:
        return eig_hermitian(self.matrix)

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(_frozen(self.matrix + other.matrix))

    def scaled(self, c: float) -> "HermitianOperator":
        return HermitianOperator(_frozen(c * self.matrix))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    spectrum: SpectralDecomposition = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.spectrum.eigenvectors

    @property
    def rank(self) -> int:
        return int(np.sum(self.eigenvalues > TRACE_ACCEPT))

    def is_pure(self, tol: float = 1e-10) -> bool:
        return abs(self.eigenvalues[-1] - 1.0) <= tol

    @classmethod
    def from_vector(cls, psi) -> "DensityMatrix":
        v = np.asarray(psi, dtype=np.complex128).ravel()
        v = v / np.linalg.norm(v)
        return validate_density(np.outer(v, v.conj()))


def _frozen(A: np.ndarray) -> np.ndarray:
    A = np.array(A, dtype=np.complex128)
    A.setflags(write=False)
    return A


def validate_hermitian(M) -> HermitianOperator:
    """Accept ``M`` as a Hermitian operator, symmetrizing away roundoff.

    Raises ValidationError (with ``deviation`` set) when
    max|M - M^dagger| exceeds 1e-10 (1 + max|M|).
    """
    A = _as_square(M)
    dev = float(np.max(np.abs(A - A.conj().T)))
    scale = float(np.max(np.abs(A)))
    if dev > HERMITIAN_RTOL * (1.0 + scale):
        raise ValidationError(f"matrix is not Hermitian (max deviation {dev:.3e})", dev)
    return HermitianOperator(_frozen(0.5 * (A + A.conj().T)))


def validate_density(M) -> DensityMatrix:
    """Accept ``M`` as a density matrix.

    Trace deviations up to 1e-8 are renormalized and eigenvalues down to -1e-8
    are clipped to zero; anything worse raises ValidationError.
    """
    H = validate_hermitian(M)
    A = np.array(H.matrix)
    tr = float(np.trace(A).real)
    if abs(tr - 1.0) > TRACE_REJECT:
        raise ValidationError(f"trace is {tr:.12g}, expected 1", abs(tr - 1.0))
    spec = eig_hermitian(A)
    lo = float(spec.eigenvalues[0])
    if lo < -EIGEN_REJECT:
        raise ValidationError(f"matrix has negative eigenvalue {lo:.3e}", -lo)
    vals = np.clip(np.array(spec.eigenvalues), 0.0, None)
    vals = vals / vals.sum()
    V = np.array(spec.eigenvectors)
    if np.any(vals != spec.eigenvalues):
        A = (V * vals) @ V.conj().T
        A = 0.5 * (A + A.conj().T)
    vals.setflags(write=False)
    V.setflags(write=False)
    return DensityMatrix(_frozen(A), SpectralDecomposition(vals, V))


def maximally_mixed(d: int) -> DensityMatrix:
    return validate_density(np.eye(d) / d)


@dataclass(frozen=True, eq=False)
class DisturbedModel:
    """Generator pair (H_I, H_0) evaluated at the parameter point (lambda, eta)."""

    H_I: HermitianOperator
    H_0: HermitianOperator
    lam: float
    eta: float

    def __post_init__(self):
        if self.H_I.dim != self.H_0.dim:
            raise ValidationError(
                f"H_I and H_0 dimensions differ ({self.H_I.dim} vs {self.H_0.dim})"
            )

    @classmethod
    def build(cls, H_I, H_0=None, lam: float = 0.0, eta: float = 0.0) -> "DisturbedModel":
        HI = H_I if isinstance(H_I, HermitianOperator) else validate_hermitian(H_I)
        if H_0 is None:
            return cls(HI, HermitianOperator(_frozen(np.zeros_like(HI.matrix))), float(lam), 0.0)
        H0 = H_0 if isinstance(H_0, HermitianOperator) else validate_hermitian(H_0)
        return cls(HI, H0, float(lam), float(eta))

    @property
    def dim(self) -> int:
        return self.H_I.dim

    def at(self, lam: float | None = None, eta: float | None = None) -> "DisturbedModel":
        return DisturbedModel(
            self.H_I,
            self.H_0,
            self.lam if lam is None else float(lam),
            self.eta if eta is None else float(eta),
        )

    @cached_property
    def hamiltonian(self) -> HermitianOperator:
        return hamiltonian_at(self)


def hamiltonian_at(model: DisturbedModel) -> HermitianOperator:
    """lambda H_I + eta H_0."""
    return HermitianOperator(_frozen(model.lam * model.H_I.matrix + model.eta * model.H_0.matrix))


class Method(str, enum.Enum):
    closed_form = "closed_form"
    oracle = "oracle"


def crlb(qfi: float, nu: int) -> float:
    """Cramer-Rao lower bound on the RMSE after ``nu`` repetitions."""
    if qfi < 0 or nu < 1:
        raise ValueError(f"need qfi >= 0 and nu >= 1, got qfi={qfi}, nu={nu}")
    if qfi == 0:
        return math.inf
    return 1.0 / math.sqrt(nu * qfi)


@dataclass(frozen=True)
class QfiReport:
    qfi: float
    method: Method = Method.closed_form
    qfi_max: Optional[float] = None
    optimal_state: Optional[DensityMatrix] = None
    spectral_width: Optional[float] = None
    nu: Optional[int] = None

    def __post_init__(self):
        if self.qfi < 0:
            raise ValueError(f"qfi must be non-negative, got {self.qfi}")

    @property
    def crlb(self) -> Optional[float]:
        return None if self.nu is None else crlb(self.qfi, self.nu)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"qfi": self.qfi}
        if self.qfi_max is not None:
            out["qfi_max"] = self.qfi_max
        if self.spectral_width is not None:
            out["spectral_width"] = self.spectral_width
        if self.nu is not None:
            bound = self.crlb
            out["nu"] = self.nu
            # +inf has no JSON literal
            out["crlb"] = None if math.isinf(bound) else bound
        if self.optimal_state is not None:
            out["optimal_state"] = matrix_to_json(self.optimal_state.matrix)
        out["method"] = self.method.value
        return out


# ---------------------------------------------------------------- JSON forms


def matrix_to_json(M) -> dict[str, Any]:
    A = np.asarray(getattr(M, "matrix", M), dtype=np.complex128)
    return {
        "dim": int(A.shape[0]),
        "re": [[float(x) for x in row] for row in A.real],
        "im": [[float(x) for x in row] for row in A.imag],
    }


def _real_grid(obj, d: int, where: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != d:
        raise SchemaError(f"expected a list of {d} rows", where)
    rows = []
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != d:
            raise SchemaError(f"expected {d} entries", f"{where}[{i}]")
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
                raise SchemaError(f"expected a finite number, got {x!r}", f"{where}[{i}][{j}]")
        rows.append(row)
    return np.array(rows, dtype=np.float64)


def matrix_from_json(obj, where: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise SchemaError("expected an object with dim/re/im", where)
    for key in ("dim", "re", "im"):
        if key not in obj:
            raise SchemaError(f"missing field {key!r}", where)
    d = obj["dim"]
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise SchemaError(f"dim must be a positive integer, got {d!r}", f"{where}.dim")
    re = _real_grid(obj["re"], d, f"{where}.re")
    im = _real_grid(obj["im"], d, f"{where}.im")
    return re + 1j * im


def _number(obj, key: str) -> float:
    if key not in obj:
        raise SchemaError(f"missing field {key!r}", "model")
    x = obj[key]
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise SchemaError(f"expected a finite number, got {x!r}", f"model.{key}")
    return float(x)


def model_from_json(obj) -> DisturbedModel:
    """Parse a model document; SchemaError on layout problems, ValidationError on physics."""
    if not isinstance(obj, dict):
        raise SchemaError("expected a JSON object", "model")
    if "H_I" not in obj:
        raise SchemaError("missing field 'H_I'", "model")
    HI = matrix_from_json(obj["H_I"], "model.H_I")
    lam = _number(obj, "lambda")
    H0_obj = obj.get("H_0")
    if H0_obj is None:
        # no disturbance operator: eta is ignored
        return DisturbedModel.build(HI, None, lam)
    H0 = matrix_from_json(H0_obj, "model.H_0")
    eta = _number(obj, "eta")
    if H0.shape != HI.shape:
        raise ValidationError(f"H_I and H_0 dimensions differ ({HI.shape[0]} vs {H0.shape[0]})")
    return DisturbedModel.build(HI, H0, lam, eta)


def model_to_json(model: DisturbedModel, *, null_h0: bool = False) -> dict[str, Any]:
    return {
        "H_I": matrix_to_json(model.H_I.matrix),
        "H_0": None if null_h0 else matrix_to_json(model.H_0.matrix),
        "lambda": model.lam,
        "eta": model.eta,
    }
