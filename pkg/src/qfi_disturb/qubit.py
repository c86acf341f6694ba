"""Single-qubit closed forms with H_I = a.sigma and H_0 = b.sigma.

For unit vectors a, b and n = lambda a + eta b, theta = |n|, the average
Hamiltonian is m.sigma with

    m = [1 + sinc 2theta] a / 2 - eta (b x a) sinc^2 theta
        + (1 - sinc 2theta) / (2 theta^2) [(n.a) n - eta (b x a) x n]

and the best achievable QFI is 4 |m|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "BlochModel",
    "SweepResult",
    "Interval",
    "PAULI",
    "bloch_decompose",
    "bloch_operator",
    "m_vector",
    "qmax_qubit",
    "golden_section",
    "sweep",
    "sweep_curve",
    "dithering_interval",
]

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)

THETA_TAYLOR = 1e-6
GOLDEN_TOL = 1e-10
BISECT_TOL = 1e-8
FLAT_TOL = 1e-12


def _unit(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64).reshape(3)
    norm = float(np.linalg.norm(v))
    if norm == 0.0 or not math.isfinite(norm):
        raise ValueError(f"{name} must be a finite non-zero 3-vector")
    return v / norm


@dataclass(frozen=True)
class BlochModel:
    a: np.ndarray
    b: np.ndarray
    lam: float = 0.0
    eta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", _unit(self.a, "a"))
        object.__setattr__(self, "b", _unit(self.b, "b"))
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "eta", float(self.eta))

    @classmethod
    def with_overlap(cls, overlap: float, lam: float = 0.0, eta: float = 0.0) -> "BlochModel":
        """a = z, b in the x-z plane with a.b = ``overlap``."""
        if not -1.0 <= overlap <= 1.0:
            raise ValueError(f"overlap must lie in [-1, 1], got {overlap}")
        b = [math.sqrt(max(0.0, 1.0 - overlap**2)), 0.0, overlap]
        return cls(np.array([0.0, 0.0, 1.0]), np.array(b), lam, eta)

    def at(self, lam: float, eta: Optional[float] = None) -> "BlochModel":
        return BlochModel(self.a, self.b, lam, self.eta if eta is None else eta)

    @property
    def n(self) -> np.ndarray:
        return self.lam * self.a + self.eta * self.b


def bloch_operator(v) -> np.ndarray:
    """v.sigma as a 2x2 matrix."""
    v = np.asarray(v, dtype=np.float64)
    return v[0] * PAULI[0] + v[1] * PAULI[1] + v[2] * PAULI[2]


def bloch_decompose(H) -> tuple[float, float, np.ndarray]:
    """Split a 2x2 Hermitian matrix as c0 I + r (u.sigma) with |u| = 1, r >= 0.

    When r is zero ``u`` is returned as the z axis.
    """
    M = np.asarray(getattr(H, "matrix", H), dtype=np.complex128)
    if M.shape != (2, 2):
        raise ValueError(f"expected a 2x2 operator, got shape {M.shape}")
    c0 = 0.5 * float(np.trace(M).real)
    v = np.array([0.5 * float(np.trace(M @ s).real) for s in PAULI])
    r = float(np.linalg.norm(v))
    if r == 0.0:
        return c0, 0.0, np.array([0.0, 0.0, 1.0])
    return c0, r, v / r


def _sinc(x: float) -> float:
    return math.sin(x) / x if x != 0.0 else 1.0


def m_vector(bm: BlochModel) -> np.ndarray:
    a, b, eta = bm.a, bm.b, bm.eta
    n = bm.n
    theta = float(np.linalg.norm(n))
    ba = np.cross(b, a)
    if theta < THETA_TAYLOR:
        sinc2 = 1.0 - 2.0 * theta**2 / 3.0
        ratio = 1.0 / 3.0
        sinc_sq = 1.0 - theta**2 / 3.0
    else:
        sinc2 = _sinc(2.0 * theta)
        ratio = (1.0 - sinc2) / (2.0 * theta**2)
        sinc_sq = _sinc(theta) ** 2
    return (
        0.5 * (1.0 + sinc2) * a
        - eta * sinc_sq * ba
        + ratio * (float(n @ a) * n - eta * np.cross(ba, n))
    )


def qmax_qubit(bm: BlochModel) -> float:
    m = m_vector(bm)
    return 4.0 * float(m @ m)


def golden_section(
    f: Callable[[float], float], lo: float, hi: float, tol: float = GOLDEN_TOL
) -> float:
    """Minimizer of a unimodal ``f`` on [lo, hi] to within ``tol`` (absolute, in x)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class SweepResult:
    grid: np.ndarray
    q_over_4: np.ndarray
    lambda_min_located: float
    q_at_min: float
    flat: bool = False


def sweep_curve(f: Callable[[float], float], grid: Sequence[float], values=None) -> SweepResult:
    """Tabulate ``f`` (already divided by 4) on ``grid`` and refine its global minimum.

    The minimum is seeded from the best grid point and polished by golden
    section between its neighbours. A curve whose spread is below 1e-12 is
    flagged flat and its minimum reported at the grid start.
    """
    g = np.asarray(grid, dtype=np.float64)
    if g.ndim != 1 or g.size < 2:
        raise ValueError("grid needs at least 2 points")
    if np.any(np.diff(g) <= 0):
        raise ValueError("grid must be strictly ascending")
    q = np.array([f(x) for x in g]) if values is None else np.asarray(values, dtype=np.float64)
    if float(q.max() - q.min()) <= FLAT_TOL:
        return SweepResult(g, q, float(g[0]), float(q[0]), flat=True)
    i = int(np.argmin(q))
    lo = g[max(i - 1, 0)]
    hi = g[min(i + 1, g.size - 1)]
    x = golden_section(f, lo, hi)
    fx = f(x)
    if fx > q[i]:
        x, fx = float(g[i]), float(q[i])
    return SweepResult(g, q, float(x), float(fx))


def sweep(a, b, eta: float, lambda_grid: Sequence[float]) -> SweepResult:
    """|m|^2 along ``lambda_grid`` at fixed eta, with the located minimum."""
    base = BlochModel(a, b, 0.0, eta)
    return sweep_curve(lambda lam: qmax_qubit(base.at(lam)) / 4.0, lambda_grid)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def subgrid(self, points: int) -> np.ndarray:
        """``points`` strictly interior, evenly spaced abscissae."""
        return np.linspace(self.lo, self.hi, points + 2)[1:-1]


def _bisect_root(f: Callable[[float], float], x_neg: float, x_pos: float, tol: float) -> float:
    """Sign change of ``f`` between a point where f < 0 and one where f >= 0."""
    while abs(x_pos - x_neg) > tol:
        mid = 0.5 * (x_neg + x_pos)
        if f(mid) < 0:
            x_neg = mid
        else:
            x_pos = mid
    return 0.5 * (x_neg + x_pos)


def dithering_interval(
    a, b, eta: float, eta_tilde: float, *, points: int = 4001, tol: float = BISECT_TOL
) -> Optional[Interval]:
    """lambda-interval where the stronger disturbance eta_tilde beats eta.

    Scans [-10(eta_tilde + 1), 10(eta_tilde + 1)] for the set where
    qmax(lambda; eta) < qmax(lambda; eta_tilde), takes the connected piece
    containing (or else nearest to) lambda = -eta a.b, and refines both ends
    by bisection. Returns None when the set is empty on the window.
    """
    if not eta_tilde > eta >= 0:
        raise ValueError(f"need eta_tilde > eta >= 0, got eta={eta}, eta_tilde={eta_tilde}")
    weak = BlochModel(a, b, 0.0, eta)
    strong = weak.at(0.0, eta_tilde)

    def diff(lam: float) -> float:
        return qmax_qubit(weak.at(lam)) - qmax_qubit(strong.at(lam))

    half = 10.0 * (eta_tilde + 1.0)
    grid = np.linspace(-half, half, points)
    neg = np.array([diff(x) < 0 for x in grid])
    if not neg.any():
        return None

    # connected runs of negative samples
    edges = np.flatnonzero(np.diff(neg.astype(int)))
    starts = [0] if neg[0] else []
    stops = []
    for k in edges:
        if neg[k + 1]:
            starts.append(k + 1)
        else:
            stops.append(k)
    if neg[-1]:
        stops.append(grid.size - 1)
    centre = -eta * float(weak.a @ weak.b)

    def distance(run):
        s, e = run
        if grid[s] <= centre <= grid[e]:
            return 0.0
        return min(abs(grid[s] - centre), abs(grid[e] - centre))

    s, e = min(zip(starts, stops), key=distance)
    lo = grid[s] if s == 0 else _bisect_root(diff, grid[s], grid[s - 1], tol)
    hi = grid[e] if e == grid.size - 1 else _bisect_root(diff, grid[e], grid[e + 1], tol)
    return Interval(float(lo), float(hi))
