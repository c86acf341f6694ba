"""Command-line front end.

Exit codes: 0 ok, 2 malformed input, 3 physically invalid input,
4 output directory not writable, 5 oracle disagreement.
Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .model import (
    DisturbedModel,
    SchemaError,
    ValidationError,
    matrix_from_json,
    model_from_json,
    validate_density,
)
from .multiparam import qfi_matrix
from .multiprobe import ProbeEnsemble, coupled_scaling, heisenberg_scaling_check
from .oracle import DEFAULT_DL, qfi_fd
from .qfi_core import average_hamiltonian, qfi_max, qfi_mixed, qfi_report
from .qubit import BlochModel, bloch_decompose, m_vector, sweep_curve

log = logging.getLogger("qfi_disturb")

EXIT_SCHEMA = 2
EXIT_INVALID = 3
EXIT_UNWRITABLE = 4
EXIT_ORACLE = 5
ORACLE_RTOL = 1e-5


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# ------------------------------------------------------------- formatting


def fmt_float(x: float) -> str:
    """17 significant digits; integral values keep a trailing '.0'."""
    if not math.isfinite(x):
        raise ValueError(f"cannot format non-finite value {x!r}")
    s = format(x, ".17g")
    if all(ch not in s for ch in ".eEn"):
        s += ".0"
    return s


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON with fixed float formatting and insertion-ordered keys."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(obj: Any) -> None:
    sys.stdout.write(dumps(obj) + "\n")


# ------------------------------------------------------------------ input


def _load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise CliError(f"{path}: no such file", EXIT_SCHEMA)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}", EXIT_SCHEMA)


def _load_model(path: str) -> DisturbedModel:
    obj = _load_json(path)
    try:
        return model_from_json(obj)
    except SchemaError as exc:
        raise CliError(f"{path}: {exc}", EXIT_SCHEMA)
    except ValidationError as exc:
        raise CliError(f"{path}: {exc}", EXIT_INVALID)


def _load_matrix(path: str, where: str) -> np.ndarray:
    try:
        return matrix_from_json(_load_json(path), where)
    except SchemaError as exc:
        raise CliError(f"{path}: {exc}", EXIT_SCHEMA)


def _load_density(path: str, dim: int):
    M = _load_matrix(path, "rho")
    if M.shape[0] != dim:
        raise CliError(f"{path}: state has dimension {M.shape[0]}, model has {dim}", EXIT_INVALID)
    try:
        return validate_density(M)
    except ValidationError as exc:
        raise CliError(f"{path}: {exc}", EXIT_INVALID)


def _jobs(value: int | None) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get("QFI_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise CliError(f"QFI_JOBS must be an integer, got {env!r}", EXIT_SCHEMA)
    return os.cpu_count() or 1


def parse_eta_list(text: str) -> list[float]:
    values = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            x = float(token)
        except ValueError:
            raise CliError(f"--eta: {token!r} is not a number", EXIT_SCHEMA)
        if not math.isfinite(x):
            raise CliError(f"--eta: {token!r} is not finite", EXIT_SCHEMA)
        if x in values:
            raise CliError(f"--eta: duplicate value {token!r}", EXIT_SCHEMA)
        values.append(x)
    if not values:
        raise CliError("--eta: empty list", EXIT_SCHEMA)
    return values


# ---------------------------------------------------------------- compute


def cmd_compute(args) -> int:
    model = _load_model(args.model)
    if args.nu is not None and args.nu < 1:
        raise CliError("--nu must be a positive integer", EXIT_SCHEMA)
    if args.rho is None:
        report = qfi_max(model, nu=args.nu)
    else:
        rho = _load_density(args.rho, model.dim)
        report = qfi_report(rho, model, nu=args.nu)
    _emit(report.to_json())
    return 0


# ------------------------------------------------------------------ sweep


class _Curve:
    """Picklable q_over_4(lambda) at fixed eta for one model."""

    def __init__(self, model: DisturbedModel, eta: float):
        self.eta = eta
        self.qubit = model.dim == 2
        if self.qubit:
            _, self.r_a, self.a = bloch_decompose(model.H_I)
            _, self.r_b, self.b = bloch_decompose(model.H_0)
            if self.r_b == 0.0:
                self.b = self.a
        else:
            self.model = model

    def __call__(self, lam: float) -> float:
        if self.qubit:
            if self.r_a == 0.0:
                return 0.0
            bm = BlochModel(self.a, self.b, lam * self.r_a, self.eta * self.r_b)
            m = m_vector(bm)
            return self.r_a**2 * float(m @ m)
        return qfi_max(self.model.at(lam=lam, eta=self.eta)).qfi_max / 4.0

    def sidecar_vectors(self) -> dict:
        if not self.qubit:
            return {"a": None, "b": None}
        return {"a": [float(x) for x in self.a], "b": [float(x) for x in self.b]}


def _evaluate(curve: _Curve, grid: np.ndarray, jobs: int) -> np.ndarray:
    if jobs <= 1 or grid.size < 64:
        return np.array([curve(x) for x in grid])
    chunk = max(1, grid.size // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map keeps grid order whatever the completion order
        return np.array(list(pool.map(curve, grid.tolist(), chunksize=chunk)))


def _eta_tag(eta: float) -> str:
    return repr(float(eta))


def _write_text(path: Path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}", EXIT_UNWRITABLE)


def below_intervals(grid: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> list[list[float]]:
    """Grid-resolution runs where ``lower`` lies strictly below ``upper``."""
    mask = lower < upper
    runs = []
    i = 0
    while i < grid.size:
        if mask[i]:
            j = i
            while j + 1 < grid.size and mask[j + 1]:
                j += 1
            runs.append([float(grid[i]), float(grid[j])])
            i = j + 1
        else:
            i += 1
    return runs


def cmd_sweep(args) -> int:
    model = _load_model(args.model)
    if args.points < 2:
        raise CliError("--points must be at least 2", EXIT_SCHEMA)
    if not args.lambda_to > args.lambda_from:
        raise CliError("--lambda-to must exceed --lambda-from", EXIT_SCHEMA)
    etas = parse_eta_list(args.eta)
    jobs = _jobs(args.jobs)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {out}: {exc.strerror}", EXIT_UNWRITABLE)
    if not os.access(out, os.W_OK):
        raise CliError(f"{out} is not writable", EXIT_UNWRITABLE)

    grid = np.linspace(args.lambda_from, args.lambda_to, args.points)
    curves = {}
    summary = []
    for eta in etas:
        curve = _Curve(model, eta)
        values = _evaluate(curve, grid, jobs)
        res = sweep_curve(curve, grid, values)
        curves[eta] = values
        tag = _eta_tag(eta)
        lines = ["lambda,q_over_4"]
        lines += [f"{fmt_float(x)},{fmt_float(q)}" for x, q in zip(grid, values)]
        _write_text(out / f"sweep_eta={tag}.csv", "\n".join(lines) + "\n")
        side = {
            **curve.sidecar_vectors(),
            "eta": eta,
            "lambda_min_located": res.lambda_min_located,
            "q_at_min": res.q_at_min,
            "flat": res.flat,
        }
        _write_text(out / f"sweep_eta={tag}.json", dumps(side) + "\n")
        summary.append({"eta": eta, "csv": f"sweep_eta={tag}.csv", **side})

    pairs = []
    ordered = sorted(e for e in etas if e >= 0)
    for i, lo in enumerate(ordered):
        for hi in ordered[i + 1 :]:
            pairs.append(
                {
                    "eta": lo,
                    "eta_tilde": hi,
                    "intervals": below_intervals(grid, curves[lo], curves[hi]),
                }
            )
    _write_text(out / "dithering.json", dumps({"pairs": pairs}) + "\n")
    _emit({"sweeps": summary, "dithering": pairs})
    return 0


# ----------------------------------------------------------------- matrix


def cmd_matrix(args) -> int:
    model = _load_model(args.model)
    rho = _load_density(args.rho, model.dim)
    _emit(qfi_matrix(rho, model).to_json())
    return 0


# ----------------------------------------------------------------- oracle


def cmd_oracle(args) -> int:
    model = _load_model(args.model)
    rho = _load_density(args.rho, model.dim)
    if not args.dl > 0:
        raise CliError("--dl must be positive", EXIT_SCHEMA)
    closed = qfi_mixed(rho, average_hamiltonian(model, "I").matrix)
    fd = qfi_fd(rho, model, args.dl)
    rel = abs(fd - closed) / (1.0 + closed)
    _emit({"closed_form": closed, "oracle": fd, "rel_diff": rel, "dl": args.dl})
    if rel > ORACLE_RTOL:
        log.error("oracle disagreement: rel_diff %.3e exceeds %.0e", rel, ORACLE_RTOL)
        return EXIT_ORACLE
    return 0


# ----------------------------------------------------------------- nprobe


def cmd_nprobe(args) -> int:
    model = _load_model(args.model)
    try:
        pe = ProbeEnsemble.from_model(model, args.n)
    except ValidationError as exc:
        raise CliError(str(exc), EXIT_INVALID)
    if args.experimental:
        H0 = _load_matrix(args.experimental, "coupled_H0")
        try:
            check = coupled_scaling(pe, H0, model.lam, model.eta)
        except ValidationError as exc:
            raise CliError(f"{args.experimental}: {exc}", EXIT_INVALID)
    else:
        check = heisenberg_scaling_check(pe, model.lam, model.eta)
    _emit(check.to_json())
    return 0


# ------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qfi-disturb",
        description="Quantum Fisher information under a unitary disturbance.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="QFI for a probe, or the optimal-probe report")
    c.add_argument("model")
    c.add_argument("rho", nargs="?")
    c.add_argument("--nu", type=int, help="repetitions for the Cramer-Rao bound")
    c.set_defaults(func=cmd_compute)

    s = sub.add_parser("sweep", help="optimal QFI / 4 along a lambda grid")
    s.add_argument("model")
    s.add_argument("--lambda-from", type=float, required=True)
    s.add_argument("--lambda-to", type=float, required=True)
    s.add_argument("--points", type=int, required=True)
    s.add_argument("--eta", required=True, help="comma-separated eta values")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--jobs", type=int, help="worker processes (default: $QFI_JOBS or all cores)")
    s.set_defaults(func=cmd_sweep)

    m = sub.add_parser("matrix", help="2x2 QFI matrix for (lambda, eta)")
    m.add_argument("model")
    m.add_argument("rho")
    m.set_defaults(func=cmd_matrix)

    o = sub.add_parser("oracle", help="closed form against the finite-difference fidelity oracle")
    o.add_argument("model")
    o.add_argument("rho")
    o.add_argument("--dl", type=float, default=DEFAULT_DL)
    o.set_defaults(func=cmd_oracle)

    n = sub.add_parser("nprobe", help="N-probe Heisenberg scaling check")
    n.add_argument("model")
    n.add_argument("--n", type=int, required=True)
    n.add_argument("--experimental", metavar="COUPLED_H0", help="collective H_0 matrix file")
    n.set_defaults(func=cmd_nprobe)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # a handler scoped to this invocation, bound to the current stderr
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    pkg_log = logging.getLogger("qfi_disturb")
    saved = (pkg_log.level, pkg_log.propagate)
    pkg_log.addHandler(handler)
    pkg_log.setLevel(logging.DEBUG if args.verbose else logging.WARNING)
    pkg_log.propagate = False
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    finally:
        pkg_log.removeHandler(handler)
        pkg_log.setLevel(saved[0])
        pkg_log.propagate = saved[1]


if __name__ == "__main__":
    sys.exit(main())
