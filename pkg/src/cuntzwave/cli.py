"""Command-line interface: ``cwl classify | sweep | cascade | subband | intertwine``.

Exit codes: 0 on success, 2 for invalid input or filters, 3 for I/O failures.
JSON documents carry ``"schema": "cwl/1"``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .cascade import cascade_father, mirror_check
from .cuntz_rep import (
    PeripheralSpectrumError,
    build_rho,
    build_sigma,
    build_V,
    classify,
    echelon_basis,
    fixed_space_basis,
    spectrum,
)
from .cycles import cycle_set
from .filters import (
    DEFAULT_TOL,
    FilterBank,
    InvalidFilterError,
    ThetaPoint,
    from_theta,
    haar,
    parse_pi_fraction,
    validate,
)
from .operators import Signal, subband_analyze, subband_synthesize

SCHEMA = "cwl/1"
EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 2, 3
SINGULAR_WINDOW = 1e-9
SINGULAR = (Fraction(1, 2), Fraction(3, 2))


class InputError(ValueError):
    """Bad command-line input; exit code 2."""


@dataclass
class RunConfig:
    command: str
    thetas: list[ThetaPoint] = field(default_factory=list)
    grid: int | None = None
    range: tuple[str, str] | None = None
    level: int = 8
    iterations: int = 10
    tol: float = DEFAULT_TOL
    out: str | None = None
    seed: int = 0
    fmt: str = "json"

    def __post_init__(self):
        if self.tol <= 0:
            raise InputError("--tol must be positive")
        if self.grid is not None and self.grid < 1:
            raise InputError("--grid must be at least 1")

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "thetas": [t.label() for t in self.thetas],
            "grid": self.grid,
            "range": list(self.range) if self.range else None,
            "level": self.level,
            "iterations": self.iterations,
            "tol": self.tol,
            "seed": self.seed,
        }


# -- helpers --------------------------------------------------------------------


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        _write(out, text)


def _write(path: str | Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _g(x: float) -> str:
    return format(x, ".17g")


def _theta(text: str) -> ThetaPoint:
    try:
        return ThetaPoint.parse(text)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _snap_singular(t: ThetaPoint) -> ThetaPoint:
    if t.pi_multiple is None:
        for q in SINGULAR:
            if abs(t.theta - float(q) * math.pi) <= SINGULAR_WINDOW:
                return ThetaPoint.of_pi(q)
    return t


def _is_singular(t: ThetaPoint) -> bool:
    return t.pi_multiple in SINGULAR


def _load_bank(args) -> tuple[FilterBank, dict]:
    chosen = [x for x in (args.theta, args.haar or None, args.coeffs) if x]
    if len(chosen) != 1:
        raise InputError("give exactly one of --theta, --haar, --coeffs")
    if args.haar:
        return haar(), {"haar": True}
    if args.theta:
        t = _snap_singular(_theta(args.theta))
        return from_theta(t), {"theta": t.label(), "theta_rad": t.theta}
    text = Path(args.coeffs).read_text(encoding="utf-8")
    try:
        bank = FilterBank.from_json(json.loads(text))
    except (ValueError, TypeError) as exc:
        raise InputError(f"cannot read filter bank from {args.coeffs}: {exc}") from None
    return bank, {"coeffs": str(args.coeffs)}


def _require_valid(bank: FilterBank, tol: float) -> dict:
    report = validate(bank, tol)
    if not report.ok:
        raise InvalidFilterError("filter bank fails validation", report)
    return report.to_json()


def _matrix_json(A: np.ndarray) -> dict:
    A = np.asarray(A, dtype=complex) + 0.0  # drop signed zeros
    return {"re": A.real.tolist(), "im": A.imag.tolist()}


# -- commands --------------------------------------------------------------


def cmd_classify(args, cfg: RunConfig) -> int:
    bank, source = _load_bank(args)
    validation = _require_valid(bank, cfg.tol)
    cls = classify(bank)
    spec = spectrum(build_sigma(build_V(bank, check=False)))
    doc = {
        "schema": SCHEMA,
        "input": source,
        "bank": bank.to_json(),
        "validation": validation,
        "classification": cls.to_json(),
        "spectrum": spec.to_json(),
    }
    if bank.scale == 2:
        cs = cycle_set(bank)
        doc["frame_status"] = "tight_frame_only" if cs.contains_nontrivial else "orthonormal_basis"
        doc["cycles"] = cs.to_json()
    else:
        doc["frame_status"] = None
    _emit(_dump(doc), cfg.out)
    return EXIT_OK


def _parse_bound(s: str) -> Fraction | float:
    """A range end: a fraction of pi when written with ``pi``, else radians."""
    try:
        q = parse_pi_fraction(s)
        if q is not None:
            return q
        x = float(s)
        # zero is exact in either unit
        return Fraction(0) if x == 0 else x
    except ValueError:
        raise InputError(f"cannot parse range bound {s!r}") from None


def _range_bounds(rng: tuple[str, str] | None) -> tuple[Fraction, Fraction] | tuple[float, float]:
    if rng is None:
        return Fraction(0), Fraction(2)
    a, b = (_parse_bound(s) for s in rng)
    if not (isinstance(a, Fraction) and isinstance(b, Fraction)):
        a, b = (float(v) * math.pi if isinstance(v, Fraction) else v for v in (a, b))
    if not b > a:
        raise InputError("empty --range")
    return a, b


def sweep_points(count: int, rng: tuple[str, str] | None) -> list[ThetaPoint]:
    """``count`` equally spaced angles on the half-open range ``[A, B)``."""
    if count < 2:
        raise InputError("--grid must be at least 2 for a sweep")
    a, b = _range_bounds(rng)
    if isinstance(a, Fraction):
        pts = [ThetaPoint.of_pi(a + (b - a) * Fraction(i, count)) for i in range(count)]
    else:
        pts = [_snap_singular(ThetaPoint(a + (b - a) * i / count)) for i in range(count)]
    return sorted(pts, key=lambda t: t.theta)


def _eig_text(spec) -> str:
    return ";".join(f"{_g(v.real)}{'+' if v.imag >= 0 else '-'}{_g(abs(v.imag))}j*{m}" for v, m in spec.eigenvalues)


def cmd_sweep(args, cfg: RunConfig) -> int:
    points = sweep_points(cfg.grid or 720, cfg.range)
    rows = []
    for t in points:
        bank = from_theta(t)
        sigma = build_sigma(build_V(bank))
        spec = spectrum(sigma)
        status = "tight_frame_only" if cycle_set(bank).contains_nontrivial else "orthonormal_basis"
        rows.append((t, spec, status))
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta", "theta_label", "singular", "commutant_dim", "peripheral_k", "frame_status", "eigenvalues"])
        for t, spec, status in rows:
            w.writerow([
                _g(t.theta), t.label(), int(_is_singular(t)), spec.fixed_space_dim,
                spec.peripheral_group_order, status, _eig_text(spec),
            ])
        _emit(buf.getvalue(), cfg.out)
    else:
        doc = {
            "schema": SCHEMA,
            "config": cfg.to_json(),
            "rows": [
                {
                    "theta": t.theta,
                    "theta_label": t.label(),
                    "singular": _is_singular(t),
                    "commutant_dim": spec.fixed_space_dim,
                    "peripheral_k": spec.peripheral_group_order,
                    "frame_status": status,
                    "eigenvalues": spec.to_json()["eigenvalues"],
                }
                for t, spec, status in rows
            ],
        }
        _emit(_dump(doc), cfg.out)
    return EXIT_OK


def cmd_cascade(args, cfg: RunConfig) -> int:
    bank, source = _load_bank(args)
    _require_valid(bank, cfg.tol)
    try:
        res = cascade_father(bank, cfg.iterations, cfg.level)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    label = source.get("theta", "haar" if source.get("haar") else source.get("coeffs"))
    meta = {
        "schema": SCHEMA,
        "input": source,
        "level": cfg.level,
        "iterations": cfg.iterations,
        "support": list(res.support),
        "points": len(res.samples_phi),
        "integral_phi": float(res.integral()),
    }
    if args.mirror:
        try:
            rep = mirror_check(bank, cfg.level, cfg.iterations)
        except ValueError as exc:
            raise InputError(f"--mirror: {exc}") from None
        meta["mirror"] = {"phi": rep.phi, "psi": rep.psi}
    buf = io.StringIO()
    buf.write(f"# level={cfg.level} iterations={cfg.iterations} theta={label}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "phi", "psi"])
    for x, p, q in zip(res.x, res.samples_phi, res.samples_psi):
        w.writerow([_g(x), _g(p), _g(q)])
    if cfg.out is None:
        sys.stdout.write(buf.getvalue())
        sys.stderr.write(_dump(meta))
    else:
        out = Path(cfg.out)
        _write(out, buf.getvalue())
        _write(out.with_suffix(".json"), _dump(meta))
    return EXIT_OK


def cmd_subband(args, cfg: RunConfig) -> int:
    bank, source = _load_bank(args)
    _require_valid(bank, cfg.tol)
    text = Path(args.input).read_text(encoding="utf-8")
    try:
        x = Signal.from_csv(text)
    except ValueError as exc:
        raise InputError(f"cannot parse {args.input}: {exc}") from None
    bands = subband_analyze(bank, x)
    doc = {"schema": SCHEMA, "input": source, "signal_length": len(x)}
    if cfg.out is not None:
        files = []
        for j, band in enumerate(bands):
            path = f"{cfg.out}.band{j}.csv"
            _write(path, band.to_csv())
            files.append(path)
        doc["files"] = files
    else:
        doc["bands"] = [b.to_json() for b in bands]
    if args.roundtrip:
        err = subband_synthesize(bank, bands).max_abs_diff(x)
        doc["reconstruction_error"] = err
        sys.stderr.write(f"max reconstruction error: {_g(err)}\n")
    sys.stdout.write(_dump(doc))
    return EXIT_OK


def cmd_intertwine(args, cfg: RunConfig) -> int:
    ta, tb = (_snap_singular(_theta(s)) for s in (args.theta_a, args.theta_b))
    bank_a, bank_b = from_theta(ta), from_theta(tb)
    rho = build_rho(build_V(bank_b), build_V(bank_a))
    basis = echelon_basis(fixed_space_basis(rho))
    dim = basis.shape[1]
    doc = {
        "schema": SCHEMA,
        "theta_a": ta.label(),
        "theta_b": tb.label(),
        "map": "A -> sum_i W_i A V_i*, V from theta_a, W from theta_b",
        "dim": dim,
        "basis": [_matrix_json(basis[:, i].reshape(4, 4)) for i in range(dim)],
    }
    _emit(_dump(doc), cfg.out)
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="validation tolerance")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--seed", type=int, default=0)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv")

    bank = argparse.ArgumentParser(add_help=False)
    bank.add_argument("--theta", help="angle in radians or as e.g. 7pi/6")
    bank.add_argument("--haar", action="store_true")
    bank.add_argument("--coeffs", metavar="FILE", help="filter bank JSON")

    p = argparse.ArgumentParser(prog="cwl", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("classify", parents=[common, bank], help="classify one representation")

    s = sub.add_parser("sweep", parents=[common], help="classify over a grid of angles")
    s.add_argument("--grid", type=int, default=720)
    s.add_argument("--range", nargs=2, metavar=("A", "B"))

    c = sub.add_parser("cascade", parents=[common, bank], help="cascade samples of phi and psi")
    c.add_argument("--level", type=int, default=8)
    c.add_argument("--iters", type=int, default=10)
    c.add_argument("--mirror", action="store_true")

    b = sub.add_parser("subband", parents=[common, bank], help="two-channel analysis of a signal")
    b.add_argument("input", help="signal CSV (index, re, im)")
    b.add_argument("--roundtrip", action="store_true")

    i = sub.add_parser("intertwine", parents=[common], help="intertwiners between two angles")
    i.add_argument("theta_a")
    i.add_argument("theta_b")
    return p


COMMANDS = {
    "classify": cmd_classify,
    "sweep": cmd_sweep,
    "cascade": cmd_cascade,
    "subband": cmd_subband,
    "intertwine": cmd_intertwine,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig(
            command=args.command,
            grid=getattr(args, "grid", None),
            range=tuple(args.range) if getattr(args, "range", None) else None,
            level=getattr(args, "level", 8),
            iterations=getattr(args, "iters", 10),
            tol=args.tol,
            out=args.out,
            seed=args.seed,
            fmt=args.fmt or ("csv" if args.command == "sweep" else "json"),
        )
        return COMMANDS[args.command](args, cfg)
    except InvalidFilterError as exc:
        doc = {"schema": SCHEMA, "error": str(exc)}
        if exc.report is not None:
            doc["validation"] = exc.report.to_json()
        sys.stdout.write(_dump(doc))
        sys.stderr.write(f"cwl: {exc}\n")
        return EXIT_INVALID
    except (ValueError, PeripheralSpectrumError) as exc:
        sys.stderr.write(f"cwl: {exc}\n")
        return EXIT_INVALID
    except OSError as exc:
        sys.stderr.write(f"cwl: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
