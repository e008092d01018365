"""The isometries ``S_j`` on trigonometric polynomials and subband filtering.

``S_j xi(z) = m_j(z) xi(z^N)``. On monomials ``S_j e_n = sum_k a_k e_{k + N n}``
and ``S_j* e_n = sum_m conj(a_{n - N m}) e_m``. Everything here works on
finitely supported coefficient maps, so both sides of the Cuntz relations can
be compared exactly up to rounding in the coefficients.
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cuntz_rep import compute_H
from .filters import FilterBank

__all__ = [
    "TrigPoly",
    "Signal",
    "SettleError",
    "CuntzReport",
    "apply_S",
    "apply_S_star",
    "settle_length",
    "settle_bound",
    "verify_cuntz",
    "random_trig_poly",
    "subband_analyze",
    "subband_synthesize",
    "reflect_W",
    "intertwiner_U",
]

MAX_SETTLE_DEPTH = 64


class TrigPoly:
    """Finitely supported map ``exponent -> coefficient``; exact zeros are dropped."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, complex] | None = None):
        self.coeffs = {
            int(n): complex(c) for n, c in sorted((coeffs or {}).items()) if c != 0
        }

    @classmethod
    def monomial(cls, n: int, c: complex = 1.0):
        return cls({n: c})

    @classmethod
    def from_array(cls, values: Sequence[complex], start: int = 0):
        return cls({start + i: v for i, v in enumerate(values)})

    @property
    def support(self) -> list[int]:
        return list(self.coeffs)

    def __getitem__(self, n: int) -> complex:
        return self.coeffs.get(n, 0j)

    def __iter__(self):
        return iter(self.coeffs.items())

    def __len__(self) -> int:
        return len(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def _combine(self, other, sign: float):
        out = defaultdict(complex, self.coeffs)
        for n, c in other.coeffs.items():
            out[n] += sign * c
        return type(self)(out)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __neg__(self):
        return type(self)({n: -c for n, c in self.coeffs.items()})

    def __mul__(self, scalar: complex):
        return type(self)({n: scalar * c for n, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, TrigPoly) and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.coeffs})"

    def inner(self, other: "TrigPoly") -> complex:
        """``<self, other>``, conjugate-linear in ``self``."""
        return sum((c.conjugate() * other[n] for n, c in self.coeffs.items()), 0j)

    def norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def max_abs_diff(self, other: "TrigPoly") -> float:
        keys = set(self.coeffs) | set(other.coeffs)
        return max((abs(self[n] - other[n]) for n in keys), default=0.0)

    def map_exponents(self, f) -> "TrigPoly":
        out = defaultdict(complex)
        for n, c in self.coeffs.items():
            out[f(n)] += c
        return type(self)(out)

    def dense(self) -> tuple[int, np.ndarray]:
        """``(lo, values)`` with ``values[i]`` the coefficient at ``lo + i``."""
        if not self.coeffs:
            return 0, np.zeros(0, dtype=complex)
        lo, hi = min(self.coeffs), max(self.coeffs)
        out = np.zeros(hi - lo + 1, dtype=complex)
        for n, c in self.coeffs.items():
            out[n - lo] = c
        return lo, out

    def to_json(self) -> dict:
        return {str(n): [c.real, c.imag] for n, c in self.coeffs.items()}

    @classmethod
    def from_json(cls, doc: Mapping):
        return cls({int(n): complex(v[0], v[1]) for n, v in doc.items()})


class Signal(TrigPoly):
    """A finitely supported sequence ``x_k``; CSV rows are ``index, re, im``."""

    __slots__ = ()

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "re", "im"])
        for n, c in self.coeffs.items():
            w.writerow([n, format(c.real, ".17g"), format(c.imag, ".17g")])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Signal":
        rows = list(csv.reader(io.StringIO(text)))
        if rows and rows[0] and rows[0][0].strip().lower() == "index":
            rows = rows[1:]
        values = {}
        for i, row in enumerate(rows, 1):
            if not row or not "".join(row).strip():
                continue
            if len(row) not in (2, 3):
                raise ValueError(f"line {i}: expected index, re[, im]")
            try:
                n = int(row[0])
                c = complex(float(row[1]), float(row[2]) if len(row) == 3 else 0.0)
            except ValueError as exc:
                raise ValueError(f"line {i}: {exc}") from None
            if n in values:
                raise ValueError(f"line {i}: duplicate index {n}")
            values[n] = c
        return cls(values)


# -- the isometries -------------------------------------------------------------


def apply_S(bank: FilterBank, j: int, xi: TrigPoly) -> TrigPoly:
    """``S_j xi = m_j(z) xi(z^N)``."""
    N = bank.scale
    out = defaultdict(complex)
    for n, c in xi:
        for k, a in sorted(bank.rows[j].items()):
            out[k + N * n] += a * c
    return type(xi)(out)


def apply_S_star(bank: FilterBank, j: int, xi: TrigPoly) -> TrigPoly:
    """``S_j* e_n = sum_m conj(a_{n - N m}) e_m``."""
    N = bank.scale
    out = defaultdict(complex)
    for n, c in xi:
        for p, a in sorted(bank.rows[j].items()):
            if (n - p) % N == 0:
                out[(n - p) // N] += a.conjugate() * c
    return type(xi)(out)


class SettleError(RuntimeError):
    """Raised when words of length ``MAX_SETTLE_DEPTH`` still leave ``H``."""


def settle_length(bank: FilterBank, n: int, H: Iterable[int] | None = None, max_depth: int = MAX_SETTLE_DEPTH) -> int:
    """Smallest ``M`` with ``S_I* e_n`` in ``span{e_m : m in H}`` for all ``|I| >= M``.

    Works on supports: the set of exponents reachable by words of length
    ``M`` is tracked level by level (coefficient cancellation is ignored, so
    the answer is an upper bound when cancellations occur). ``H`` defaults to
    the integer attractor; since it is invariant, once every word of length
    ``M`` lands in ``H`` all longer words do too.
    """
    N = bank.scale
    target = set(compute_H(bank.support, N).H if H is None else H)
    letters = sorted({p for row in bank.rows for p, a in row.items() if a != 0})
    level = {int(n)}
    for depth in range(max_depth + 1):
        if level <= target:
            return depth
        level = {(m - p) // N for m in level for p in letters if (m - p) % N == 0}
        if not level:
            return depth + 1
    raise SettleError(f"e_{n} did not settle within {max_depth} steps")


def random_trig_poly(rng: np.random.Generator, radius: int, cls=TrigPoly) -> TrigPoly:
    """Coefficients uniform in [-1, 1] on exponents ``-radius..radius``."""
    vals = rng.uniform(-1.0, 1.0, 2 * radius + 1)
    return cls.from_array(vals, start=-radius)


@dataclass(frozen=True)
class CuntzReport:
    max_residual: float
    seed: int
    trials: int


def verify_cuntz(bank: FilterBank, trials: int = 50, support_radius: int = 20, seed: int = 0) -> CuntzReport:
    """Worst residual of ``S_j* S_i = delta_ij`` and ``sum S_i S_i* = 1`` on random inputs."""
    rng = np.random.default_rng(seed)
    N = bank.scale
    worst = 0.0
    for _ in range(trials):
        xi = random_trig_poly(rng, support_radius)
        total = TrigPoly()
        for i in range(N):
            si = apply_S(bank, i, xi)
            for j in range(N):
                lhs = apply_S_star(bank, j, si)
                rhs = xi if i == j else TrigPoly()
                worst = max(worst, (lhs - rhs).norm())
            total = total + apply_S(bank, i, apply_S_star(bank, i, xi))
        worst = max(worst, (total - xi).norm())
    return CuntzReport(worst, seed, trials)


# -- subband filtering ---------------------------------------------------------


def subband_analyze(bank: FilterBank, x: Signal) -> list[Signal]:
    """``(F_j x)_n = sum_k conj(a_{k - N n}) x_k`` by correlation and decimation."""
    N = bank.scale
    if not x:
        return [Signal() for _ in range(N)]
    xlo, xv = x.dense()
    out = []
    for row in bank.rows:
        plo, phi = min(row), max(row)
        h = np.array([row.get(p, 0j) for p in range(plo, phi + 1)])
        # g[s] = sum_p conj(a_p) x_{p + s}; correlate index k <-> s = xlo - plo + k - (len(h) - 1)
        g = np.correlate(xv, h, mode="full")
        s0 = xlo - plo - (len(h) - 1)
        first = -(-s0 // N)  # smallest n with N n >= s0
        idx = np.arange(N * first - s0, len(g), N)
        out.append(Signal({first + i: g[k] for i, k in enumerate(idx)}))
    return out


def subband_synthesize(bank: FilterBank, bands: Sequence[Signal]) -> Signal:
    """``sum_j F_j* y_j`` with ``(F_j* y)_m = sum_k a_{m - N k} y_k``."""
    N = bank.scale
    if len(bands) != N:
        raise ValueError(f"expected {N} subbands, got {len(bands)}")
    acc: dict[int, complex] = defaultdict(complex)
    for row, y in zip(bank.rows, bands):
        if not y:
            continue
        ylo, yv = y.dense()
        up = np.zeros(N * (len(yv) - 1) + 1, dtype=complex)
        up[::N] = yv
        plo, phi = min(row), max(row)
        h = np.array([row.get(p, 0j) for p in range(plo, phi + 1)])
        z = np.convolve(up, h)
        start = N * ylo + plo
        for i, v in enumerate(z):
            acc[start + i] += v
    return Signal(acc)


# -- intertwiners -----------------------------------------------------------


def reflect_W(xi: TrigPoly, degree: int = 3) -> TrigPoly:
    """``(W f)(z) = z^{-D} f(1/z)``: the coefficient at ``n`` moves to ``-D - n``."""
    return xi.map_exponents(lambda n: -degree - n)


def intertwiner_U(xi: TrigPoly) -> TrigPoly:
    """``U e_n = e_{-3n-6}``."""
    return xi.map_exponents(lambda n: -3 * n - 6)


def settle_bound(bank: FilterBank, n: int) -> int:
    """Word length after which ``S_I* e_n`` lies in the ball ``|m| <= r``, ``r = max|p| / (N - 1)``.

    Each ``sigma_p`` contracts towards the ball: ``|sigma_I(n)| <= r + (|n| - r) / N^k``
    for ``|I| = k``. An integer below ``floor(r) + 1`` is in the ball, so the
    answer is the least ``k`` with ``(|n| - r) / N^k < floor(r) + 1 - r``.
    """
    N = bank.scale
    r = max(abs(p) for p in bank.support) / (N - 1)
    gap = math.floor(r) + 1 - r
    excess = abs(n) - r
    k = 0
    while excess >= gap:
        excess /= N
        k += 1
    return k

