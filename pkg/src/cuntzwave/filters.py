"""Filter banks: construction, validation and transformations.

A filter bank of scale ``N`` is a list of ``N`` Laurent polynomials
``m_j(z) = sum_n a_n^{(j)} z^n``. Row 0 is the low-pass filter. Each row is
stored as a map from exponent to complex coefficient so that banks with gaps
in their support (substitution filters) are represented without padding.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "FilterBank",
    "ThetaPoint",
    "ValidationReport",
    "InvalidFilterError",
    "from_theta",
    "haar",
    "validate",
    "high_pass_from_low",
    "substitute_odd",
    "reflect_theta",
    "evaluate",
    "unitarity_check",
]

SQRT2 = math.sqrt(2.0)
DEFAULT_TOL = 1e-12
SNAP_MIN_DECIMALS = 6

Coeffs = dict[int, complex]


class InvalidFilterError(ValueError):
    """Raised when a bank fails the orthonormality conditions."""

    def __init__(self, message: str, report: "ValidationReport | None" = None):
        super().__init__(message)
        self.report = report


# -- angles -----------------------------------------------------------------

_PI_FORM = re.compile(
    r"^\s*(?P<sign>[+-]?)\s*(?P<num>\d+)?\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+))?\s*$",
    re.IGNORECASE,
)

# cos and sin of q*pi for the denominators where closed forms are available
_S3 = math.sqrt(3.0)
_EXACT_TRIG = {
    Fraction(0): (1.0, 0.0),
    Fraction(1, 6): (_S3 / 2, 0.5),
    Fraction(1, 4): (1 / SQRT2, 1 / SQRT2),
    Fraction(1, 3): (0.5, _S3 / 2),
    Fraction(1, 2): (0.0, 1.0),
}


def _exact_cos_sin(q: Fraction) -> tuple[float, float] | None:
    """cos and sin of ``q*pi`` for ``q`` in [0, 2) when a closed form exists."""
    quarter = q % Fraction(1, 2)
    turn = int((q - quarter) / Fraction(1, 2))  # number of quarter turns
    if quarter not in _EXACT_TRIG:
        return None
    c, s = _EXACT_TRIG[quarter]
    for _ in range(turn):
        c, s = -s, c
    return c + 0.0, s + 0.0


@dataclass(frozen=True)
class ThetaPoint:
    """An angle in [0, 2pi).

    When the angle is a rational multiple of pi, ``pi_multiple`` keeps the
    exact value (as a fraction of pi in [0, 2)) so that the singular angles
    pi/2 and 3pi/2 are hit exactly.
    """

    theta: float
    pi_multiple: Fraction | None = None

    def __post_init__(self):
        if self.pi_multiple is not None:
            q = Fraction(self.pi_multiple) % 2
            object.__setattr__(self, "pi_multiple", q)
            object.__setattr__(self, "theta", float(q) * math.pi)
        else:
            t = math.fmod(float(self.theta), 2 * math.pi)
            if t < 0:
                t += 2 * math.pi
            if t >= 2 * math.pi:
                t = 0.0
            object.__setattr__(self, "theta", t)

    @classmethod
    def of_pi(cls, q: Fraction | int | str) -> "ThetaPoint":
        """The angle ``q*pi``."""
        return cls(0.0, Fraction(q))

    @classmethod
    def parse(cls, text: str, snap: bool = True) -> "ThetaPoint":
        """Parse ``"7pi/6"``, ``"-pi/6"``, ``"pi"`` or a decimal in radians.

        With ``snap``, a decimal written with at least six places that agrees
        with a multiple of pi/2 to within half a unit in its last digit is
        taken to be that multiple (``1.5707963`` is pi/2, ``1.57`` is not).
        """
        q = parse_pi_fraction(text)
        if q is not None:
            return cls.of_pi(q)
        try:
            value = float(text)
        except ValueError:
            raise ValueError(f"cannot parse angle {text!r}") from None
        if not math.isfinite(value):
            raise ValueError(f"angle must be finite, got {text!r}")
        if snap:
            half_ulp = _half_last_digit(text)
            if half_ulp is not None:
                k = round(value / (math.pi / 2))
                if abs(value - k * math.pi / 2) <= half_ulp:
                    return cls.of_pi(Fraction(k, 2))
        return cls(value)

    def cos_sin(self) -> tuple[float, float]:
        if self.pi_multiple is not None:
            cs = _exact_cos_sin(self.pi_multiple)
            if cs is not None:
                return cs
        return math.cos(self.theta), math.sin(self.theta)

    def reflect(self) -> "ThetaPoint":
        """The angle ``pi - theta``."""
        if self.pi_multiple is not None:
            return ThetaPoint.of_pi(1 - self.pi_multiple)
        return ThetaPoint(math.pi - self.theta)

    def label(self) -> str:
        q = self.pi_multiple
        if q is None:
            return repr(self.theta)
        if q == 0:
            return "0"
        num = "" if q.numerator == 1 else str(q.numerator)
        den = "" if q.denominator == 1 else f"/{q.denominator}"
        return f"{num}pi{den}"

    def __float__(self) -> float:
        return self.theta


def parse_pi_fraction(text: str) -> Fraction | None:
    """``"-7pi/6"`` -> ``Fraction(-7, 6)``; ``None`` if ``text`` is not of that form."""
    m = _PI_FORM.match(text)
    if not m:
        return None
    num = int(m["num"]) if m["num"] else 1
    den = int(m["den"]) if m["den"] else 1
    if den == 0:
        raise ValueError(f"zero denominator in angle {text!r}")
    q = Fraction(num, den)
    return -q if m["sign"] == "-" else q


def _half_last_digit(text: str) -> float | None:
    s = text.strip().lstrip("+-")
    if not re.fullmatch(r"\d+(\.\d*)?", s):
        return None
    decimals = len(s.split(".")[1]) if "." in s else 0
    if decimals < SNAP_MIN_DECIMALS:
        return None
    return 0.5 * 10.0 ** (-decimals)


def as_theta(theta: "ThetaPoint | float | str") -> ThetaPoint:
    if isinstance(theta, ThetaPoint):
        return theta
    if isinstance(theta, str):
        return ThetaPoint.parse(theta)
    return ThetaPoint(float(theta))


# -- banks --------------------------------------------------------------------


def _as_coeffs(row: Mapping[int, complex] | Sequence[complex]) -> Coeffs:
    if isinstance(row, Mapping):
        return {int(n): complex(c) for n, c in row.items()}
    return {n: complex(c) for n, c in enumerate(row)}


@dataclass(frozen=True)
class FilterBank:
    """Coefficient maps for ``m_0, ..., m_{N-1}``."""

    scale: int
    genus: int
    rows: tuple[Coeffs, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.scale < 2:
            raise ValueError("scale must be at least 2")
        rows = tuple(_as_coeffs(r) for r in self.rows)
        if len(rows) != self.scale:
            raise ValueError(f"expected {self.scale} rows, got {len(rows)}")
        object.__setattr__(self, "rows", rows)

    @property
    def low(self) -> Coeffs:
        return self.rows[0]

    @property
    def support(self) -> list[int]:
        """Declared support D: the union of exponents over all rows."""
        return sorted(set().union(*(r.keys() for r in self.rows)))

    def coeff(self, j: int, n: int) -> complex:
        return self.rows[j].get(n, 0j)

    def is_real(self, tol: float = 0.0) -> bool:
        return all(abs(c.imag) <= tol for r in self.rows for c in r.values())

    def dense(self, j: int, lo: int, hi: int) -> np.ndarray:
        """Coefficients of row ``j`` on exponents ``lo..hi`` as an array."""
        out = np.zeros(hi - lo + 1, dtype=complex)
        for n, c in self.rows[j].items():
            if lo <= n <= hi:
                out[n - lo] = c
        return out

    def to_json(self) -> dict:
        return {
            "scale": self.scale,
            "genus": self.genus,
            "rows": [
                [{"n": n, "re": c.real, "im": c.imag} for n, c in sorted(r.items())]
                for r in self.rows
            ],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "FilterBank":
        try:
            rows = [
                {int(t["n"]): complex(float(t["re"]), float(t.get("im", 0.0))) for t in row}
                for row in doc["rows"]
            ]
            return cls(int(doc["scale"]), int(doc["genus"]), tuple(rows))
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"malformed filter bank document: {exc}") from exc


def theta_coefficients(theta: ThetaPoint | float) -> tuple[float, float, float, float]:
    """Low-pass coefficients ``a_0..a_3`` of the genus-2 family at ``theta``."""
    c, s = as_theta(theta).cos_sin()
    k = 2 * SQRT2
    return ((1 - c + s) / k, (1 - c - s) / k, (1 + c - s) / k, (1 + c + s) / k)


def from_theta(theta: ThetaPoint | float | str) -> FilterBank:
    """Genus-2 scale-2 bank at angle ``theta``."""
    low = dict(enumerate(theta_coefficients(as_theta(theta))))
    return FilterBank(2, 2, (low, high_pass_from_low(low, 2)))


def haar() -> FilterBank:
    h = 1 / math.sqrt(2.0)
    return FilterBank(2, 1, ({0: h, 1: h}, {0: h, 1: -h}))


def high_pass_from_low(low: Mapping[int, complex] | Sequence[complex], d: int) -> Coeffs:
    """``b_k = (-1)^k conj(a_{2d-1-k})``; for real input this is the usual mirror."""
    a = _as_coeffs(low)
    top = 2 * d - 1
    bad = [n for n, c in a.items() if c != 0 and not 0 <= n <= top]
    if bad:
        raise ValueError(f"low-pass support {sorted(bad)} outside 0..{top}")
    out = {}
    for k in range(top + 1):
        if top - k in a:
            c = a[top - k].conjugate()
            out[k] = -c if k % 2 else c
    return out


def substitute_odd(bank: FilterBank, p: int) -> FilterBank:
    """Replace ``z`` by ``z^(2p+1)`` in every filter."""
    if bank.scale != 2:
        raise ValueError("substitution is defined for scale-2 banks")
    if p < 1:
        raise ValueError("p must be a positive integer")
    q = 2 * p + 1
    rows = tuple({q * n: c for n, c in r.items()} for r in bank.rows)
    top = max(max(r) for r in rows if r)
    return FilterBank(2, (top + 1) // 2, rows)


def reflect_theta(bank: FilterBank) -> FilterBank:
    """Reverse the low-pass coefficients: ``(a0,a1,a2,a3) -> (a3,a2,a1,a0)``."""
    if bank.scale != 2 or bank.genus != 2 or not bank.is_real():
        raise ValueError("reflect_theta expects a real genus-2 scale-2 bank")
    if any(not 0 <= n <= 3 for n in bank.low):
        raise ValueError("low-pass support must lie in 0..3")
    low = {3 - n: c for n, c in bank.low.items()}
    return FilterBank(2, 2, (low, high_pass_from_low(low, 2)))


def evaluate(bank: FilterBank, j: int, z: complex, tol: float = 1e-12) -> complex:
    if abs(abs(z) - 1.0) > tol:
        raise ValueError(f"z must lie on the unit circle, |z| = {abs(z)!r}")
    return complex(sum(c * z**n for n, c in bank.rows[j].items()))


def _row_values(row: Coeffs, z: np.ndarray) -> np.ndarray:
    out = np.zeros_like(z, dtype=complex)
    for n, c in sorted(row.items()):
        out += c * z**n
    return out


# -- validation ---------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    norm: float
    shift: float
    cross: float
    normalization: float
    tol: float = DEFAULT_TOL

    @property
    def orthogonality(self) -> float:
        return max(self.norm, self.shift, self.cross)

    @property
    def max_residual(self) -> float:
        return max(self.orthogonality, self.normalization)

    @property
    def ok(self) -> bool:
        return self.max_residual < self.tol

    def to_json(self) -> dict:
        return {
            "norm": self.norm,
            "shift": self.shift,
            "cross": self.cross,
            "normalization": self.normalization,
            "max_residual": self.max_residual,
            "tol": self.tol,
            "ok": self.ok,
        }


def _lag_sum(ri: Coeffs, rj: Coeffs, s: int) -> complex:
    return sum((c * rj[n - s].conjugate() for n, c in ri.items() if n - s in rj), 0j)


def _lags(bank: FilterBank) -> range:
    sup = bank.support or [0]
    span = (max(sup) - min(sup)) // bank.scale
    return range(-span, span + 1)


def validate(bank: FilterBank, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Residuals of the orthonormality and normalization conditions."""
    N = bank.scale
    norm = shift = cross = 0.0
    for i, ri in enumerate(bank.rows):
        for j, rj in enumerate(bank.rows):
            for m in _lags(bank):
                r = _lag_sum(ri, rj, m * N)
                if i == j and m == 0:
                    norm = max(norm, abs(r - 1))
                elif i == j:
                    shift = max(shift, abs(r))
                else:
                    cross = max(cross, abs(r))
    normalization = abs(sum(bank.low.values()) - math.sqrt(N))
    return ValidationReport(norm, shift, cross, normalization, tol)


def require_valid(bank: FilterBank, tol: float = DEFAULT_TOL) -> ValidationReport:
    report = validate(bank, tol)
    if not report.ok:
        raise InvalidFilterError(
            f"filter bank fails validation (max residual {report.max_residual:.3g})", report
        )
    return report


def polyphase_matrix(bank: FilterBank, z: complex | Iterable[complex]) -> np.ndarray:
    """``M(z)[j, k] = m_j(rho^k z) / sqrt(N)`` with ``rho = exp(2 pi i / N)``."""
    N = bank.scale
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    rho = np.exp(2j * np.pi * np.arange(N) / N)
    pts = z[:, None] * rho[None, :]
    out = np.empty((len(z), N, N), dtype=complex)
    for j, row in enumerate(bank.rows):
        out[:, j, :] = _row_values(row, pts)
    return out / math.sqrt(N)


def unitarity_check(bank: FilterBank, samples: int = 256) -> float:
    """Max over ``z = exp(2 pi i (s + 1/2) / samples)`` of ``||M M* - I||_2``."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    z = np.exp(2j * np.pi * (np.arange(samples) + 0.5) / samples)
    M = polyphase_matrix(bank, z)
    G = M @ np.conj(np.swapaxes(M, 1, 2)) - np.eye(bank.scale)
    return float(np.max(np.linalg.norm(G, ord=2, axis=(1, 2))))
