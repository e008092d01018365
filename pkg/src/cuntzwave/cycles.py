"""Orthonormal basis versus tight frame via cycles of the doubling map.

The translates of the scaling function are orthonormal exactly when the
zero set of ``z -> m_0(-z)`` on the unit circle contains no cycle of
``z -> z^2`` other than ``{1}``. Cycle points are roots of unity of order
``2^k - 1``, so candidates are generated exactly as fractions of a turn and
then matched against the numerically computed zeros.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .filters import FilterBank, require_valid

__all__ = [
    "FrameStatus",
    "Cycle",
    "CycleSet",
    "BorderlineRootWarning",
    "circle_zeros",
    "find_cycles",
    "cycle_set",
    "frame_classify",
]

ON_CIRCLE_TOL = 1e-8
BORDERLINE_TOL = 1e-5
CLUSTER_RADIUS = 1e-3
MATCH_TOL = 1e-8


class BorderlineRootWarning(UserWarning):
    """A root lies near, but not within tolerance of, the unit circle."""


class FrameStatus(str, enum.Enum):
    ORTHONORMAL_BASIS = "orthonormal_basis"
    TIGHT_FRAME_ONLY = "tight_frame_only"


def _turn_point(t: Fraction) -> complex:
    return cmath.exp(2j * math.pi * float(t))


@dataclass(frozen=True)
class Cycle:
    """Points ``exp(2 pi i t)`` for the turns ``t``, listed along ``z -> z^2``."""

    turns: tuple[Fraction, ...]

    @property
    def points(self) -> list[complex]:
        return [_turn_point(t) for t in self.turns]

    @property
    def trivial(self) -> bool:
        return self.turns == (Fraction(0),)

    def __len__(self) -> int:
        return len(self.turns)


@dataclass(frozen=True)
class CycleSet:
    zeros: tuple[complex, ...]
    cycles: tuple[Cycle, ...]

    @property
    def contains_nontrivial(self) -> bool:
        return any(not c.trivial for c in self.cycles)

    def to_json(self) -> dict:
        return {
            "zeros_turns": [_turns_of(z) for z in self.zeros],
            "cycles": [[str(t) for t in c.turns] for c in self.cycles],
            "contains_nontrivial": self.contains_nontrivial,
        }


def _turns_of(z: complex) -> float:
    t = math.atan2(z.imag, z.real) / (2 * math.pi)
    return t + 1.0 if t < 0 else t


def _coeff_map(m0: Mapping[int, complex] | Sequence[complex]) -> dict[int, complex]:
    if isinstance(m0, Mapping):
        return {int(n): complex(c) for n, c in m0.items()}
    return {n: complex(c) for n, c in enumerate(m0)}


def _reflected_poly(m0) -> np.ndarray:
    """Coefficients of ``z^{-lo} m_0(-z)``, highest degree first, trimmed."""
    a = {n: c for n, c in _coeff_map(m0).items() if c != 0}
    if not a:
        raise ValueError("m0 is the zero polynomial")
    lo, hi = min(a), max(a)
    p = np.zeros(hi - lo + 1, dtype=complex)
    for n, c in a.items():
        p[hi - n] = -c if n % 2 else c
    return p


def _polish(p: np.ndarray, roots: np.ndarray) -> list[complex]:
    """Merge nearby roots and refine each cluster of size m on ``p^{(m-1)}``.

    Companion-matrix roots of multiplicity ``m`` scatter by about
    ``eps^{1/m}``; a root of multiplicity ``m`` is a simple root of the
    ``(m-1)``-th derivative, where Newton's method is well conditioned.
    """
    groups: list[list[complex]] = []
    for r in sorted(roots, key=lambda r: (r.real, r.imag)):
        for g in groups:
            if abs(np.mean(g) - r) < CLUSTER_RADIUS:
                g.append(complex(r))
                break
        else:
            groups.append([complex(r)])
    out = []
    for g in groups:
        z = complex(np.mean(g))
        if len(g) > 1:
            q = np.polyder(p, len(g) - 1)
            dq = np.polyder(q)
            for _ in range(8):
                d = np.polyval(dq, z)
                if d == 0:
                    break
                step = np.polyval(q, z) / d
                z -= step
                if abs(step) < 1e-17:
                    break
        out.append(complex(z))
    return out


def circle_zeros(m0, tol: float = ON_CIRCLE_TOL) -> list[complex]:
    """Zeros of ``z -> m_0(-z)`` on the unit circle, ordered by angle.

    Roots at distance between ``tol`` and ``BORDERLINE_TOL`` from the circle
    are not classified; a ``BorderlineRootWarning`` is issued for them.
    """
    p = _reflected_poly(m0)
    roots = np.roots(p) if len(p) > 1 else np.array([], dtype=complex)
    found: list[complex] = []
    for r in _polish(p, roots):
        dist = abs(abs(r) - 1.0)
        if dist < tol:
            if all(abs(r - z) >= tol for z in found):
                found.append(r / abs(r))
        elif dist < BORDERLINE_TOL:
            warnings.warn(
                f"root {r!r} is {dist:.2e} from the unit circle; left unclassified",
                BorderlineRootWarning,
                stacklevel=2,
            )
    return sorted(found, key=_turns_of)


def _orbit(j: int, M: int) -> list[int]:
    out = [j]
    while True:
        j = (2 * j) % M
        if j == out[0]:
            return out
        out.append(j)


def find_cycles(zeros: Iterable[complex], max_len: int | None = None) -> CycleSet:
    """Cycles of ``z -> z^2`` contained in ``zeros``, up to length ``max_len``.

    A zero at turn ``t`` can only lie on a cycle of length ``k`` if ``t`` is a
    multiple of ``1/(2^k - 1)``; for each zero and each ``k`` the nearest such
    fraction is taken, its exact orbit under doubling is formed, and the cycle
    is kept when every member matches a zero within ``MATCH_TOL``.
    """
    zeros = tuple(complex(z) for z in zeros)
    if max_len is None:
        max_len = max(len(zeros), 1)
    if max_len < 1:
        raise ValueError("max_len must be at least 1")

    def matched(t: Fraction) -> bool:
        w = _turn_point(t)
        return any(abs(w - z) < MATCH_TOL for z in zeros)

    seen: set[Fraction] = set()
    cycles = []
    for z in zeros:
        t = _turns_of(z)
        for k in range(1, max_len + 1):
            M = 2**k - 1
            j = round(t * M) % M
            orbit = _orbit(j, M)
            if len(orbit) != k:
                continue
            turns = tuple(Fraction(i, M) for i in orbit)
            if turns[0] in seen or not all(matched(u) for u in turns):
                continue
            # start each cycle at its smallest turn
            s = turns.index(min(turns))
            turns = turns[s:] + turns[:s]
            seen.update(turns)
            cycles.append(Cycle(turns))
    cycles.sort(key=lambda c: (len(c), c.turns))
    return CycleSet(zeros, tuple(cycles))


def cycle_set(bank: FilterBank) -> CycleSet:
    if bank.scale != 2:
        raise ValueError("the cycle criterion applies to scale-2 banks")
    require_valid(bank)
    low = {n: c for n, c in bank.low.items() if c != 0}
    degree = max(low) - min(low)
    return find_cycles(circle_zeros(bank.low), max_len=max(degree, 1))


def frame_classify(bank: FilterBank) -> FrameStatus:
    if cycle_set(bank).contains_nontrivial:
        return FrameStatus.TIGHT_FRAME_ONLY
    return FrameStatus.ORTHONORMAL_BASIS
