"""Cascade approximations of scaling and wavelet functions.

Samples live on the dyadic grid ``x_i = i 2^{-L}``, ``0 <= i <= W 2^L`` where
``W`` is the top exponent of the low-pass filter. The two-scale step
``phi(x) -> sqrt(2) sum_k a_k phi(2x - k)`` maps grid points to grid points,
so every iterate is computed exactly at the nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .filters import FilterBank, reflect_theta

__all__ = [
    "CascadeResult",
    "CorrelationVector",
    "DiscrepancyReport",
    "MirrorReport",
    "cascade_father",
    "cascade_mother",
    "mallat_product",
    "sampled_fourier",
    "step_function_samples",
    "correlation_coeffs",
    "discrepancy_check",
    "mirror_check",
    "pairing",
]

DEFAULT_LEVEL = 8
DEFAULT_ITERATIONS = 10


@dataclass(frozen=True)
class CascadeResult:
    level: int
    support: tuple[int, int]
    samples_phi: np.ndarray
    samples_psi: np.ndarray | None = None
    iterations: int | None = None

    @property
    def step(self) -> float:
        return 2.0 ** -self.level

    @property
    def x(self) -> np.ndarray:
        return np.arange(len(self.samples_phi)) * self.step

    def integral(self) -> float | complex:
        """Left Riemann sum of ``phi`` over the support."""
        return self.step * np.sum(self.samples_phi[:-1])

    def with_psi(self, psi: np.ndarray) -> "CascadeResult":
        return CascadeResult(self.level, self.support, self.samples_phi, psi, self.iterations)


def _check_scale2_real(bank: FilterBank) -> None:
    if bank.scale != 2:
        raise ValueError("the cascade algorithm is implemented for scale 2")
    if not bank.is_real():
        raise ValueError("the cascade algorithm expects real coefficients")
    if any(n < 0 for r in bank.rows for n in r):
        raise ValueError("filter exponents must be non-negative")


def _two_scale(coeffs: dict[int, float], phi: np.ndarray, level: int) -> np.ndarray:
    """``out[i] = sqrt(2) sum_k c_k phi[2i - k 2^L]`` with zero outside the grid."""
    n = len(phi)
    out = np.zeros(n, dtype=phi.dtype)
    shift = 1 << level
    for k, c in sorted(coeffs.items()):
        if c == 0:
            continue
        off = k * shift
        # valid i: 0 <= 2i - off <= n - 1
        lo = max(0, -(-off // 2))
        hi = min(n - 1, (n - 1 + off) // 2)
        if lo > hi:
            continue
        out[lo : hi + 1] += (math.sqrt(2) * c) * phi[2 * lo - off : 2 * hi - off + 1 : 2]
    return out


def _width(bank: FilterBank) -> int:
    return max(max(bank.low), 1)


def cascade_father(
    bank: FilterBank,
    iterations: int = DEFAULT_ITERATIONS,
    level: int = DEFAULT_LEVEL,
    initial: np.ndarray | None = None,
) -> CascadeResult:
    """Iterate the two-scale relation from ``chi_[0,1)`` (or ``initial``).

    The result also carries the wavelet samples built from the final iterate.
    """
    _check_scale2_real(bank)
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    if level < 3:
        raise ValueError("level must be at least 3")
    W = _width(bank)
    n = W * (1 << level) + 1
    if initial is None:
        phi = np.zeros(n)
        phi[: 1 << level] = 1.0
    else:
        phi = np.array(initial, dtype=float)
        if phi.shape != (n,):
            raise ValueError(f"initial samples must have length {n}")
    coeffs = {k: c.real for k, c in bank.low.items()}
    for _ in range(iterations):
        phi = _two_scale(coeffs, phi, level)
    father = CascadeResult(level, (0, W), phi, None, iterations)
    return father.with_psi(cascade_mother(bank, father))


def cascade_mother(bank: FilterBank, father: CascadeResult) -> np.ndarray:
    """``psi(x) = sqrt(2) sum_k b_k phi(2x - k)`` on the father's grid."""
    _check_scale2_real(bank)
    if father.support != (0, _width(bank)):
        raise ValueError("father samples are on a different grid")
    coeffs = {k: c.real for k, c in bank.rows[1].items()}
    return _two_scale(coeffs, np.asarray(father.samples_phi), father.level)


def step_function_samples(
    level: int, width: int, pieces: Sequence[tuple[float, float, float]]
) -> CascadeResult:
    """Grid samples of ``sum value * chi_[a, b)`` for ``(a, b, value)`` pieces."""
    x = np.arange(width * (1 << level) + 1) * 2.0**-level
    phi = np.zeros_like(x)
    for a, b, v in pieces:
        phi[(x >= a) & (x < b)] += v
    return CascadeResult(level, (0, width), phi, None, None)


def pairing(result: CascadeResult, a: float, b: float) -> float:
    """``integral phi * chi_[a, b)`` by the left Riemann sum."""
    x = result.x[:-1]
    mask = (x >= a) & (x < b)
    return float(result.step * np.sum(result.samples_phi[:-1][mask]))


# -- frequency side ---------------------------------------------------------


def _filter_at(row: dict[int, complex], omega: np.ndarray) -> np.ndarray:
    out = np.zeros(omega.shape, dtype=complex)
    for n, c in sorted(row.items()):
        out += c * np.exp(-1j * n * omega)
    return out


def mallat_product(bank: FilterBank, omega, terms: int = 30) -> tuple[np.ndarray, np.ndarray]:
    """Truncated infinite products for ``phi_hat`` and ``psi_hat``.

    ``phi_hat(w) = (2 pi)^{-1/2} prod_{k=1}^{K} m_0(w / 2^k) / sqrt(2)`` with
    ``m(w) = sum a_n e^{-i n w}``; ``psi_hat`` replaces the first factor by
    ``m_1(w / 2) / sqrt(2)``.
    """
    if terms < 1:
        raise ValueError("terms must be at least 1")
    if bank.scale != 2:
        raise ValueError("the product formula is implemented for scale 2")
    w = np.asarray(omega, dtype=float)
    tail = np.ones(w.shape, dtype=complex)
    for k in range(2, terms + 1):
        tail *= _filter_at(bank.low, w / 2**k) / math.sqrt(2)
    c = 1 / math.sqrt(2 * math.pi)
    phi = c * _filter_at(bank.low, w / 2) / math.sqrt(2) * tail
    psi = c * _filter_at(bank.rows[1], w / 2) / math.sqrt(2) * tail
    return phi, psi


def sampled_fourier(result: CascadeResult, omega, which: str = "phi") -> np.ndarray:
    """``(2 pi)^{-1/2} int f(x) e^{-i w x} dx`` of the samples by the left Riemann sum."""
    f = result.samples_phi if which == "phi" else result.samples_psi
    if f is None:
        raise ValueError(f"no {which} samples in this result")
    w = np.asarray(omega, dtype=float)
    x = result.x[:-1]
    ker = np.exp(-1j * np.outer(w, x))
    return result.step * (ker @ f[:-1]) / math.sqrt(2 * math.pi)


# -- correlation coefficients ---------------------------------------------


@dataclass(frozen=True)
class CorrelationVector:
    c: dict[int, float | complex]

    @property
    def sum_sq(self) -> float:
        return float(sum(abs(v) ** 2 for v in self.c.values()))

    def to_json(self) -> dict:
        return {str(k): [complex(v).real, complex(v).imag] for k, v in sorted(self.c.items())}


def correlation_coeffs(father: CascadeResult) -> CorrelationVector:
    """``c_k = (1/sqrt 2) int conj(phi(x - k)) phi(x / 2) dx``.

    After ``x = 2y`` this is ``sqrt(2) int conj(phi(2y - k)) phi(y) dy``, taken
    as a left Riemann sum over the grid nodes ``y_i``; the nodes ``2 y_i - k``
    are grid nodes too, so no interpolation is involved. The sum is exact for
    step functions with breaks at multiples of ``2^{-L+1}``.
    """
    if father.level < 6:
        raise ValueError("correlation quadrature needs level >= 6")
    phi = np.asarray(father.samples_phi)
    n = len(phi)
    W = father.support[1]
    shift = 1 << father.level
    h = father.step
    out = {}
    for k in range(-(W - 1), 2 * W):
        off = k * shift
        lo = max(0, -(-off // 2))
        hi = min(n - 2, (n - 1 + off) // 2)  # left sum: last node excluded
        if lo > hi:
            out[k] = 0.0
            continue
        shifted = phi[2 * lo - off : 2 * hi - off + 1 : 2]
        val = math.sqrt(2) * h * np.sum(np.conj(shifted) * phi[lo : hi + 1])
        out[k] = val.item()
    return CorrelationVector(out)


@dataclass(frozen=True)
class DiscrepancyReport:
    sum_sq: float
    bound: float
    holds: bool
    applicable: bool

    def to_json(self) -> dict:
        return dict(sum_sq=self.sum_sq, bound=self.bound, holds=self.holds, applicable=self.applicable)


def discrepancy_check(c: CorrelationVector, p: int, slack: float = 1e-6) -> DiscrepancyReport:
    """Compare ``sum |c_k|^2`` with ``1/(2p+1)``; ``p = 0`` is flagged not applicable."""
    if p < 0:
        raise ValueError("p must be non-negative")
    s = c.sum_sq
    bound = 1.0 / (2 * p + 1)
    return DiscrepancyReport(s, bound, s <= bound + slack, p >= 1)


# -- mirror symmetry ----------------------------------------------------------


@dataclass(frozen=True)
class MirrorReport:
    phi: float
    psi: float

    @property
    def max(self) -> float:
        return max(self.phi, self.psi)


def mirror_check(
    bank: FilterBank,
    level: int = DEFAULT_LEVEL,
    iterations: int = DEFAULT_ITERATIONS,
    reflected_seed: bool = True,
) -> MirrorReport:
    """Deviation from ``phi'(x) = phi(3 - x)`` and ``psi'(x) = -psi(3 - x)``.

    ``phi'`` and ``psi'`` come from the reversed filter. With ``reflected_seed``
    the reversed cascade starts from ``chi_[0,1)(3 - x)``, the mirror image of
    the default seed, and the identities hold at every iteration; otherwise
    both cascades start from ``chi_[0,1)`` and the deviation measures how far
    the iterates are from their common limit symmetry.
    """
    mirrored = reflect_theta(bank)
    fa = cascade_father(bank, iterations, level)
    seed = None
    if reflected_seed:
        seed = np.zeros(len(fa.samples_phi))
        seed[: 1 << level] = 1.0
        seed = seed[::-1]
    fb = cascade_father(mirrored, iterations, level, initial=seed)
    psi_a, psi_b = fa.samples_psi, fb.samples_psi
    dphi = float(np.max(np.abs(fb.samples_phi - fa.samples_phi[::-1])))
    dpsi = float(np.max(np.abs(psi_b + psi_a[::-1])))
    return MirrorReport(dphi, dpsi)
