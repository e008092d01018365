"""Finite-dimensional compressions of the Cuntz representation.

For a bank with support ``D`` the adjoints ``S_j*`` leave a finite span of
monomials ``K = span{e_n : n in H}`` invariant. Their compressions ``V_j*`` to
``K`` determine the commutant of the representation through the fixed points
of the transfer map ``sigma(A) = sum_j V_j A V_j*``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .filters import FilterBank, InvalidFilterError, require_valid

__all__ = [
    "CorrelationSpace",
    "IsometrySystem",
    "SpectrumReport",
    "RepresentationClassification",
    "PeripheralSpectrumError",
    "compute_H",
    "norm_ball_H",
    "build_V",
    "build_sigma",
    "build_rho",
    "genus2_rho_blocks",
    "apply_map",
    "fixed_space_basis",
    "echelon_basis",
    "spectrum",
    "classify",
    "intertwiner_basis",
    "intertwiner_space_dim",
    "state_eval",
    "k0_invariance_check",
]

CLUSTER_TOL = 1e-9
RANK_TOL = 1e-9
UNIT_TOL = 1e-9
ROOT_TOL = 1e-7
CUNTZ_TOL = 1e-9


class PeripheralSpectrumError(RuntimeError):
    """Peripheral eigenvalues do not form a finite cyclic group."""


@dataclass(frozen=True)
class CorrelationSpace:
    """Exponents spanning ``K``, in basis order (descending: e_0, e_-1, ...)."""

    H: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.H)

    def index(self, n: int) -> int:
        return self.H.index(n)

    def __contains__(self, n: int) -> bool:
        return n in self.H


def compute_H(D: Iterable[int], N: int) -> CorrelationSpace:
    """Integer points of the attractor of the maps ``x -> (x - p) / N``.

    Starts from the integers in the hull of the attractor and repeatedly
    discards points with no preimage branch ``N n + p`` (``p`` in ``D``) left
    in the set. What survives is the largest set ``Y`` with
    ``Y ⊂ ⋃_p σ_p(Y)`` on the integers, which is ``X ∩ Z``.
    """
    D = sorted(set(int(p) for p in D))
    if not D:
        raise ValueError("support D must be nonempty")
    if N < 2:
        raise ValueError("scale N must be at least 2")
    lo = math.ceil(-max(D) / (N - 1))
    hi = math.floor(-min(D) / (N - 1))
    pts = set(range(lo, hi + 1))
    while True:
        keep = {n for n in pts if any(N * n + p in pts for p in D)}
        if keep == pts:
            break
        pts = keep
    return CorrelationSpace(tuple(sorted(pts, reverse=True)))


def norm_ball_H(D: Iterable[int], N: int) -> CorrelationSpace:
    """Integers with ``|n| <= r``, ``r = max|p| / (N - 1)``: a cruder invariant set."""
    D = list(D)
    if not D:
        raise ValueError("support D must be nonempty")
    r = max(abs(p) for p in D) / (N - 1)
    k = math.floor(r)
    return CorrelationSpace(tuple(range(k, -k - 1, -1)))


@dataclass(frozen=True)
class IsometrySystem:
    V_star: tuple[np.ndarray, ...]
    basis: CorrelationSpace

    @property
    def V(self) -> tuple[np.ndarray, ...]:
        return tuple(v.conj().T for v in self.V_star)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def cuntz_residual(self) -> float:
        """``||sum_i V_i V_i* - I||_2``."""
        total = sum(v.conj().T @ v for v in self.V_star)
        return float(np.linalg.norm(total - np.eye(self.dim), 2))


def build_V(bank: FilterBank, space: CorrelationSpace | None = None, check: bool = True) -> IsometrySystem:
    """``V_j* e_n = sum_{m in H} conj(a_{n - N m}) e_m``."""
    if check:
        require_valid(bank)
    N = bank.scale
    if space is None:
        space = compute_H(bank.support, N)
    pos = {n: i for i, n in enumerate(space.H)}
    mats = []
    for row in bank.rows:
        M = np.zeros((len(space), len(space)), dtype=complex)
        for n, c in pos.items():
            for p, a in row.items():
                if a == 0 or (n - p) % N:
                    continue
                m = (n - p) // N
                if m not in pos:
                    raise ValueError(f"span of H is not invariant: S* e_{n} reaches e_{m}")
                M[pos[m], c] += np.conj(a)
        mats.append(M)
    return IsometrySystem(tuple(mats), space)


def build_rho(sys_W: IsometrySystem, sys_V: IsometrySystem) -> np.ndarray:
    """Matrix of ``A -> sum_i W_i A V_i*`` on row-major ``vec(A)``.

    ``A`` has shape ``(dim W, dim V)``; the matrix is ``sum_i kron(W_i, conj(V_i))``.
    """
    if len(sys_W.V_star) != len(sys_V.V_star):
        raise ValueError("systems have different numbers of isometries")
    out = 0
    for w_star, v_star in zip(sys_W.V_star, sys_V.V_star):
        out = out + np.kron(w_star.conj().T, v_star.T)
    return np.asarray(out)


def build_sigma(sys: IsometrySystem) -> np.ndarray:
    return build_rho(sys, sys)


def genus2_rho_blocks(a: Sequence[float], b: Sequence[float]) -> np.ndarray:
    """``rho`` for two genus-2 real banks assembled block by block.

    ``a`` are the low-pass coefficients defining ``V`` and ``b`` those of
    ``W``. Block ``(r, p)`` of the 16x16 matrix is ``sum_i w^{(i)}_{2p-r} V_i``,
    which gives the pattern::

        [A0 A2 0  0 ]
        [0  A1 A3 0 ]
        [0  A0 A2 0 ]
        [0  0  A1 A3]
    """
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    # V_1* in the basis e0, e-1, e-2, e-3; entry (r, c) is the coefficient at 2r - c
    def vstar(c):
        M = np.zeros((4, 4))
        for r in range(4):
            for col in range(4):
                k = 2 * r - col
                if 0 <= k <= 3:
                    M[r, col] = c[k]
        return M

    hi = [(-1) ** k * a[3 - k] for k in range(4)]
    V0, V1 = vstar(a).T, vstar(hi).T
    A = [
        b[0] * V0 + b[3] * V1,
        b[1] * V0 - b[2] * V1,
        b[2] * V0 + b[1] * V1,
        b[3] * V0 - b[0] * V1,
    ]
    Z = np.zeros((4, 4))
    layout = [
        [A[0], A[2], Z, Z],
        [Z, A[1], A[3], Z],
        [Z, A[0], A[2], Z],
        [Z, Z, A[1], A[3]],
    ]
    return np.block(layout)


def apply_map(M: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Apply a map given in row-major vec form to the matrix ``A``."""
    return (M @ A.reshape(-1)).reshape(A.shape)


def _null_space(M: np.ndarray, tol: float, scale: float) -> np.ndarray:
    _, s, vh = np.linalg.svd(M)
    thresh = tol * max(scale, 1.0)
    rank = int(np.sum(s > thresh))
    return vh[rank:].conj().T


def fixed_space_basis(M: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of ``ker(M - I)``."""
    M = np.asarray(M)
    return _null_space(M - np.eye(M.shape[0]), tol, np.linalg.norm(M, 2))


def echelon_basis(B: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Reduced column-echelon form of the column span of ``B``.

    Each column gets a pivot entry equal to 1 where the other columns vanish,
    which makes the basis independent of the SVD's arbitrary rotation.
    Entries below ``tol`` after elimination are set to zero.
    """
    R = np.array(B, dtype=complex).T
    k, n = R.shape
    row, pivots = 0, []
    for col in range(n):
        if row == k:
            break
        p = row + int(np.argmax(np.abs(R[row:, col])))
        if abs(R[p, col]) <= tol:
            continue
        R[[row, p]] = R[[p, row]]
        R[row] /= R[row, col]
        for r in range(k):
            if r != row:
                R[r] -= R[r, col] * R[row]
        pivots.append(col)
        row += 1
    R[np.abs(R) <= tol] = 0
    return R[:row].T


# -- spectra --------------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: tuple[tuple[complex, int], ...]
    fixed_space_dim: int
    peripheral_group_order: int | None
    spectral_radius: float

    def multiplicity(self, value: complex, tol: float = CLUSTER_TOL) -> int:
        return sum(m for v, m in self.eigenvalues if abs(v - value) <= tol)

    def to_json(self) -> dict:
        return {
            "eigenvalues": [
                {"re": v.real, "im": v.imag, "mult": m} for v, m in self.eigenvalues
            ],
            "fixed_space_dim": self.fixed_space_dim,
            "peripheral_group_order": self.peripheral_group_order,
            "spectral_radius": self.spectral_radius,
        }


def _cluster(values: np.ndarray, tol: float) -> list[tuple[complex, int]]:
    """Single-linkage clusters of nearby eigenvalues, represented by their means."""
    order = sorted(range(len(values)), key=lambda i: (values[i].real, values[i].imag))
    groups: list[list[complex]] = []
    for i in order:
        v = complex(values[i])
        for g in groups:
            if any(abs(v - u) <= tol for u in g):
                g.append(v)
                break
        else:
            groups.append([v])
    # merge groups that became linked through later members
    merged = True
    while merged:
        merged = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                if any(abs(u - v) <= tol for u in groups[i] for v in groups[j]):
                    groups[i] += groups.pop(j)
                    merged = True
                    break
            if merged:
                break
    out = []
    for g in groups:
        mean = complex(np.mean(g))
        # clean signed zeros and negligible parts so reports are stable
        re = 0.0 if abs(mean.real) <= tol else mean.real
        im = 0.0 if abs(mean.imag) <= tol else mean.imag
        out.append((complex(re, im), len(g)))
    out.sort(key=lambda vm: (-abs(vm[0]), math.atan2(vm[0].imag, vm[0].real)))
    return out


def spectrum(
    M: np.ndarray,
    cluster_tol: float = CLUSTER_TOL,
    rank_tol: float = RANK_TOL,
    check_peripheral: bool = True,
) -> SpectrumReport:
    """Clustered eigenvalues, ``dim ker(M - I)`` and the peripheral group order.

    The peripheral spectrum is the set of distinct eigenvalues within
    ``UNIT_TOL`` of the spectral radius; with ``check_peripheral`` they must be
    ``k``-th roots of unity for ``k`` their number, otherwise
    ``PeripheralSpectrumError`` is raised.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("spectrum needs a square matrix")
    eig = np.linalg.eigvals(M)
    clusters = _cluster(eig, cluster_tol)
    radius = max((abs(v) for v, _ in clusters), default=0.0)
    fixed = fixed_space_basis(M, rank_tol).shape[1]
    peripheral = [v for v, _ in clusters if abs(v) >= radius - UNIT_TOL]
    k: int | None = len(peripheral)
    if check_peripheral:
        if abs(radius - 1.0) > UNIT_TOL:
            raise PeripheralSpectrumError(f"spectral radius {radius!r} is not 1")
        bad = [v for v in peripheral if abs(v ** k - 1) > ROOT_TOL]
        if bad:
            raise PeripheralSpectrumError(
                f"peripheral eigenvalues {bad} are not {k}-th roots of unity"
            )
    return SpectrumReport(tuple(clusters), fixed, k, float(radius))


# -- classification ----------------------------------------------------------


@dataclass(frozen=True)
class RepresentationClassification:
    irreducible: bool
    commutant_dim: int
    num_irreducible_summands: int | None
    uhf_summands: int | None
    peripheral_group_order: int
    summand_orders: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        return {
            "irreducible": self.irreducible,
            "commutant_dim": self.commutant_dim,
            "num_irreducible_summands": self.num_irreducible_summands,
            "uhf_summands": self.uhf_summands,
            "peripheral_group_order": self.peripheral_group_order,
            "summand_peripheral_orders": (
                list(self.summand_orders) if self.summand_orders is not None else None
            ),
        }


def _checked_system(bank: FilterBank) -> IsometrySystem:
    sys = build_V(bank)
    res = sys.cuntz_residual()
    if res > CUNTZ_TOL:
        raise InvalidFilterError(f"sum V_i V_i* deviates from I by {res:.3g}")
    return sys


def _minimal_projections(sys: IsometrySystem, basis: np.ndarray) -> list[np.ndarray] | None:
    """Split ``K`` by a generic hermitian fixed point of sigma.

    Returns orthonormal bases of the eigenspaces when each is invariant under
    every ``V_i*`` (so they carry the summands), otherwise ``None``.
    """
    n = sys.dim
    mats = [basis[:, i].reshape(n, n) for i in range(basis.shape[1])]
    weights = [math.sqrt(2 + i) - 1.3 * i for i in range(2 * len(mats))]
    X = np.zeros((n, n), dtype=complex)
    for i, A in enumerate(mats):
        X += weights[2 * i] * (A + A.conj().T) + weights[2 * i + 1] * 1j * (A - A.conj().T)
    w, U = np.linalg.eigh(X)
    scale = max(1.0, float(np.max(np.abs(w))))
    pieces, start = [], 0
    for i in range(1, n + 1):
        if i == n or w[i] - w[i - 1] > 1e-6 * scale:
            pieces.append(U[:, start:i])
            start = i
    if len(pieces) != len(mats):
        return None
    for Q in pieces:
        P = np.eye(n) - Q @ Q.conj().T
        if any(np.linalg.norm(P @ v @ Q) > 1e-8 for v in sys.V_star):
            return None
    return pieces


def classify(bank: FilterBank) -> RepresentationClassification:
    """Commutant dimension, summand count and UHF splitting of the representation."""
    sys = _checked_system(bank)
    report = spectrum(build_sigma(sys))
    dim = report.fixed_space_dim
    k = report.peripheral_group_order
    summands = dim if dim <= 3 else None
    orders: tuple[int, ...] | None = None
    if dim == 1:
        orders = (k,)
    elif summands is not None:
        pieces = _minimal_projections(sys, fixed_space_basis(build_sigma(sys)))
        if pieces is not None:
            found = []
            for Q in pieces:
                sub = IsometrySystem(
                    tuple(Q.conj().T @ v @ Q for v in sys.V_star), CorrelationSpace(tuple(range(Q.shape[1])))
                )
                found.append(spectrum(build_sigma(sub)).peripheral_group_order)
            orders = tuple(sorted(found))
    uhf = sum(orders) if orders is not None else None
    return RepresentationClassification(dim == 1, dim, summands, uhf, k, orders)


def intertwiner_basis(bank_a: FilterBank, bank_b: FilterBank) -> list[np.ndarray]:
    """Fixed points of ``rho(A) = sum W_i A V_i*`` with V from ``bank_a``, W from ``bank_b``."""
    if bank_a.scale != bank_b.scale:
        raise ValueError("banks have different scales")
    sys_v = _checked_system(bank_a)
    sys_w = _checked_system(bank_b)
    basis = fixed_space_basis(build_rho(sys_w, sys_v))
    return [basis[:, i].reshape(sys_w.dim, sys_v.dim) for i in range(basis.shape[1])]


def intertwiner_space_dim(bank_a: FilterBank, bank_b: FilterBank) -> int:
    return len(intertwiner_basis(bank_a, bank_b))


def state_eval(sys: IsometrySystem, xi, I: Sequence[int], J: Sequence[int]) -> complex:
    """``<xi, S_I S_J* xi>`` computed inside ``K`` as ``<V_I* xi, V_J* xi>``.

    ``V_I*`` means ``V_{i_k}* ... V_{i_1}*``, so the letters of a word are
    applied to ``xi`` from first to last.
    """
    xi = np.asarray(xi, dtype=complex)
    if xi.shape != (sys.dim,):
        raise ValueError(f"xi must have length {sys.dim}")
    if abs(np.linalg.norm(xi) - 1) > 1e-12:
        raise ValueError("xi must be a unit vector")
    n = len(sys.V_star)

    def word(letters):
        v = xi
        for i in letters:
            if not 0 <= int(i) < n:
                raise ValueError(f"letter {i} out of range 0..{n - 1}")
            v = sys.V_star[int(i)] @ v
        return v

    return complex(np.vdot(word(I), word(J)))


def k0_invariance_check(sys: IsometrySystem, tol: float = 1e-12) -> bool:
    """Whether the inner span ``e_{-1}, ..., e_{-2d+2}`` is invariant under each ``V_i*``."""
    n = sys.dim
    if n < 4:
        raise ValueError("K0 is only defined for genus d >= 2")
    outer = [0, n - 1]
    return all(np.max(np.abs(v[np.ix_(outer, range(1, n - 1))])) <= tol for v in sys.V_star)
