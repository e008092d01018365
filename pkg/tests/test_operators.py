import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cuntzwave.cuntz_rep import build_V
from cuntzwave.filters import FilterBank, from_theta, haar, substitute_odd
from cuntzwave.operators import (
    SettleError,
    Signal,
    TrigPoly,
    apply_S,
    apply_S_star,
    intertwiner_U,
    random_trig_poly,
    reflect_W,
    settle_bound,
    settle_length,
    subband_analyze,
    subband_synthesize,
    verify_cuntz,
)

R2 = math.sqrt(2)
angles = st.floats(min_value=0.0, max_value=2 * math.pi, allow_nan=False)
polys = st.dictionaries(
    st.integers(-12, 12),
    st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    max_size=8,
).map(TrigPoly)


def haar3():
    w = np.exp(2j * np.pi / 3)
    return FilterBank(3, 1, tuple({k: w ** (j * k) / math.sqrt(3) for k in range(3)} for j in range(3)))


# -- TrigPoly ----------------------------------------------------------------------


def test_trig_poly_algebra():
    p = TrigPoly({0: 1, 2: 0, -1: 2j})
    assert p.support == [-1, 0]
    assert (p - p) == TrigPoly() and not (p - p)
    assert (2 * p)[-1] == 4j and (-p)[0] == -1
    assert p.inner(TrigPoly.monomial(-1)) == -2j
    assert p.norm() == pytest.approx(math.sqrt(5))
    assert p.dense() == (-1, pytest.approx(np.array([2j, 1])))
    assert TrigPoly.from_json(p.to_json()) == p


def test_signal_csv_round_trip():
    rng = np.random.default_rng(1)
    x = Signal({k: complex(*rng.normal(size=2)) for k in range(-3, 5)})
    assert Signal.from_csv(x.to_csv()) == x


def test_signal_csv_variants():
    assert Signal.from_csv("0,1\n1,2,0.5\n\n") == Signal({0: 1, 1: 2 + 0.5j})
    for bad in ["0,1\n0,2\n", "x,1\n", "0\n", "0,1,2,3\n"]:
        with pytest.raises(ValueError):
            Signal.from_csv(bad)


# -- the isometries ------------------------------------------------------------------


def test_haar_transform():
    h = haar()
    assert apply_S(h, 0, TrigPoly.monomial(1)) == TrigPoly({2: 1 / R2, 3: 1 / R2})
    assert apply_S(h, 1, TrigPoly.monomial(-1)) == TrigPoly({-2: 1 / R2, -1: -1 / R2})
    assert apply_S_star(h, 0, TrigPoly.monomial(3)) == TrigPoly({1: 1 / R2})
    assert apply_S_star(h, 1, TrigPoly.monomial(2)) == TrigPoly({1: 1 / R2})
    assert apply_S_star(h, 1, TrigPoly.monomial(3)) == TrigPoly({1: -1 / R2})


def test_three_half_pi_transform():
    b = from_theta("3pi/2")
    got = apply_S(b, 0, TrigPoly.monomial(2))
    assert got.max_abs_diff(TrigPoly({5: 1 / R2, 6: 1 / R2})) < 1e-16
    got = apply_S_star(b, 0, TrigPoly.monomial(0))
    assert got.max_abs_diff(TrigPoly({0: 0, -1: 1 / R2})) < 1e-16


@settings(max_examples=60, deadline=None)
@given(angles, polys, polys, st.integers(0, 1))
def test_adjointness(theta, f, g, j):
    b = from_theta(theta)
    lhs = apply_S(b, j, f).inner(g)
    rhs = f.inner(apply_S_star(b, j, g))
    assert abs(lhs - rhs) < 1e-12 * (1 + f.norm() * g.norm())


@settings(max_examples=40, deadline=None)
@given(angles, polys, st.integers(0, 1))
def test_S_is_isometric(theta, f, j):
    b = from_theta(theta)
    assert abs(apply_S(b, j, f).norm() - f.norm()) < 1e-12 * (1 + f.norm())


@pytest.mark.parametrize(
    "bank", [haar(), from_theta(0.3), from_theta("pi/2"), from_theta("7pi/6"), substitute_odd(haar(), 3), haar3()],
    ids=["haar", "0.3", "pi/2", "7pi/6", "sub3", "haar3"],
)
def test_cuntz_relations(bank):
    rep = verify_cuntz(bank, trials=20, support_radius=10, seed=4)
    assert rep.max_residual < 1e-13 and rep.seed == 4 and rep.trials == 20


def test_verify_cuntz_detects_broken_bank():
    b = from_theta(1.0)
    rows = [dict(r) for r in b.rows]
    rows[0][0] += 1e-3
    assert verify_cuntz(FilterBank(2, 2, tuple(rows)), trials=3).max_residual > 1e-4


def test_random_trig_poly():
    rng = np.random.default_rng(0)
    p = random_trig_poly(rng, 3, Signal)
    assert isinstance(p, Signal) and p.support == list(range(-3, 4))
    assert all(abs(c.real) <= 1 and c.imag == 0 for _, c in p)


def test_compression_matches_V():
    b = from_theta(2.4)
    s = build_V(b)
    H = s.basis.H
    for j in range(2):
        for col, n in enumerate(H):
            got = apply_S_star(b, j, TrigPoly.monomial(n))
            for row, m in enumerate(H):
                assert got[m] == s.V_star[j][row, col]
            assert set(got.support) <= set(H)


# -- settling -----------------------------------------------------------------------


def test_settle_examples():
    b = from_theta(1.0)
    assert settle_length(b, 0) == 0
    assert settle_length(b, -3) == 0
    assert settle_length(b, 10) == 4
    assert settle_length(b, 10, H=range(-3, 4)) == 2 <= settle_bound(b, 10) == 3
    assert settle_length(b, 100, H=range(-3, 4)) <= settle_bound(b, 100) == 7


def test_settle_bound_near_ball():
    # |n| / 2^k + 3 (1 - 2^-k) drops below 4 only at k = 4 for n = -11
    b = from_theta(0.0)
    assert settle_length(b, -11, H=range(-3, 4)) == 4 == settle_bound(b, -11)


@settings(max_examples=50, deadline=None)
@given(angles, st.integers(-500, 500))
def test_settle_within_bound(theta, n):
    b = from_theta(theta)
    assert settle_length(b, n, H=range(-3, 4)) <= settle_bound(b, n)


def test_settle_haar():
    h = haar()
    assert settle_length(h, 0) == 0 and settle_length(h, 1) == 1
    assert settle_bound(h, 0) == 0


def test_settle_gives_up():
    with pytest.raises(SettleError):
        settle_length(from_theta(1.0), 10**6, H=[], max_depth=3)


# -- subband filtering -------------------------------------------------------------


@pytest.mark.parametrize("bank", [haar(), from_theta(0.7), from_theta("7pi/6"), haar3()], ids=["haar", "0.7", "7pi/6", "haar3"])
def test_perfect_reconstruction(bank):
    rng = np.random.default_rng(9)
    x = Signal({k: complex(*rng.normal(size=2)) for k in range(-5, 17)})
    y = subband_synthesize(bank, subband_analyze(bank, x))
    assert y.max_abs_diff(x) < 1e-13


def test_analysis_is_S_star():
    b = from_theta(5.1)
    x = random_trig_poly(np.random.default_rng(2), 9, Signal)
    for j, band in enumerate(subband_analyze(b, x)):
        assert band.max_abs_diff(apply_S_star(b, j, x)) < 1e-14


def test_synthesis_is_S():
    b = from_theta(5.1)
    rng = np.random.default_rng(3)
    bands = [random_trig_poly(rng, 4, Signal) for _ in range(2)]
    want = apply_S(b, 0, bands[0]) + apply_S(b, 1, bands[1])
    assert subband_synthesize(b, bands).max_abs_diff(want) < 1e-14


def test_subband_edge_cases():
    b = haar()
    assert subband_analyze(b, Signal()) == [Signal(), Signal()]
    with pytest.raises(ValueError):
        subband_synthesize(b, [Signal()])


def test_energy_preserved():
    b = from_theta(2.0)
    x = random_trig_poly(np.random.default_rng(5), 15, Signal)
    e = sum(band.norm() ** 2 for band in subband_analyze(b, x))
    assert abs(e - x.norm() ** 2) < 1e-12


# -- intertwiners ----------------------------------------------------------------


def test_W_and_U_maps():
    assert reflect_W(TrigPoly({0: 1, 1: 2})) == TrigPoly({-3: 1, -4: 2})
    assert intertwiner_U(TrigPoly({0: 1, -2: 5})) == TrigPoly({-6: 1, 0: 5})


@settings(max_examples=40, deadline=None)
@given(angles, polys)
def test_W_intertwines_reflection(theta, f):
    # W S_j(theta) = (-1)^j S_j(pi - theta) W
    a, b = from_theta(theta), from_theta(math.pi - theta)
    for j in range(2):
        lhs = reflect_W(apply_S(a, j, f))
        rhs = apply_S(b, j, reflect_W(f)) * (-1) ** j
        assert lhs.max_abs_diff(rhs) < 1e-12 * (1 + f.norm())


@settings(max_examples=40, deadline=None)
@given(polys)
def test_U_intertwines_singular_pair(f):
    # U S_j(3pi/2) = S_j(pi/2) U
    a, b = from_theta("3pi/2"), from_theta("pi/2")
    for j in range(2):
        lhs = intertwiner_U(apply_S(a, j, f))
        rhs = apply_S(b, j, intertwiner_U(f))
        assert lhs.max_abs_diff(rhs) < 1e-12 * (1 + f.norm())


def test_W_is_involution():
    f = TrigPoly({-2: 1, 5: 3j})
    assert reflect_W(reflect_W(f)) == f
