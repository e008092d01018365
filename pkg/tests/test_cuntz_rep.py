import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import subspace_angles

from cuntzwave.cuntz_rep import (
    CorrelationSpace,
    PeripheralSpectrumError,
    apply_map,
    build_rho,
    build_sigma,
    build_V,
    classify,
    compute_H,
    echelon_basis,
    fixed_space_basis,
    genus2_rho_blocks,
    intertwiner_basis,
    intertwiner_space_dim,
    k0_invariance_check,
    spectrum,
    state_eval,
)
from cuntzwave.filters import FilterBank, InvalidFilterError, from_theta, haar, substitute_odd

R2 = math.sqrt(2)
angles = st.floats(min_value=0.0, max_value=2 * math.pi, allow_nan=False)


def coeffs(theta):
    b = from_theta(theta)
    return [b.coeff(0, k).real for k in range(4)]


def haar3():
    w = np.exp(2j * np.pi / 3)
    return FilterBank(3, 1, tuple({k: w ** (j * k) / math.sqrt(3) for k in range(3)} for j in range(3)))


def unit(i, j, n=4):
    E = np.zeros((n, n))
    E[i, j] = 1
    return E


def span_angle(vectors, basis):
    A = np.column_stack([np.asarray(v).reshape(-1) for v in vectors])
    return float(np.max(subspace_angles(A, basis)))


# -- correlation space -------------------------------------------------------


@pytest.mark.parametrize(
    "D, N, H",
    [
        ([0, 1, 2, 3], 2, (0, -1, -2, -3)),
        ([0, 1], 2, (0, -1)),
        ([0, 3], 2, (0, -1, -2, -3)),
        ([0, 1, 2, 3, 4, 5], 2, (0, -1, -2, -3, -4, -5)),
        ([0, 1, 2], 3, (0, -1)),
        ([0, 6], 3, (0, -1, -2, -3)),
        ([-1, 0], 2, (1, 0)),
    ],
)
def test_compute_H(D, N, H):
    assert compute_H(D, N).H == H


def test_compute_H_without_integer_orbit():
    assert compute_H([3, -3], 3).H == ()


def test_compute_H_rejects_empty():
    with pytest.raises(ValueError):
        compute_H([], 2)


@settings(max_examples=60)
@given(st.sets(st.integers(-6, 9), min_size=1, max_size=6), st.integers(2, 4))
def test_H_closed_under_branches(D, N):
    # H may be empty when no branch has an integer periodic orbit
    H = set(compute_H(D, N).H)
    lo, hi = -max(D) / (N - 1), -min(D) / (N - 1)
    assert all(lo - 1e-12 <= n <= hi + 1e-12 for n in H)
    for n in H:
        # every point keeps a branch inside H, and integral images stay in H
        assert any(N * n + p in H for p in D)
        for p in D:
            if (n - p) % N == 0:
                assert (n - p) // N in H


# -- isometries ------------------------------------------------------------


def test_haar_V():
    s = build_V(haar())
    assert s.basis.H == (0, -1)
    assert np.array_equal(s.V_star[0], np.diag([1 / R2, 1 / R2]))
    assert np.array_equal(s.V_star[1], np.diag([1 / R2, -1 / R2]))


@pytest.mark.parametrize("theta", [0.4, "7pi/6", "pi/2", 5.5])
def test_family_V_matrices(theta):
    a0, a1, a2, a3 = coeffs(theta)
    V0 = np.array([[a0, 0, 0, 0], [a2, a1, a0, 0], [0, a3, a2, a1], [0, 0, 0, a3]])
    V1 = np.array([[a3, 0, 0, 0], [a1, -a2, a3, 0], [0, -a0, a1, -a2], [0, 0, 0, -a0]])
    s = build_V(from_theta(theta))
    assert np.max(np.abs(s.V_star[0] - V0)) == 0
    assert np.max(np.abs(s.V_star[1] - V1)) == 0


def test_slant_toeplitz_pattern():
    b = from_theta(1.1)
    V0 = build_V(b).V_star[0]
    for r in range(4):
        for c in range(4):
            assert V0[r, c] == b.coeff(0, 2 * r - c)


@settings(max_examples=60)
@given(angles)
def test_cuntz_relation_compressed(theta):
    assert build_V(from_theta(theta)).cuntz_residual() < 1e-12


def test_zero_bank_rejected():
    with pytest.raises(InvalidFilterError):
        build_V(FilterBank(2, 2, ({0: 0, 3: 0}, {0: 0, 3: 0})))


def test_space_must_be_invariant():
    with pytest.raises(ValueError):
        build_V(from_theta(0.3), CorrelationSpace((0, -1)))


# -- sigma and rho ------------------------------------------------------------


def test_haar_sigma_keeps_diagonal():
    sigma = build_sigma(build_V(haar()))
    A = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.max(np.abs(apply_map(sigma, A) - np.diag([1.0, 4.0]))) < 1e-15


@settings(max_examples=40)
@given(angles)
def test_sigma_unital(theta):
    sigma = build_sigma(build_V(from_theta(theta)))
    assert np.max(np.abs(apply_map(sigma, np.eye(4)) - np.eye(4))) < 1e-14


def test_rho_equals_sigma_on_diagonal():
    s = build_V(from_theta(2.2))
    assert np.array_equal(build_rho(s, s), build_sigma(s))


def test_rho_definition():
    rng = np.random.default_rng(5)
    sv, sw = build_V(from_theta(0.8)), build_V(from_theta(4.1))
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    direct = sum(w @ A @ v for w, v in zip(sw.V, sv.V_star))
    assert np.max(np.abs(apply_map(build_rho(sw, sv), A) - direct)) < 1e-14


@settings(max_examples=40)
@given(angles, angles)
def test_block_assembly_matches_kron(theta, phi):
    sv, sw = build_V(from_theta(theta)), build_V(from_theta(phi))
    blocks = genus2_rho_blocks(coeffs(theta), coeffs(phi))
    assert np.max(np.abs(blocks - build_rho(sw, sv))) < 1e-14


def test_rho_mismatched_isometry_count():
    with pytest.raises(ValueError):
        build_rho(build_V(haar3()), build_V(haar()))


# -- spectrum ------------------------------------------------------------------


def table(theta):
    c, s = math.cos(theta), math.sin(theta)
    return [(1, 1), (0, 8), (c / 2, 2), (-c / 2, 2), ((1 + s) / 2, 2), (-s, 1)]


@pytest.mark.parametrize("theta", [0.3, 1.0, 2.0, 2.9, 3.9, 5.0, 6.0])
def test_spectrum_table(theta):
    rep = spectrum(build_sigma(build_V(from_theta(theta))))
    assert sum(m for _, m in rep.eigenvalues) == 16
    assert len(rep.eigenvalues) == 6
    for value, mult in table(theta):
        hits = [(v, m) for v, m in rep.eigenvalues if abs(v - value) < 1e-9]
        assert len(hits) == 1 and hits[0][1] == mult


def test_spectrum_half_pi():
    rep = spectrum(build_sigma(build_V(from_theta("pi/2"))))
    assert rep.multiplicity(1) == 3
    assert rep.multiplicity(-1) == 1
    assert rep.fixed_space_dim == 3
    assert rep.peripheral_group_order == 2


def test_spectrum_haar():
    rep = spectrum(build_sigma(build_V(haar())))
    assert rep.fixed_space_dim == 2 and rep.peripheral_group_order == 1


def test_spectrum_rejects_nonsquare():
    with pytest.raises(ValueError):
        spectrum(np.zeros((3, 4)))


def test_peripheral_validation():
    w = np.exp(2j * np.pi / 3)
    rep = spectrum(np.diag([1, w, w**2, 0.5]))
    assert rep.peripheral_group_order == 3
    with pytest.raises(PeripheralSpectrumError):
        spectrum(np.diag([1, np.exp(1j), 0.2]))
    with pytest.raises(PeripheralSpectrumError):
        spectrum(np.diag([2.0, 1.0]))


def test_spectrum_json():
    doc = spectrum(build_sigma(build_V(haar()))).to_json()
    assert doc["fixed_space_dim"] == 2
    assert sum(e["mult"] for e in doc["eigenvalues"]) == 4


def test_fixed_dimension_on_coarse_grid():
    dims = {}
    for i in range(72):
        theta = 2 * math.pi * i / 72
        dims[i] = spectrum(build_sigma(build_V(from_theta(theta)))).fixed_space_dim
    assert dims[18] == 3 and dims[54] == 2
    assert all(d == 1 for i, d in dims.items() if i not in (18, 54))


def test_haar_fixed_space_is_diagonal():
    basis = fixed_space_basis(build_sigma(build_V(haar())))
    assert span_angle([unit(0, 0, 2), unit(1, 1, 2)], basis) < 1e-14


def test_half_pi_eigenspaces():
    sigma = build_sigma(build_V(from_theta("pi/2")))
    P = [unit(0, 0), unit(3, 3), unit(1, 1) + unit(2, 2)]
    assert span_angle(P, fixed_space_basis(sigma)) < 1e-9
    w, v = np.linalg.eig(sigma)
    i = int(np.argmin(np.abs(w + 1)))
    U = v[:, i].reshape(4, 4)
    target = np.diag([0, 1, -1, 0]) / math.sqrt(2)
    U = U / U[1, 1] * target[1, 1]
    assert np.max(np.abs(U - target)) < 1e-12


# -- classification -------------------------------------------------------------


def test_classify_examples():
    c = classify(from_theta("3pi/2"))
    assert (c.commutant_dim, c.num_irreducible_summands, c.peripheral_group_order) == (2, 2, 1)
    assert not c.irreducible
    c = classify(from_theta("pi/2"))
    assert (c.commutant_dim, c.num_irreducible_summands, c.uhf_summands) == (3, 3, 4)
    assert c.summand_orders == (1, 1, 2)
    c = classify(from_theta("7pi/6"))
    assert c.irreducible and c.commutant_dim == 1 and c.uhf_summands == 1


def test_classify_haar_and_scale3():
    c = classify(haar())
    assert c.commutant_dim == 2 and c.uhf_summands == 2
    assert classify(haar3()).commutant_dim == 2


def test_classify_substituted():
    c = classify(substitute_odd(haar(), 2))
    assert c.commutant_dim == 3 and c.summand_orders == (1, 1, 4)
    big = classify(substitute_odd(haar(), 3))
    assert big.commutant_dim == 4
    assert big.num_irreducible_summands is None and big.uhf_summands is None


def test_classify_invalid():
    with pytest.raises(InvalidFilterError):
        classify(FilterBank(2, 2, ({0: 1.0}, {1: 1.0})))


# -- intertwiners -------------------------------------------------------------------


def test_intertwiner_singular_pair():
    a, b = from_theta("pi/2"), from_theta("3pi/2")
    assert intertwiner_space_dim(a, b) == 2
    assert intertwiner_space_dim(b, a) == 2
    basis = intertwiner_basis(b, a)  # V from 3pi/2, W from pi/2
    stack = np.column_stack([B.reshape(-1) for B in basis])
    assert span_angle([unit(0, 2), unit(3, 1)], stack) < 1e-9


def test_intertwiner_echelon_form_gives_matrix_units():
    basis = intertwiner_basis(from_theta("3pi/2"), from_theta("pi/2"))
    E = echelon_basis(np.column_stack([B.reshape(-1) for B in basis]))
    mats = sorted((E[:, i].reshape(4, 4) for i in range(2)), key=lambda M: -abs(M[0, 2]))
    assert np.array_equal(mats[0], unit(0, 2)) and np.array_equal(mats[1], unit(3, 1))


@pytest.mark.parametrize("theta", [0.5, "pi/2", "3pi/2", "7pi/6"])
def test_intertwiner_diagonal_is_commutant(theta):
    b = from_theta(theta)
    assert intertwiner_space_dim(b, b) == classify(b).commutant_dim


def test_intertwiner_disjoint():
    assert intertwiner_space_dim(from_theta("7pi/6"), from_theta("11pi/6")) == 0


def test_intertwiner_scale_mismatch():
    with pytest.raises(ValueError):
        intertwiner_space_dim(haar(), haar3())


# -- states ----------------------------------------------------------------------


def words(max_len, letters=2):
    out = [()]
    for n in range(1, max_len + 1):
        for i in range(letters**n):
            out.append(tuple((i // letters**k) % letters for k in range(n)))
    return out


def test_haar_states():
    s = build_V(haar())
    for I in words(3):
        for J in words(3):
            scale = 2.0 ** (-(len(I) + len(J)) / 2)
            assert abs(state_eval(s, [1, 0], I, J) - scale) < 1e-15
            sign = (-1) ** (sum(I) + sum(J))
            assert abs(state_eval(s, [0, 1], I, J) - sign * scale) < 1e-15


def test_state_of_empty_words():
    s = build_V(from_theta(1.3))
    xi = np.array([1, 2, 2, 4]) / 5
    assert abs(state_eval(s, xi, (), ()) - 1) < 1e-15


def test_state_is_inner_product_of_words():
    s = build_V(from_theta(0.9))
    xi = np.array([0.5, 0.5, 0.5, 0.5])
    # V_I* applies the first letter first
    v = s.V_star[1] @ (s.V_star[0] @ xi)
    assert abs(state_eval(s, xi, (0, 1), ()) - np.vdot(v, xi)) < 1e-15


def test_state_errors():
    s = build_V(haar())
    with pytest.raises(ValueError):
        state_eval(s, [1, 0], (2,), ())
    with pytest.raises(ValueError):
        state_eval(s, [1, 1], (), ())
    with pytest.raises(ValueError):
        state_eval(s, [1, 0, 0], (), ())


# -- K0 --------------------------------------------------------------------------


@settings(max_examples=40)
@given(angles)
def test_k0_invariant_for_family(theta):
    assert k0_invariance_check(build_V(from_theta(theta)))


def test_k0_not_applicable_to_haar():
    with pytest.raises(ValueError):
        k0_invariance_check(build_V(haar()))


def test_k0_half_pi_center_block():
    s = build_V(from_theta("pi/2"))
    assert k0_invariance_check(s)
    center = unit(1, 1) + unit(2, 2)
    assert np.max(np.abs(apply_map(build_sigma(s), center) - center)) < 1e-15


def test_k0_detects_leak():
    s = build_V(from_theta(0.7))
    leaky = type(s)((s.V_star[0] + unit(0, 1), s.V_star[1]), s.basis)
    assert not k0_invariance_check(leaky)
